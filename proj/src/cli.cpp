#include "evdet/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "evdet/annotations.hpp"
#include "evdet/deteval.hpp"
#include "evdet/error.hpp"
#include "evdet/event_core.hpp"
#include "evdet/fileio.hpp"
#include "evdet/parallel.hpp"
#include "evdet/reconstruction.hpp"
#include "evdet/representations.hpp"
#include "evdet/video2event.hpp"

namespace fs = std::filesystem;

namespace evdet::cli {

namespace {

struct SimulateOptions {
    fs::path frames;
    double fps = 0.0;
    SimulatorConfig sim;
    std::uint32_t max_events = 0;
    fs::path out;
    std::string format;
};

struct EcmOptions {
    fs::path events;
    std::string input_format;
    Timestamp window_us = 0;
    double fps = 0.0;
    std::string mode = "signed";
    std::string norm = "per_sequence";
    fs::path out;
    bool dump_raw = false;
};

struct ReconstructOptions {
    fs::path events;
    std::string input_format;
    ReconConfig recon;
    std::string tone_map = "percentile";
    std::optional<double> tone_lo;
    std::optional<double> tone_hi;
    fs::path out;
    bool dump_state = false;
};

struct EvalOptions {
    fs::path gt;
    fs::path det;
    double fps = 0.0;
    Timestamp window_us = 0;
    FrameIndex frame_offset = 0;
    fs::path events;
    std::string input_format;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    fs::path report;
    fs::path table;
    std::string label = "events";
};

struct StatsOptions {
    fs::path events;
    std::string input_format;
};

EventFormat resolve_format(const std::string& flag, const fs::path& path, bool for_input) {
    if (flag == "text") {
        return EventFormat::Text;
    }
    if (flag == "binary") {
        return EventFormat::Binary;
    }
    return for_input ? sniff_format(path) : format_for_path(path);
}

EventStream load_events(const fs::path& path, const std::string& format) {
    return read_events(path, resolve_format(format, path, true));
}

EcmMode parse_mode(const std::string& s) {
    if (s == "count") {
        return EcmMode::Count;
    }
    if (s == "two_channel") {
        return EcmMode::TwoChannel;
    }
    return EcmMode::Signed;
}

Timestamp window_from(Timestamp window_us, double fps) {
    if (window_us > 0) {
        return window_us;
    }
    if (fps > 0.0) {
        return std::max<Timestamp>(1, static_cast<Timestamp>(std::llround(1e6 / fps)));
    }
    throw Error(ErrorKind::ZeroWindow, "either --window-us or --fps is required");
}

void cmd_simulate(const SimulateOptions& o, std::ostream& out) {
    SimulatorConfig cfg = o.sim;
    if (o.max_events > 0) {
        cfg.max_events_per_pixel_per_interval = o.max_events;
    }
    cfg.validate();
    const FrameSequence video = load_frame_directory(o.frames, o.fps);
    const EventStream stream = simulate(video, cfg);
    write_events(stream, o.out, resolve_format(o.format, o.out, false));
    std::size_t on = 0;
    for (const auto& e : stream.events) {
        on += e.p > 0 ? 1 : 0;
    }
    out << "frames: " << video.frames.size() << "\n"
        << "geometry: " << stream.geometry.width << "x" << stream.geometry.height << "\n"
        << "duration_us: " << stream.duration() << "\n"
        << "events: " << stream.size() << " (on " << on << ", off " << stream.size() - on << ")\n";
}

void cmd_ecm(const EcmOptions& o, std::ostream& out) {
    const Timestamp window = window_from(o.window_us, o.fps);
    const EventStream stream = load_events(o.events, o.input_format);
    const EcmMode mode = parse_mode(o.mode);
    const Normalization norm = o.norm == "per_bin" ? Normalization::PerBin : Normalization::PerSequence;
    const EcmSequence seq = build_ecm(stream, window, mode, norm);

    StagedDirectory staged(o.out);
    for (const auto& frame : seq.bins) {
        if (mode == EcmMode::TwoChannel) {
            write_pgm(frame.gray_image(0), staged.path() / frame_file_name("ecm_on", frame.bin_index));
            write_pgm(frame.gray_image(1), staged.path() / frame_file_name("ecm_off", frame.bin_index));
        } else {
            write_pgm(frame.gray_image(0), staged.path() / frame_file_name("ecm", frame.bin_index));
        }
        if (o.dump_raw) {
            fs::path raw = staged.path() / frame_file_name("ecm", frame.bin_index);
            raw.replace_extension(".raw");
            write_file_atomic(raw, encode_raw_dump(frame));
        }
    }
    staged.commit();

    std::uint64_t total = 0;
    out << "window_us: " << window << "\n"
        << "mode: " << to_string(mode) << "\n"
        << "normalization: " << to_string(norm) << "\n"
        << "bins: " << seq.size() << "\n";
    for (const auto& frame : seq.bins) {
        out << "bin " << frame.bin_index << " [" << frame.t0 << ", " << frame.t1 << (frame.partial ? "] partial" : ")")
            << " events " << frame.event_count << "\n";
        total += frame.event_count;
    }
    out << "total_events: " << total << "\n";
}

void cmd_reconstruct(ReconstructOptions o, std::ostream& out) {
    if (o.tone_map == "fixed") {
        if (!o.tone_lo || !o.tone_hi) {
            throw Error(ErrorKind::InvalidConfig, "--tone-map fixed needs --tone-lo and --tone-hi");
        }
        o.recon.tone_map = ToneMap::fixed(*o.tone_lo, *o.tone_hi);
    } else {
        o.recon.tone_map = ToneMap::percentile(o.tone_lo.value_or(0.01), o.tone_hi.value_or(0.99));
    }
    o.recon.validate();
    const EventStream stream = load_events(o.events, o.input_format);
    const auto frames = reconstruct(stream, o.recon);

    StagedDirectory staged(o.out);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        write_pgm(frames[i].image(), staged.path() / frame_file_name("recon", i));
        if (o.dump_state) {
            fs::path state = staged.path() / frame_file_name("recon", i);
            state.replace_extension(".state");
            write_file_atomic(state, encode_state_dump(frames[i]));
        }
    }
    staged.commit();
    out << "frames: " << frames.size() << "\n"
        << "sample_period_us: " << o.recon.sample_period << "\n";
}

void cmd_eval(const EvalOptions& o, std::ostream& out, std::ostream& err) {
    const FrameClock clock(o.fps, o.frame_offset);
    const Timestamp window = window_from(o.window_us, o.fps);
    std::optional<Geometry> bounds;
    if (o.width > 0 && o.height > 0) {
        bounds = Geometry{o.width, o.height};
    }

    const AnnotationTable gt = read_annotations(o.gt, bounds);
    const DetectionTable det = read_detections(o.det, bounds);
    for (const auto& issue : gt.issues) {
        err << "warning: " << o.gt.string() << ": " << issue.message << "\n";
    }
    for (const auto& issue : det.issues) {
        err << "warning: " << o.det.string() << ": " << issue.message << "\n";
    }
    if (gt.clipped_away + det.clipped_away > 0) {
        err << "warning: dropped " << gt.clipped_away + det.clipped_away << " boxes outside the image\n";
    }

    Timestamp t_start = 0;
    Timestamp t_end = 0;
    if (!o.events.empty()) {
        const EventStream stream = load_events(o.events, o.input_format);
        t_start = stream.t_start;
        t_end = stream.t_end;
    } else {
        for (const auto& [frame, boxes] : gt.frames) {
            t_end = std::max(t_end, clock.time_of(frame));
        }
        for (const auto& [frame, boxes] : det.frames) {
            t_end = std::max(t_end, clock.time_of(frame));
        }
    }
    const BinGrid grid = BinGrid::make(t_start, t_end, window);
    const auto gt_bins = align(gt.frames, clock, grid);
    const auto det_bins = align(det.frames, clock, grid);
    for (const auto* frames : {&gt_bins.out_of_range_frames, &det_bins.out_of_range_frames}) {
        for (const FrameIndex f : *frames) {
            err << "warning: frame " << f << " lies outside the event stream\n";
        }
    }

    std::vector<EvalImage> images(grid.count);
    for (std::size_t b = 0; b < grid.count; ++b) {
        images[b].ground_truth = gt_bins.bins[b];
        images[b].detections = det_bins.bins[b];
    }
    const EvalReport report = evaluate(images);
    for (const auto& w : report.warnings) {
        err << "warning: " << w << "\n";
    }
    const std::string table = report_to_table(report, o.label);
    write_file_atomic(o.report, report_to_json(report));
    if (!o.table.empty()) {
        write_file_atomic(o.table, table);
    }
    out << table;
}

void cmd_stats(const StatsOptions& o, std::ostream& out) {
    const EventStream s = load_events(o.events, o.input_format);
    std::size_t on = 0;
    for (const auto& e : s.events) {
        on += e.p > 0 ? 1 : 0;
    }
    const double seconds = static_cast<double>(s.duration()) * 1e-6;
    const double rate = seconds > 0.0 ? static_cast<double>(s.size()) / seconds : 0.0;
    char rate_buf[64];
    std::snprintf(rate_buf, sizeof rate_buf, "%.3f", rate);
    out << "width: " << s.geometry.width << "\n"
        << "height: " << s.geometry.height << "\n"
        << "t_start_us: " << s.t_start << "\n"
        << "t_end_us: " << s.t_end << "\n"
        << "duration_us: " << s.duration() << "\n"
        << "events: " << s.size() << "\n"
        << "events_per_second: " << rate_buf << "\n"
        << "on_events: " << on << "\n"
        << "off_events: " << s.size() - on << "\n";
}

int exit_code_for(const Error& e) {
    return e.kind() == ErrorKind::Io ? kExitIo : kExitValidation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"evdet: event-camera data path toolkit"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker thread cap (0 = all cores); results do not depend on it");
    app.set_config("--config", "", "key=value config file with one [section] per subcommand")
        ->envname(kConfigEnv);

    const std::vector<std::string> formats{"auto", "text", "binary"};

    SimulateOptions sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Synthesize events from a directory of PGM/PPM frames");
    simulate_cmd->add_option("--frames", sim.frames, "Frame directory")->required();
    simulate_cmd->add_option("--fps", sim.fps, "Frame rate")->required()->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--theta-pos", sim.sim.theta_pos, "ON contrast threshold")
        ->capture_default_str()->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--theta-neg", sim.sim.theta_neg, "OFF contrast threshold")
        ->capture_default_str()->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--knee", sim.sim.linlog_knee, "Lin-log knee intensity")
        ->capture_default_str()->check(CLI::Range(0.0, 256.0));
    simulate_cmd->add_option("--max-events-per-interval", sim.max_events, "Per-pixel cap per frame interval (0 = none)");
    simulate_cmd->add_option("--out", sim.out, "Output event file (.evt text, .evb binary)")->required();
    simulate_cmd->add_option("--format", sim.format, "Override output format")->check(CLI::IsMember(formats));

    EcmOptions ecm;
    auto* ecm_cmd = app.add_subcommand("ecm", "Build event count maps and write them as PGM frames");
    ecm_cmd->add_option("--events", ecm.events, "Input event file")->required();
    ecm_cmd->add_option("--input-format", ecm.input_format)->check(CLI::IsMember(formats));
    ecm_cmd->add_option("--window-us", ecm.window_us, "Bin width in microseconds")->check(CLI::PositiveNumber);
    ecm_cmd->add_option("--fps", ecm.fps, "Derive the window as round(1e6 / fps)")->check(CLI::PositiveNumber);
    ecm_cmd->add_option("--mode", ecm.mode)->capture_default_str()->check(
        CLI::IsMember({"signed", "count", "two_channel"}));
    ecm_cmd->add_option("--norm", ecm.norm)->capture_default_str()->check(CLI::IsMember({"per_sequence", "per_bin"}));
    ecm_cmd->add_option("--out", ecm.out, "Output directory (absent or empty)")->required();
    ecm_cmd->add_flag("--dump-raw", ecm.dump_raw, "Also write ECMR raw grids");

    ReconstructOptions rec;
    auto* rec_cmd = app.add_subcommand("reconstruct", "Reconstruct grayscale frames with a leaky integrator");
    rec_cmd->add_option("--events", rec.events, "Input event file")->required();
    rec_cmd->add_option("--input-format", rec.input_format)->check(CLI::IsMember(formats));
    rec_cmd->add_option("--alpha", rec.recon.alpha, "Decay rate (1/s)")->capture_default_str()->check(
        CLI::NonNegativeNumber);
    rec_cmd->add_option("--contrast", rec.recon.contrast, "Log-intensity step per event")
        ->capture_default_str()->check(CLI::PositiveNumber);
    rec_cmd->add_option("--sample-period-us", rec.recon.sample_period, "Microseconds between frames")
        ->capture_default_str()->check(CLI::PositiveNumber);
    rec_cmd->add_option("--tone-map", rec.tone_map)->capture_default_str()->check(
        CLI::IsMember({"percentile", "fixed"}));
    rec_cmd->add_option("--tone-lo", rec.tone_lo, "Lower quantile (percentile) or state value (fixed)");
    rec_cmd->add_option("--tone-hi", rec.tone_hi, "Upper quantile (percentile) or state value (fixed)");
    rec_cmd->add_option("--out", rec.out, "Output directory (absent or empty)")->required();
    rec_cmd->add_flag("--dump-state", rec.dump_state, "Also write RECS state dumps");

    EvalOptions ev;
    auto* eval_cmd = app.add_subcommand("eval", "Score detections against VisDrone-style ground truth");
    eval_cmd->add_option("--gt", ev.gt, "Ground-truth CSV")->required();
    eval_cmd->add_option("--det", ev.det, "Detection CSV")->required();
    eval_cmd->add_option("--fps", ev.fps, "Annotation frame rate")->required()->check(CLI::PositiveNumber);
    eval_cmd->add_option("--window-us", ev.window_us, "Bin width (default: one frame)")->check(CLI::PositiveNumber);
    eval_cmd->add_option("--frame-offset", ev.frame_offset, "Index of the frame at t = 0 (VisDrone: 1)")
        ->capture_default_str();
    eval_cmd->add_option("--events", ev.events, "Event file whose time range defines the bins");
    eval_cmd->add_option("--input-format", ev.input_format)->check(CLI::IsMember(formats));
    eval_cmd->add_option("--width", ev.width, "Image width for box clipping");
    eval_cmd->add_option("--height", ev.height, "Image height for box clipping");
    eval_cmd->add_option("--report", ev.report, "JSON report path")->required();
    eval_cmd->add_option("--table", ev.table, "Also write the text table here");
    eval_cmd->add_option("--label", ev.label, "Input label in the table")->capture_default_str();

    StatsOptions st;
    auto* stats_cmd = app.add_subcommand("stats", "Summarize an event file");
    stats_cmd->add_option("--events", st.events, "Input event file")->required();
    stats_cmd->add_option("--input-format", st.input_format)->check(CLI::IsMember(formats));

    // CLI11 consumes a reversed argument vector.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::FileError& e) {
        err << e.what() << "\n";
        return kExitIo;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    const ScopedThreadLimit limit(threads);
    int code = kExitOk;
    try {
        if (*simulate_cmd) {
            cmd_simulate(sim, out);
        } else if (*ecm_cmd) {
            cmd_ecm(ecm, out);
        } else if (*rec_cmd) {
            cmd_reconstruct(rec, out);
        } else if (*eval_cmd) {
            cmd_eval(ev, out, err);
        } else if (*stats_cmd) {
            cmd_stats(st, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        code = exit_code_for(e);
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        code = kExitIo;
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        code = kExitIo;
    }
    return code;
}

}  // namespace evdet::cli

#include "evdet/video2event.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evdet/error.hpp"
#include "evdet/parallel.hpp"

namespace evdet {

void SimulatorConfig::validate() const {
    if (!(theta_pos > 0.0) || !(theta_neg > 0.0)) {
        throw Error(ErrorKind::InvalidConfig, "contrast thresholds must be > 0");
    }
    if (!(linlog_knee > 0.0) || !(linlog_knee < 256.0)) {
        throw Error(ErrorKind::InvalidConfig, "linlog knee must lie in (0, 256)");
    }
    if (max_events_per_pixel_per_interval && *max_events_per_pixel_per_interval == 0) {
        throw Error(ErrorKind::InvalidConfig, "event cap must be >= 1 when set");
    }
}

void FrameSequence::validate() const {
    if (!(fps > 0.0) || !std::isfinite(fps)) {
        throw Error(ErrorKind::DegenerateFps, "fps must be a positive number");
    }
    if (frames.empty()) {
        throw Error(ErrorKind::InvalidConfig, "video has no frames");
    }
    const std::size_t n = std::size_t(width) * height;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (frames[i].size() != n) {
            throw Error(ErrorKind::GeometryMismatch, "frame " + std::to_string(i) + " has " +
                                                         std::to_string(frames[i].size()) + " pixels, expected " +
                                                         std::to_string(n));
        }
        for (double v : frames[i]) {
            if (!(v >= 0.0 && v <= 255.0)) {
                throw Error(ErrorKind::InvalidConfig, "frame " + std::to_string(i) + " intensity outside [0, 255]");
            }
        }
    }
}

FrameSequence FrameSequence::from_images(std::span<const GrayImage> images, double fps) {
    FrameSequence seq;
    seq.fps = fps;
    if (!images.empty()) {
        seq.width = images.front().width;
        seq.height = images.front().height;
    }
    for (std::size_t i = 0; i < images.size(); ++i) {
        const auto& img = images[i];
        if (img.width != seq.width || img.height != seq.height) {
            throw Error(ErrorKind::GeometryMismatch, "frame " + std::to_string(i) + " is " +
                                                         std::to_string(img.width) + "x" + std::to_string(img.height));
        }
        seq.frames.emplace_back(img.pixels.begin(), img.pixels.end());
    }
    return seq;
}

FrameSequence load_frame_directory(const std::filesystem::path& dir, double fps) {
    std::vector<GrayImage> images;
    for (const auto& path : list_frame_files(dir)) {
        images.push_back(read_pnm(path));
    }
    if (images.empty()) {
        throw Error(ErrorKind::Io, "no PGM/PPM frames in " + dir.string());
    }
    return FrameSequence::from_images(images, fps);
}

double linlog(double intensity, double knee) {
    if (intensity < knee) {
        return intensity * (std::log(knee) / knee);
    }
    return std::log(intensity);
}

double linlog_inverse(double log_intensity, double knee) {
    const double at_knee = std::log(knee);
    if (log_intensity < at_knee) {
        return log_intensity * (knee / at_knee);
    }
    return std::exp(log_intensity);
}

Timestamp frame_time_us(std::size_t index, double fps) {
    return static_cast<Timestamp>(std::floor(static_cast<double>(index) * 1e6 / fps + 0.5));
}

EventStream simulate(const FrameSequence& video, const SimulatorConfig& cfg) {
    cfg.validate();
    video.validate();
    if (video.frames.size() < 2) {
        throw Error(ErrorKind::InvalidConfig, "simulation needs at least 2 frames");
    }
    if (video.width > 0x10000 || video.height > 0x10000) {
        throw Error(ErrorKind::InvalidConfig, "sensor wider than 65536 pixels");
    }

    const std::size_t num_frames = video.frames.size();
    const std::uint32_t width = video.width;
    const std::uint64_t cap = cfg.max_events_per_pixel_per_interval.value_or(0);
    const Timestamp t_end = frame_time_us(num_frames - 1, video.fps);

    // Log frames once; each row worker reads them concurrently.
    std::vector<std::vector<double>> log_frames(num_frames);
    parallel_for(num_frames, [&](std::size_t begin, std::size_t end) {
        for (std::size_t f = begin; f < end; ++f) {
            auto& out = log_frames[f];
            out.resize(video.frames[f].size());
            for (std::size_t i = 0; i < out.size(); ++i) {
                out[i] = linlog(video.frames[f][i], cfg.linlog_knee);
            }
        }
    });

    std::vector<std::vector<Event>> per_row(video.height);
    parallel_for(video.height, [&](std::size_t row_begin, std::size_t row_end) {
        for (std::size_t y = row_begin; y < row_end; ++y) {
            auto& out = per_row[y];
            for (std::uint32_t x = 0; x < width; ++x) {
                const std::size_t idx = y * width + x;
                double ref = log_frames[0][idx];
                for (std::size_t f = 1; f < num_frames; ++f) {
                    const double prev = log_frames[f - 1][idx];
                    const double next = log_frames[f][idx];
                    const double delta = next - ref;
                    const int sign = delta > 0.0 ? 1 : -1;
                    const double theta = sign > 0 ? cfg.theta_pos : cfg.theta_neg;
                    const auto crossings = static_cast<std::uint64_t>(std::floor(std::abs(delta) / theta));
                    if (crossings == 0) {
                        continue;
                    }
                    const double t_prev = static_cast<double>(f - 1) * 1e6 / video.fps;
                    const double period_us = static_cast<double>(f) * 1e6 / video.fps - t_prev;
                    const double span = next - prev;
                    const std::uint64_t emitted = cap != 0 ? std::min(crossings, cap) : crossings;
                    for (std::uint64_t k = 1; k <= emitted; ++k) {
                        const double level = ref + static_cast<double>(k) * theta * sign;
                        double frac = span != 0.0 ? (level - prev) / span : 1.0;
                        frac = std::clamp(frac, 0.0, 1.0);
                        const auto t = std::min(t_end, static_cast<Timestamp>(std::floor(t_prev + frac * period_us + 0.5)));
                        out.push_back({t, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                                       static_cast<std::int8_t>(sign)});
                    }
                    ref += static_cast<double>(crossings) * theta * sign;
                }
            }
        }
    });

    EventStream stream;
    stream.geometry = {video.width, video.height};
    stream.t_start = 0;
    stream.t_end = t_end;
    std::size_t total = 0;
    for (const auto& row : per_row) {
        total += row.size();
    }
    stream.events.reserve(total);
    for (auto& row : per_row) {
        stream.events.insert(stream.events.end(), row.begin(), row.end());
        row = {};
    }
    return canonicalize(std::move(stream));
}

}  // namespace evdet

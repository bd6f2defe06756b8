#include "evdet/annotations.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <tuple>

#include "evdet/fileio.hpp"

namespace evdet {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
    if (field.empty()) {
        return false;
    }
    const auto res = std::from_chars(field.data(), field.data() + field.size(), out);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        return false;
    }
    if constexpr (std::is_floating_point_v<T>) {
        return std::isfinite(out);
    }
    return true;
}

// Visits non-blank lines with their 1-based line number. A first line that
// starts with a letter is treated as a column header.
template <typename Fn>
void for_each_row(std::string_view csv, Fn&& fn) {
    std::size_t pos = 0;
    std::size_t row = 0;
    bool first = true;
    while (pos < csv.size()) {
        std::size_t nl = csv.find('\n', pos);
        if (nl == std::string_view::npos) {
            nl = csv.size();
        }
        const std::string_view line = trim(csv.substr(pos, nl - pos));
        pos = nl + 1;
        ++row;
        if (line.empty()) {
            continue;
        }
        if (first && std::isalpha(static_cast<unsigned char>(line.front()))) {
            first = false;
            continue;
        }
        first = false;
        fn(row, line);
    }
}

// Returns false when the clipped box is empty.
bool clip_box(Box& box, const Geometry& bounds) {
    const double left = std::clamp(box.left, 0.0, double(bounds.width));
    const double top = std::clamp(box.top, 0.0, double(bounds.height));
    const double right = std::clamp(box.right(), 0.0, double(bounds.width));
    const double bottom = std::clamp(box.bottom(), 0.0, double(bounds.height));
    box = {left, top, right - left, bottom - top};
    return box.width > 0.0 && box.height > 0.0;
}

RowIssue issue(std::size_t row, ErrorKind kind, std::string msg) {
    return {row, kind, "row " + std::to_string(row) + ": " + std::move(msg)};
}

}  // namespace

AnnotationTable parse_annotations(std::string_view csv, std::optional<Geometry> bounds) {
    AnnotationTable table;
    for_each_row(csv, [&](std::size_t row, std::string_view line) {
        const auto f = split_csv(line);
        if (f.size() != 10) {
            table.issues.push_back(issue(row, ErrorKind::ParseError,
                                         "expected 10 fields, found " + std::to_string(f.size())));
            return;
        }
        GroundTruthBox gt;
        double score = 0.0;
        std::int64_t truncation = 0;
        std::int64_t occlusion = 0;
        if (!parse_number(f[0], gt.frame_index) || !parse_number(f[1], gt.track_id) ||
            !parse_number(f[2], gt.box.left) || !parse_number(f[3], gt.box.top) ||
            !parse_number(f[4], gt.box.width) || !parse_number(f[5], gt.box.height) || !parse_number(f[6], score) ||
            !parse_number(f[7], gt.category) || !parse_number(f[8], truncation) ||
            !parse_number(f[9], occlusion) || gt.frame_index < 0) {
            table.issues.push_back(issue(row, ErrorKind::ParseError, "malformed field"));
            return;
        }
        if (gt.box.width <= 0.0 || gt.box.height <= 0.0) {
            table.issues.push_back(issue(row, ErrorKind::NonPositiveBox, "width and height must be > 0"));
            return;
        }
        gt.ignore = gt.category == 0 || score == 0.0;
        if (bounds && !clip_box(gt.box, *bounds)) {
            ++table.clipped_away;
            return;
        }
        table.frames[gt.frame_index].push_back(gt);
    });
    return table;
}

AnnotationTable read_annotations(const std::filesystem::path& path, std::optional<Geometry> bounds) {
    return parse_annotations(read_file(path), bounds);
}

DetectionTable parse_detections(std::string_view csv, std::optional<Geometry> bounds) {
    DetectionTable table;
    for_each_row(csv, [&](std::size_t row, std::string_view line) {
        const auto f = split_csv(line);
        if (f.size() != 7) {
            table.issues.push_back(issue(row, ErrorKind::ParseError,
                                         "expected 7 fields, found " + std::to_string(f.size())));
            return;
        }
        Detection det;
        if (!parse_number(f[0], det.frame_index) || !parse_number(f[1], det.box.left) ||
            !parse_number(f[2], det.box.top) || !parse_number(f[3], det.box.width) ||
            !parse_number(f[4], det.box.height) || !parse_number(f[5], det.score) ||
            !parse_number(f[6], det.category) || det.frame_index < 0) {
            table.issues.push_back(issue(row, ErrorKind::ParseError, "malformed field"));
            return;
        }
        if (det.score < 0.0 || det.score > 1.0) {
            table.issues.push_back(issue(row, ErrorKind::ParseError, "score outside [0, 1]"));
            return;
        }
        if (det.box.width <= 0.0 || det.box.height <= 0.0) {
            table.issues.push_back(issue(row, ErrorKind::NonPositiveBox, "width and height must be > 0"));
            return;
        }
        if (bounds && !clip_box(det.box, *bounds)) {
            ++table.clipped_away;
            return;
        }
        table.frames[det.frame_index].push_back(det);
    });
    return table;
}

DetectionTable read_detections(const std::filesystem::path& path, std::optional<Geometry> bounds) {
    return parse_detections(read_file(path), bounds);
}

std::string format_detections_csv(const std::vector<Detection>& detections) {
    std::ostringstream out;
    out.precision(17);
    out << "frame,left,top,width,height,score,category\n";
    for (const auto& d : detections) {
        out << d.frame_index << ',' << d.box.left << ',' << d.box.top << ',' << d.box.width << ',' << d.box.height
            << ',' << d.score << ',' << d.category << '\n';
    }
    return out.str();
}

FrameClock::FrameClock(double fps, FrameIndex frame_offset) : fps_(fps), offset_(frame_offset) {
    if (!(fps > 0.0) || !(fps <= 1e6)) {
        throw Error(ErrorKind::DegenerateFps, "frame clock needs 0 < fps <= 1e6");
    }
}

Timestamp FrameClock::time_of(FrameIndex frame) const {
    return static_cast<Timestamp>(std::floor(static_cast<double>(frame - offset_) * 1e6 / fps_ + 0.5));
}

namespace {

auto sort_key(const GroundTruthBox& g) {
    return std::tuple(g.frame_index, g.track_id, g.ignore, g.category, g.box);
}

auto sort_key(const Detection& d) {
    return std::tuple(d.frame_index, -d.score, d.category, d.box);
}

// Superseded-box removal; only ground truth has track identities.
std::size_t dedupe_tracks(std::vector<GroundTruthBox>& boxes) {
    // Sorted by (frame, track); walk backwards keeping the newest per track.
    std::map<std::pair<std::int64_t, bool>, bool> seen;
    std::vector<GroundTruthBox> kept;
    for (auto it = boxes.rbegin(); it != boxes.rend(); ++it) {
        if (seen.emplace(std::pair(it->track_id, it->ignore), true).second) {
            kept.push_back(*it);
        }
    }
    std::reverse(kept.begin(), kept.end());
    const std::size_t removed = boxes.size() - kept.size();
    boxes = std::move(kept);
    return removed;
}

std::size_t dedupe_tracks(std::vector<Detection>&) { return 0; }

template <typename T>
BinnedBoxes<T> align_impl(const std::map<FrameIndex, std::vector<T>>& frames, const FrameClock& clock,
                          const BinGrid& grid) {
    BinnedBoxes<T> out;
    out.bins.resize(grid.count);
    for (const auto& [frame, boxes] : frames) {
        const Timestamp t = clock.time_of(frame);
        if (t > grid.t_end + grid.window) {
            throw Error(ErrorKind::FpsMismatch, "frame " + std::to_string(frame) + " at " + std::to_string(t) +
                                                    " us lies more than one bin past the stream end " +
                                                    std::to_string(grid.t_end) + " us");
        }
        const std::size_t bin = grid.bin_of(t);
        if (bin == grid.count) {
            out.out_of_range_frames.push_back(frame);
            out.out_of_range_boxes += boxes.size();
            continue;
        }
        auto& dst = out.bins[bin];
        dst.insert(dst.end(), boxes.begin(), boxes.end());
    }
    for (auto& bin : out.bins) {
        std::stable_sort(bin.begin(), bin.end(), [](const T& a, const T& b) { return sort_key(a) < sort_key(b); });
        out.deduplicated += dedupe_tracks(bin);
    }
    return out;
}

}  // namespace

BinnedBoxes<GroundTruthBox> align(const std::map<FrameIndex, std::vector<GroundTruthBox>>& frames,
                                  const FrameClock& clock, const BinGrid& grid) {
    return align_impl(frames, clock, grid);
}

BinnedBoxes<Detection> align(const std::map<FrameIndex, std::vector<Detection>>& frames, const FrameClock& clock,
                             const BinGrid& grid) {
    return align_impl(frames, clock, grid);
}

}  // namespace evdet

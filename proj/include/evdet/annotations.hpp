#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evdet/box.hpp"
#include "evdet/error.hpp"
#include "evdet/event_core.hpp"
#include "evdet/representations.hpp"

namespace evdet {

using FrameIndex = std::int64_t;

struct GroundTruthBox {
    FrameIndex frame_index = 0;
    std::int64_t track_id = 0;
    Box box;
    int category = 0;
    bool ignore = false;  ///< ignored region: excluded from both FP and FN counting

    friend bool operator==(const GroundTruthBox&, const GroundTruthBox&) = default;
};

struct Detection {
    FrameIndex frame_index = 0;
    Box box;
    int category = 0;
    double score = 0.0;

    friend bool operator==(const Detection&, const Detection&) = default;
};

/// A rejected CSV row. Row numbers are 1-based physical line numbers.
struct RowIssue {
    std::size_t row = 0;
    ErrorKind kind = ErrorKind::ParseError;
    std::string message;
};

template <typename T>
struct FrameTable {
    std::map<FrameIndex, std::vector<T>> frames;
    std::vector<RowIssue> issues;
    std::size_t clipped_away = 0;  ///< boxes that fell completely outside the image

    std::size_t box_count() const {
        std::size_t n = 0;
        for (const auto& [frame, boxes] : frames) {
            n += boxes.size();
        }
        return n;
    }
};

using AnnotationTable = FrameTable<GroundTruthBox>;
using DetectionTable = FrameTable<Detection>;

/// VisDrone-VID rows: frame,target_id,left,top,width,height,score,category,
/// truncation,occlusion. Category 0 or score 0 marks an ignored region.
/// Malformed rows are collected in `issues`, never thrown. When `bounds` is
/// given boxes are clipped to the image and fully outside boxes dropped.
AnnotationTable parse_annotations(std::string_view csv, std::optional<Geometry> bounds = {});
AnnotationTable read_annotations(const std::filesystem::path& path, std::optional<Geometry> bounds = {});

/// Detector dump rows: frame,left,top,width,height,score,category.
DetectionTable parse_detections(std::string_view csv, std::optional<Geometry> bounds = {});
DetectionTable read_detections(const std::filesystem::path& path, std::optional<Geometry> bounds = {});

std::string format_detections_csv(const std::vector<Detection>& detections);

/// Frame k of the annotated video sits at round((k - frame_offset) * 1e6 / fps).
/// VisDrone numbers frames from 1, so its offset is 1.
class FrameClock {
public:
    /// Throws DegenerateFps unless 0 < fps <= 1e6 (strictly increasing times).
    explicit FrameClock(double fps, FrameIndex frame_offset = 0);

    double fps() const { return fps_; }
    FrameIndex frame_offset() const { return offset_; }
    Timestamp time_of(FrameIndex frame) const;

private:
    double fps_;
    FrameIndex offset_;
};

template <typename T>
struct BinnedBoxes {
    std::vector<std::vector<T>> bins;
    std::vector<FrameIndex> out_of_range_frames;  ///< frames outside [t_start, t_end]
    std::size_t out_of_range_boxes = 0;
    std::size_t deduplicated = 0;  ///< older boxes of a track superseded inside one bin

    std::size_t box_count() const {
        std::size_t n = 0;
        for (const auto& b : bins) {
            n += b.size();
        }
        return n;
    }
};

/// Attaches each frame's boxes to the bin whose [t0, t1) holds its time.
/// Within a bin a track keeps only its latest frame's box. Frames past the
/// stream are reported; a frame more than one bin past t_end means the
/// clock does not match the stream and raises FpsMismatch.
BinnedBoxes<GroundTruthBox> align(const std::map<FrameIndex, std::vector<GroundTruthBox>>& frames,
                                  const FrameClock& clock, const BinGrid& grid);
BinnedBoxes<Detection> align(const std::map<FrameIndex, std::vector<Detection>>& frames, const FrameClock& clock,
                             const BinGrid& grid);

}  // namespace evdet

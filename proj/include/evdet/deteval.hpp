#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evdet/annotations.hpp"
#include "evdet/box.hpp"

namespace evdet {

/// Intersection over union. Throws DegenerateBox for non-positive sides.
double iou(const Box& a, const Box& b);

struct ScoredBox {
    Box box;
    double score = 0.0;
};

enum class Outcome { TruePositive, FalsePositive, Ignored };

/// Greedy single-class, single-image matching. Indices refer to input order.
struct MatchResult {
    std::vector<Outcome> outcome;                    ///< per detection
    std::vector<std::optional<std::size_t>> gt_for;  ///< per detection
    std::vector<bool> gt_matched;                    ///< per ground truth
};

/// Detections are visited by descending score (ties keep input order); each
/// takes the unmatched ground truth with the highest IoU >= iou_threshold
/// (ties to the lower index). A detection left unmatched whose IoU with some
/// ignore region exceeds ignore_iou is Ignored rather than a false positive.
MatchResult match(std::span<const ScoredBox> detections, std::span<const Box> ground_truth,
                  std::span<const Box> ignore_regions, double iou_threshold, double ignore_iou = 0.5);

/// 101 recall thresholds 0, 0.01, ..., 1.
inline constexpr std::size_t kRecallPoints = 101;

struct PrCurve {
    double ap = 0.0;
    std::array<double, kRecallPoints> precision{};  ///< interpolated precision at each recall threshold
};

/// COCO-style interpolated AP over true-positive flags sorted by descending
/// score. Returns zero for num_gt == 0.
PrCurve average_precision(std::span<const bool> tp_sorted, std::size_t num_gt);

/// IoU grid 0.50:0.05:0.95.
std::vector<double> coco_iou_thresholds();

struct EvalConfig {
    std::vector<double> iou_thresholds = coco_iou_thresholds();
    double ignore_iou = 0.5;
};

/// One evaluated image: a frame or a time bin.
struct EvalImage {
    std::vector<GroundTruthBox> ground_truth;
    std::vector<Detection> detections;
};

struct ClassReport {
    int category = 0;
    std::size_t num_gt = 0;
    std::size_t num_det = 0;
    bool scored = false;            ///< false when the class has no ground truth
    std::vector<double> ap;         ///< per IoU threshold
    std::vector<PrCurve> curves;    ///< per IoU threshold
    double ap50 = 0.0;
    double map = 0.0;
};

struct EvalReport {
    std::vector<double> iou_thresholds;
    std::vector<ClassReport> classes;  ///< ordered by category
    double ap50 = 0.0;                 ///< mean over scored classes of AP at IoU 0.5
    double map = 0.0;                  ///< mean over scored classes and thresholds
    std::vector<std::string> warnings;
};

/// Per-class AP over all images. Ground-truth boxes flagged ignore act as
/// class-agnostic ignore regions. Classes without ground truth are listed
/// but left out of ap50/map.
EvalReport evaluate(std::span<const EvalImage> images, const EvalConfig& config = {});

/// JSON with keys per_class, ap50, map, pr_curves (plus iou_thresholds,
/// warnings). Output is byte-stable for equal reports.
std::string report_to_json(const EvalReport& report);

/// Fixed-width text table: one row per class and a final "all" row.
std::string report_to_table(const EvalReport& report, const std::string& input_label = "events");

}  // namespace evdet

#include "evdet/deteval.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <map>
#include <numeric>
#include <set>

#include "evdet/error.hpp"
#include "evdet/parallel.hpp"

namespace evdet {

double iou(const Box& a, const Box& b) {
    if (!(a.width > 0.0) || !(a.height > 0.0) || !(b.width > 0.0) || !(b.height > 0.0)) {
        throw Error(ErrorKind::DegenerateBox, "IoU needs boxes with positive width and height");
    }
    const double iw = std::min(a.right(), b.right()) - std::max(a.left, b.left);
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top);
    if (iw <= 0.0 || ih <= 0.0) {
        return 0.0;
    }
    const double inter = iw * ih;
    return inter / (a.area() + b.area() - inter);
}

MatchResult match(std::span<const ScoredBox> detections, std::span<const Box> ground_truth,
                  std::span<const Box> ignore_regions, double iou_threshold, double ignore_iou) {
    MatchResult result;
    result.outcome.assign(detections.size(), Outcome::FalsePositive);
    result.gt_for.assign(detections.size(), std::nullopt);
    result.gt_matched.assign(ground_truth.size(), false);

    std::vector<std::size_t> order(detections.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return detections[a].score > detections[b].score; });

    for (const std::size_t d : order) {
        const Box& det = detections[d].box;
        std::optional<std::size_t> best;
        double best_iou = iou_threshold;
        for (std::size_t g = 0; g < ground_truth.size(); ++g) {
            if (result.gt_matched[g]) {
                continue;
            }
            const double v = iou(det, ground_truth[g]);
            // Strict improvement keeps the lower index on ties.
            if (v >= best_iou && (!best || v > best_iou)) {
                best = g;
                best_iou = v;
            }
        }
        if (best) {
            result.gt_matched[*best] = true;
            result.gt_for[d] = best;
            result.outcome[d] = Outcome::TruePositive;
            continue;
        }
        for (const Box& region : ignore_regions) {
            if (iou(det, region) > ignore_iou) {
                result.outcome[d] = Outcome::Ignored;
                break;
            }
        }
    }
    return result;
}

PrCurve average_precision(std::span<const bool> tp_sorted, std::size_t num_gt) {
    PrCurve curve;
    if (num_gt == 0 || tp_sorted.empty()) {
        return curve;
    }
    const std::size_t n = tp_sorted.size();
    std::vector<double> recall(n);
    std::vector<double> precision(n);
    std::size_t tp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        tp += tp_sorted[i] ? 1 : 0;
        recall[i] = static_cast<double>(tp) / static_cast<double>(num_gt);
        precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    }
    // Envelope: best precision at any recall at least as high.
    for (std::size_t i = n - 1; i > 0; --i) {
        precision[i - 1] = std::max(precision[i - 1], precision[i]);
    }
    double sum = 0.0;
    for (std::size_t r = 0; r < kRecallPoints; ++r) {
        const double threshold = static_cast<double>(r) / 100.0;
        const auto it = std::lower_bound(recall.begin(), recall.end(), threshold);
        const double p = it == recall.end() ? 0.0 : precision[static_cast<std::size_t>(it - recall.begin())];
        curve.precision[r] = p;
        sum += p;
    }
    curve.ap = sum / static_cast<double>(kRecallPoints);
    return curve;
}

std::vector<double> coco_iou_thresholds() {
    std::vector<double> out;
    for (int i = 0; i < 10; ++i) {
        out.push_back(0.5 + 0.05 * i);
    }
    return out;
}

namespace {

struct ClassImage {
    std::vector<ScoredBox> dets;
    std::vector<Box> gts;
};

// AP for one (class, threshold) pair, pooling detections over images.
PrCurve class_curve(const std::vector<ClassImage>& images, const std::vector<std::vector<Box>>& ignore,
                    std::size_t num_gt, double threshold, double ignore_iou) {
    struct Scored {
        double score;
        bool tp;
    };
    std::vector<Scored> pooled;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const auto& img = images[i];
        if (img.dets.empty()) {
            continue;
        }
        const MatchResult m = match(img.dets, img.gts, ignore[i], threshold, ignore_iou);
        // Visit in the matcher's order so pooled ties stay deterministic.
        std::vector<std::size_t> order(img.dets.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return img.dets[a].score > img.dets[b].score; });
        for (const std::size_t d : order) {
            if (m.outcome[d] != Outcome::Ignored) {
                pooled.push_back({img.dets[d].score, m.outcome[d] == Outcome::TruePositive});
            }
        }
    }
    std::stable_sort(pooled.begin(), pooled.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });
    // std::vector<bool> cannot back a span.
    auto flags = std::make_unique<bool[]>(pooled.size());
    for (std::size_t i = 0; i < pooled.size(); ++i) {
        flags[i] = pooled[i].tp;
    }
    return average_precision(std::span<const bool>(flags.get(), pooled.size()), num_gt);
}

}  // namespace

EvalReport evaluate(std::span<const EvalImage> images, const EvalConfig& config) {
    if (config.iou_thresholds.empty()) {
        throw Error(ErrorKind::InvalidConfig, "at least one IoU threshold is required");
    }
    EvalReport report;
    report.iou_thresholds = config.iou_thresholds;

    std::set<int> categories;
    std::vector<std::vector<Box>> ignore(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        for (const auto& g : images[i].ground_truth) {
            if (g.ignore) {
                ignore[i].push_back(g.box);
            } else {
                categories.insert(g.category);
            }
        }
        for (const auto& d : images[i].detections) {
            categories.insert(d.category);
        }
    }

    // Per-class views of every image.
    std::vector<int> cats(categories.begin(), categories.end());
    std::vector<std::vector<ClassImage>> per_class(cats.size(), std::vector<ClassImage>(images.size()));
    std::map<int, std::size_t> index_of;
    for (std::size_t c = 0; c < cats.size(); ++c) {
        index_of[cats[c]] = c;
    }
    report.classes.resize(cats.size());
    for (std::size_t c = 0; c < cats.size(); ++c) {
        report.classes[c].category = cats[c];
    }
    for (std::size_t i = 0; i < images.size(); ++i) {
        for (const auto& g : images[i].ground_truth) {
            if (!g.ignore) {
                const std::size_t c = index_of[g.category];
                per_class[c][i].gts.push_back(g.box);
                ++report.classes[c].num_gt;
            }
        }
        for (const auto& d : images[i].detections) {
            const std::size_t c = index_of[d.category];
            per_class[c][i].dets.push_back({d.box, d.score});
            ++report.classes[c].num_det;
        }
    }

    const std::size_t num_thr = config.iou_thresholds.size();
    for (auto& cls : report.classes) {
        cls.scored = cls.num_gt > 0;
        cls.ap.assign(num_thr, 0.0);
        cls.curves.assign(num_thr, PrCurve{});
    }
    parallel_for(cats.size() * num_thr, [&](std::size_t begin, std::size_t end) {
        for (std::size_t job = begin; job < end; ++job) {
            const std::size_t c = job / num_thr;
            const std::size_t t = job % num_thr;
            auto& cls = report.classes[c];
            if (!cls.scored) {
                continue;
            }
            cls.curves[t] = class_curve(per_class[c], ignore, cls.num_gt, config.iou_thresholds[t], config.ignore_iou);
            cls.ap[t] = cls.curves[t].ap;
        }
    });

    // Index of the 0.5 threshold, if present.
    std::optional<std::size_t> t50;
    for (std::size_t t = 0; t < num_thr; ++t) {
        if (std::abs(config.iou_thresholds[t] - 0.5) < 1e-12) {
            t50 = t;
        }
    }
    std::size_t scored = 0;
    double sum_map = 0.0;
    double sum_ap50 = 0.0;
    for (auto& cls : report.classes) {
        if (!cls.scored) {
            continue;
        }
        cls.map = std::accumulate(cls.ap.begin(), cls.ap.end(), 0.0) / static_cast<double>(num_thr);
        cls.ap50 = t50 ? cls.ap[*t50] : 0.0;
        sum_map += cls.map;
        sum_ap50 += cls.ap50;
        ++scored;
    }
    if (scored == 0) {
        report.warnings.push_back("EmptyGroundTruth: no class has ground truth; mAP and AP50 reported as 0");
    } else {
        report.map = sum_map / static_cast<double>(scored);
        report.ap50 = sum_ap50 / static_cast<double>(scored);
    }
    if (!t50) {
        report.warnings.push_back("IoU 0.5 is not among the thresholds; AP50 reported as 0");
    }
    for (const auto& cls : report.classes) {
        if (!cls.scored) {
            report.warnings.push_back("category " + std::to_string(cls.category) +
                                      " has detections but no ground truth; excluded from the mean");
        }
    }
    return report;
}

}  // namespace evdet

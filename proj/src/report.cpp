#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "evdet/deteval.hpp"

namespace evdet {

namespace {

std::string threshold_key(double thr) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", thr);
    return buf;
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
    using nlohmann::ordered_json;
    ordered_json root;
    root["ap50"] = report.ap50;
    root["map"] = report.map;
    root["iou_thresholds"] = report.iou_thresholds;

    ordered_json per_class = ordered_json::object();
    ordered_json curves = ordered_json::object();
    for (const auto& cls : report.classes) {
        const std::string key = std::to_string(cls.category);
        ordered_json entry;
        entry["num_gt"] = cls.num_gt;
        entry["num_det"] = cls.num_det;
        entry["scored"] = cls.scored;
        entry["ap50"] = cls.ap50;
        entry["map"] = cls.map;
        ordered_json ap = ordered_json::object();
        ordered_json cls_curves = ordered_json::object();
        for (std::size_t t = 0; t < report.iou_thresholds.size(); ++t) {
            const std::string tk = threshold_key(report.iou_thresholds[t]);
            ap[tk] = cls.ap[t];
            cls_curves[tk] = cls.curves[t].precision;
        }
        entry["ap"] = std::move(ap);
        per_class[key] = std::move(entry);
        curves[key] = std::move(cls_curves);
    }
    root["per_class"] = std::move(per_class);
    root["pr_curves"] = std::move(curves);
    root["warnings"] = report.warnings;
    return root.dump(2) + "\n";
}

std::string report_to_table(const EvalReport& report, const std::string& input_label) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-12s %-10s %8s %8s %8s %8s\n", "Input", "Class", "GT", "Det", "mAP", "AP 50");
    out << line;
    out << std::string(60, '-') << '\n';
    for (const auto& cls : report.classes) {
        const std::string map = cls.scored ? fixed3(cls.map) : "-";
        const std::string ap50 = cls.scored ? fixed3(cls.ap50) : "-";
        std::snprintf(line, sizeof line, "%-12s %-10d %8zu %8zu %8s %8s\n", input_label.c_str(), cls.category,
                      cls.num_gt, cls.num_det, map.c_str(), ap50.c_str());
        out << line;
    }
    out << std::string(60, '-') << '\n';
    std::snprintf(line, sizeof line, "%-12s %-10s %8s %8s %8s %8s\n", input_label.c_str(), "all", "", "",
                  fixed3(report.map).c_str(), fixed3(report.ap50).c_str());
    out << line;
    return out.str();
}

}  // namespace evdet

#include "multifit/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "multifit/geometry.hpp"

namespace multifit {

void fill_instances(RunReport& report, const FitResult& result,
                    std::span<const Correspondence> correspondences,
                    std::span<const int> labels) {
    report.instances.clear();
    report.removed_counts = result.removed_counts;
    report.exhausted_early = result.exhausted_early;
    report.hypotheses_generated = result.hypotheses_generated;
    report.degenerate_subsets = result.degenerate_subsets;
    report.iterations_per_structure = result.iterations_per_structure;
    report.num_matches = static_cast<int>(correspondences.size());

    std::map<int, std::vector<int>> gt_structures;
    if (!labels.empty()) {
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] > 0) gt_structures[labels[i]].push_back(static_cast<int>(i));
        }
    }

    for (const Hypothesis& h : result.instances) {
        InstanceReport inst;
        inst.model = h.params.m;
        inst.inlier_count = static_cast<int>(h.inlier_set.size());

        if (!gt_structures.empty()) {
            int best_structure = 0;
            std::size_t best_overlap = 0;
            for (const auto& [k, indices] : gt_structures) {
                std::size_t overlap = 0;
                for (const int idx : indices) {
                    if (std::binary_search(h.inlier_set.begin(), h.inlier_set.end(), idx)) {
                        ++overlap;
                    }
                }
                if (overlap > best_overlap) {
                    best_overlap = overlap;
                    best_structure = k;
                }
            }
            if (best_structure > 0) {
                const std::vector<int>& indices = gt_structures[best_structure];
                double sum = 0.0;
                for (const int idx : indices) {
                    sum += sampson_residual(h.params, h.kind, correspondences[idx]);
                }
                inst.matched_structure = best_structure;
                inst.mean_sampson_gt = sum / static_cast<double>(indices.size());
                inst.recall_gt =
                    static_cast<double>(best_overlap) / static_cast<double>(indices.size());
            }
        }
        report.instances.push_back(std::move(inst));
    }
}

nlohmann::ordered_json report_to_json(const RunReport& report, bool include_timings) {
    nlohmann::ordered_json j;
    j["format_version"] = kReportFormatVersion;
    j["method"] = report.method;
    j["model"] = report.model;
    j["dataset"] = report.dataset;

    nlohmann::ordered_json params;
    params["inlier_scale"] = report.inlier_scale;
    params["num_structures"] = report.num_structures;
    if (report.method == "sdf") {
        params["superpixels"] = report.superpixels;
        params["compactness"] = report.compactness;
        params["m0"] = report.m0;
        params["grouping_view"] = report.grouping_view;
    } else {
        if (report.seed) params["seed"] = *report.seed;
        if (report.confidence) params["confidence"] = *report.confidence;
        if (report.max_iters) params["max_iters"] = *report.max_iters;
    }
    j["params"] = params;

    j["num_matches"] = report.num_matches;
    j["instances"] = nlohmann::ordered_json::array();
    for (const InstanceReport& inst : report.instances) {
        nlohmann::ordered_json ji;
        ji["model"] = nlohmann::ordered_json::array();
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) ji["model"].push_back(inst.model(r, c));
        }
        ji["inlier_count"] = inst.inlier_count;
        if (inst.matched_structure) ji["matched_structure"] = *inst.matched_structure;
        if (inst.mean_sampson_gt) ji["mean_sampson_gt"] = *inst.mean_sampson_gt;
        if (inst.recall_gt) ji["recall_gt"] = *inst.recall_gt;
        j["instances"].push_back(std::move(ji));
    }
    j["removed_counts"] = report.removed_counts;
    j["exhausted_early"] = report.exhausted_early;
    j["hypotheses_generated"] = report.hypotheses_generated;
    j["degenerate_subsets"] = report.degenerate_subsets;
    j["iterations_per_structure"] = report.iterations_per_structure;

    if (include_timings) {
        nlohmann::ordered_json jt;
        jt["slic_ms"] = report.timings.slic_ms;
        jt["grouping_ms"] = report.timings.grouping_ms;
        jt["hypotheses_ms"] = report.timings.hypotheses_ms;
        jt["selection_ms"] = report.timings.selection_ms;
        jt["total_ms"] = report.total_ms;
        j["timings"] = jt;
    }
    return j;
}

std::string report_csv_header() {
    return "method,model,dataset,num_matches,num_instances,inlier_counts,"
           "mean_sampson_gt,exhausted_early,seed,total_ms";
}

std::string report_csv_row(const RunReport& report) {
    std::ostringstream os;
    os << report.method << ',' << report.model << ',' << report.dataset << ','
       << report.num_matches << ',' << report.instances.size() << ',';
    for (std::size_t i = 0; i < report.instances.size(); ++i) {
        if (i) os << ';';
        os << report.instances[i].inlier_count;
    }
    os << ',';
    double sum = 0.0;
    int n = 0;
    for (const InstanceReport& inst : report.instances) {
        if (inst.mean_sampson_gt) {
            sum += *inst.mean_sampson_gt;
            ++n;
        }
    }
    if (n > 0) os << sum / n;
    os << ',' << (report.exhausted_early ? 1 : 0) << ',';
    if (report.seed) os << *report.seed;
    os << ',' << report.total_ms;
    return os.str();
}

}  // namespace multifit

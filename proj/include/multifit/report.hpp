#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "multifit/pipeline.hpp"
#include "multifit/types.hpp"

namespace multifit {

struct InstanceReport {
    Mat3 model = Mat3::Zero();  ///< canonical form
    int inlier_count = 0;
    /// Ground-truth structure with the largest inlier-set overlap (1-based)
    /// and the mean Sampson error over that structure's true inliers;
    /// present only when labels are available.
    std::optional<int> matched_structure;
    std::optional<double> mean_sampson_gt;
    std::optional<double> recall_gt;  ///< recovered fraction of the matched structure
};

/// Machine-parseable record of one fit. The JSON field set is fixed per
/// major format version; changing it is a breaking change guarded by a
/// golden-file test.
struct RunReport {
    std::string method;   ///< sdf | ransac | prosac
    std::string model;    ///< homography | fundamental
    std::string dataset;  ///< matches path or synthetic scene tag

    double inlier_scale = 0.0;
    int num_structures = 1;
    int superpixels = 0;        ///< 0 for baselines
    double compactness = 0.0;   ///< 0 for baselines
    int m0 = 0;                 ///< 0 for baselines
    std::string grouping_view;  ///< empty for baselines
    std::optional<std::uint64_t> seed;  ///< baselines only; sdf carries no RNG state
    std::optional<double> confidence;
    std::optional<int> max_iters;

    int num_matches = 0;
    std::vector<InstanceReport> instances;
    std::vector<int> removed_counts;
    bool exhausted_early = false;
    int hypotheses_generated = 0;
    int degenerate_subsets = 0;
    std::vector<int> iterations_per_structure;

    StageTimings timings;
    double total_ms = 0.0;
};

inline constexpr int kReportFormatVersion = 1;

/// Builds the per-instance part of a report from a fit result, matching
/// instances to ground-truth structures when labels are provided.
void fill_instances(RunReport& report, const FitResult& result,
                    std::span<const Correspondence> correspondences,
                    std::span<const int> labels);  // labels may be empty

/// Serialization. `include_timings=false` drops every wall-clock field,
/// which is what determinism comparisons use.
nlohmann::ordered_json report_to_json(const RunReport& report, bool include_timings = true);

std::string report_csv_header();
std::string report_csv_row(const RunReport& report);

}  // namespace multifit

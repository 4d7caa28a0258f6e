#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "multifit/geometry.hpp"
#include "multifit/grouping.hpp"
#include "multifit/image.hpp"
#include "multifit/slic.hpp"
#include "multifit/types.hpp"

namespace multifit {

enum class GroupingView {
    Both,   ///< groups from both views' segmentations, view 1 first
    View1,
    View2,
};

const char* grouping_view_name(GroupingView v);

struct FitConfig {
    ModelKind kind = ModelKind::Homography;
    double inlier_scale = 2.0;  ///< Sampson threshold in pixels
    int num_structures = 1;     ///< T
    int num_superpixels = 150;  ///< M
    double compactness = 10.0;
    int max_slic_iters = 10;
    int m0 = 0;  ///< sampled subset size; 0 selects the default p + 2
    GroupingView grouping_view = GroupingView::Both;
    double degeneracy_tol = kDefaultDegeneracyTol;
    /// Optional least-squares refit of each selected model on its inlier
    /// set. Off by default: the selected hypotheses are reported as fitted.
    bool polish = false;

    int subset_size() const {
        return m0 > 0 ? m0 : minimal_sample_size(kind) + 2;
    }
};

struct Hypothesis {
    ModelParams params;
    ModelKind kind = ModelKind::Homography;
    std::vector<int> sampled_subset;  ///< correspondence indices, rank order
    std::vector<int> inlier_set;      ///< correspondence indices, ascending
    int gen_index = 0;                ///< position in generation order
};

struct StageTimings {
    double slic_ms = 0.0;
    double grouping_ms = 0.0;
    double hypotheses_ms = 0.0;
    double selection_ms = 0.0;

    double total_ms() const { return slic_ms + grouping_ms + hypotheses_ms + selection_ms; }
};

struct FitResult {
    std::vector<Hypothesis> instances;  ///< selected models, selection order
    /// Redundant hypotheses removed in each selection iteration (the
    /// selected hypothesis itself is not counted).
    std::vector<int> removed_counts;
    bool exhausted_early = false;  ///< hypotheses ran out before T selections
    StageTimings timings;
    int hypotheses_generated = 0;
    int degenerate_subsets = 0;  ///< subsets skipped by the solver
    /// Iterations spent per structure; filled by the sampling baselines,
    /// empty for the deterministic pipeline.
    std::vector<int> iterations_per_structure;
};

/// Computes a hypothesis's inlier set: ascending indices of correspondences
/// with Sampson residual <= scale (the +inf sentinel never qualifies).
std::vector<int> inlier_set(const ModelParams& model, ModelKind kind,
                            std::span<const Correspondence> correspondences, double scale);

/// Hypothesis generation over combined group sets: each group with at least
/// p members contributes one hypothesis fitted to its min(m0, size)
/// top-scored members. Degenerate subsets are skipped and counted. Throws
/// NoHypothesesError (with a group-size histogram) when nothing survives.
std::vector<Hypothesis> generate_hypotheses(std::span<const GroupSet> groupsets,
                                            std::span<const Correspondence> correspondences,
                                            const FitConfig& cfg,
                                            int* degenerate_subsets = nullptr);

/// Largest-inlier-set hypothesis; ties go to the lowest gen_index.
const Hypothesis& select_single(std::span<const Hypothesis> hypotheses);

/// 1 iff the candidate's sampled subset intersects the selected
/// hypothesis's inlier set.
bool is_redundant(const Hypothesis& selected, const Hypothesis& candidate);

/// Up to T rounds of select-and-remove over a fixed hypothesis set: pick the
/// max-inlier survivor, then drop it and every survivor whose sampled subset
/// intersects its inlier set. Inlier sets are never recomputed and no new
/// hypotheses are generated between rounds.
FitResult select_models(std::span<const Hypothesis> hypotheses, const FitConfig& cfg);

/// The complete deterministic fit: SLIC segmentation, superpixel grouping,
/// group combination, hypothesis generation, and model selection.
FitResult sdf_fit(const Image& image1, const Image& image2,
                  std::span<const Correspondence> correspondences, const FitConfig& cfg);

}  // namespace multifit

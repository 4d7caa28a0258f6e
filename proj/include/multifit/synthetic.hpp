#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "multifit/image.hpp"
#include "multifit/pipeline.hpp"
#include "multifit/slic.hpp"
#include "multifit/types.hpp"

namespace multifit {

/// One ground-truth structure: its true model, how many inliers to draw,
/// and the view-1 region they occupy.
struct StructureSpec {
    ModelParams model;
    int inlier_count = 0;
    Box region;
};

struct SceneSpec {
    ModelKind kind = ModelKind::Homography;
    std::vector<StructureSpec> structures;
    int outlier_count = 0;
    double noise_sigma = 0.0;  ///< pixels, applied in both views
    int image_width = 640;
    int image_height = 480;
    /// Correlation between matching score and inlierhood:
    /// score = clamp(rho * inlier_indicator + (1 - rho) * uniform, 0, 1).
    double score_correlation = 0.8;
    std::uint64_t seed = 0;
};

struct LabeledScene {
    std::vector<Correspondence> correspondences;
    /// Ground-truth label per correspondence: 0 = outlier, k >= 1 = structure k.
    std::vector<int> labels;
    std::vector<ModelParams> true_models;
    RgbImage rgb1, rgb2;
    Image image1, image2;  ///< CIELAB views of rgb1/rgb2
    std::vector<std::string> warnings;

    /// Indices carrying label k, ascending.
    std::vector<int> structure_indices(int k) const;
};

/// Seed-deterministic scene synthesis. Inliers of structure k are drawn
/// uniformly in its region, mapped by the true model, and perturbed by
/// Gaussian noise in both views (redrawn until the Sampson residual under
/// the true model stays within 3 sigma). Outliers are uniform over both
/// images. The rendered image pair gives each structure region a distinct
/// flat texture so segment boundaries roughly follow structures.
LabeledScene generate_scene(const SceneSpec& spec);

/// F = K2^-T [t]x R K1^-1, canonicalized; the standard two-camera
/// construction used to build consistent fundamental-matrix scenes.
ModelParams fundamental_from_cameras(const Mat3& k1, const Mat3& r, const Eigen::Vector3d& t,
                                     const Mat3& k2);

/// Brute-force inlier counter evaluating the Sampson formulas with its own
/// scalar arithmetic; kept independent of geometry::sampson_residual so the
/// two paths can cross-check each other.
int oracle_inlier_count(const ModelParams& model, ModelKind kind,
                        std::span<const Correspondence> correspondences, double scale);

/// Trace of a reference selection run.
struct SelectionTrace {
    std::vector<int> selected;              ///< gen_index per iteration
    std::vector<std::vector<int>> removed;  ///< redundant gen_indices per iteration
    bool exhausted_early = false;
};

/// Literal, unoptimized simulation of the select-and-remove loop for
/// equivalence testing against select_models. Throws NoHypothesesError on
/// an empty input.
SelectionTrace oracle_select(std::span<const Hypothesis> hypotheses, int num_structures);

}  // namespace multifit

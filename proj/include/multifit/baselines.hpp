#pragma once

#include <cstdint>
#include <span>

#include "multifit/pipeline.hpp"
#include "multifit/types.hpp"

namespace multifit {

struct BaselineConfig {
    ModelKind kind = ModelKind::Homography;
    double inlier_scale = 2.0;
    double confidence = 0.99;  ///< in (0, 1)
    int max_iters = 10000;
    std::uint64_t rng_seed = 0;
    int num_structures = 1;  ///< fitted by the classic fit-and-remove loop
    double degeneracy_tol = kDefaultDegeneracyTol;
    /// PROSAC's assumed total RANSAC sample budget T_N for the growth
    /// function (200000 in the original schedule).
    double prosac_t_n = 200000.0;
};

/// ceil(log(1 - confidence) / log(1 - w^p)), clamped to [1, max_iters].
int adaptive_iteration_bound(double confidence, double inlier_ratio, int sample_size,
                             int max_iters);

/// Seeded multi-structure RANSAC: per structure, the best minimal-sample
/// model by inlier count under the adaptive iteration bound; that model's
/// inliers are removed from the pool before the next structure.
FitResult ransac_fit(std::span<const Correspondence> correspondences, const BaselineConfig& cfg);

/// PROSAC: like ransac_fit but samples follow the progressive growth
/// schedule over the non-ascending score ordering of the pool.
FitResult prosac_fit(std::span<const Correspondence> correspondences, const BaselineConfig& cfg);

}  // namespace multifit

#pragma once

#include <span>
#include <utility>
#include <vector>

#include "multifit/types.hpp"

namespace multifit {

/// Relative singular-value gap below which a design matrix is treated
/// as rank deficient.
inline constexpr double kDefaultDegeneracyTol = 1e-10;

/// Hartley normalization: translates the centroid to the origin and
/// scales so the mean distance from the origin is sqrt(2). Returns the
/// transformed points and the 3x3 similarity that maps originals to them.
/// Throws DegeneracyError when the points have zero spread.
std::pair<std::vector<Point2>, Mat3> normalize_points(std::span<const Point2> points);

/// Least-squares DLT homography over >= 4 correspondences, solved on
/// Hartley-normalized coordinates. Throws DegeneracyError when the
/// design matrix is rank deficient (e.g. collinear points).
ModelParams fit_homography(std::span<const Correspondence> subset,
                           double degeneracy_tol = kDefaultDegeneracyTol);

/// Normalized eight-point fundamental matrix over >= 8 correspondences
/// with rank-2 enforcement. Throws DegeneracyError on rank-deficient input.
ModelParams fit_fundamental(std::span<const Correspondence> subset,
                            double degeneracy_tol = kDefaultDegeneracyTol);

/// Dispatches to fit_homography or fit_fundamental.
ModelParams fit_model(ModelKind kind, std::span<const Correspondence> subset,
                      double degeneracy_tol = kDefaultDegeneracyTol);

/// First-order (Sampson) geometric distance of a correspondence to the
/// model manifold, in pixels. Returns +inf when the constraint gradient
/// is numerically zero (e.g. a point at an epipole); such correspondences
/// never count as inliers.
double sampson_residual(const ModelParams& model, ModelKind kind, const Correspondence& c);

}  // namespace multifit

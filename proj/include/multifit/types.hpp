#pragma once

#include <Eigen/Core>

namespace multifit {

using Mat3 = Eigen::Matrix3d;

/// Image-plane point in pixel coordinates.
struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// A matched feature pair across two views plus its matching score.
struct Correspondence {
    Point2 p1;           ///< feature location in view 1
    Point2 p2;           ///< feature location in view 2
    double score = 0.0;  ///< matching score, finite and >= 0
};

enum class ModelKind {
    Homography,
    FundamentalMatrix,
};

/// Minimal subset size p: 4 point pairs for a homography, 8 for a
/// fundamental matrix.
constexpr int minimal_sample_size(ModelKind kind) {
    return kind == ModelKind::Homography ? 4 : 8;
}

const char* model_kind_name(ModelKind kind);

/// 3x3 model matrix (H or F) stored in canonical form: unit Frobenius
/// norm with the first nonzero entry in row-major order positive.
struct ModelParams {
    Mat3 m = Mat3::Zero();
};

/// Rescales to unit Frobenius norm and fixes the sign convention.
/// Applying it twice returns bit-identical output.
ModelParams canonicalize(const Mat3& m);

}  // namespace multifit

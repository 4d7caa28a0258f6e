#include "multifit/geometry.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "multifit/errors.hpp"

namespace multifit {

namespace {

Eigen::Vector3d to_homogeneous(const Point2& p) {
    return {p.x, p.y, 1.0};
}

/// Solves A h = 0 for the 9-vector h with the smallest algebraic residual.
/// The second-smallest singular value of A must stay above
/// degeneracy_tol relative to the largest one, otherwise the model is not
/// uniquely determined.
Eigen::Matrix<double, 9, 1> solve_nullspace(const Eigen::MatrixXd& design, double degeneracy_tol) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // With 8 rows there are 8 singular values and the solution lives in the
    // exact nullspace; with >= 9 rows the 9th value belongs to the solution
    // direction. Either way index 7 guards rank >= 8.
    if (sv(0) <= 0.0 || !std::isfinite(sv(0)) || sv(7) < degeneracy_tol * sv(0)) {
        throw DegeneracyError("degenerate configuration: design matrix rank < 8");
    }
    return svd.matrixV().col(8);
}

}  // namespace

const char* model_kind_name(ModelKind kind) {
    return kind == ModelKind::Homography ? "homography" : "fundamental";
}

ModelParams canonicalize(const Mat3& m) {
    const double norm = m.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw DegeneracyError("cannot canonicalize a zero or non-finite matrix");
    }
    Mat3 out = m;
    // Skip the rescale when the norm is already 1 to within a few ulps so
    // that canonicalize(canonicalize(x)) is bit-identical.
    if (std::abs(norm - 1.0) > 1e-14) {
        out /= norm;
    }
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            const double v = out(r, c);
            if (v != 0.0) {
                if (v < 0.0) out = -out;
                return ModelParams{out};
            }
        }
    }
    return ModelParams{out};
}

std::pair<std::vector<Point2>, Mat3> normalize_points(std::span<const Point2> points) {
    if (points.size() < 2) {
        throw DegeneracyError("point normalization needs at least 2 distinct points");
    }
    double cx = 0.0, cy = 0.0;
    for (const Point2& p : points) {
        cx += p.x;
        cy += p.y;
    }
    cx /= static_cast<double>(points.size());
    cy /= static_cast<double>(points.size());

    double mean_dist = 0.0;
    for (const Point2& p : points) {
        mean_dist += std::hypot(p.x - cx, p.y - cy);
    }
    mean_dist /= static_cast<double>(points.size());
    if (!(mean_dist > 0.0)) {
        throw DegeneracyError("point normalization: all points are identical");
    }

    const double s = std::sqrt(2.0) / mean_dist;
    Mat3 transform;
    transform << s, 0.0, -s * cx,
                 0.0, s, -s * cy,
                 0.0, 0.0, 1.0;

    std::vector<Point2> transformed;
    transformed.reserve(points.size());
    for (const Point2& p : points) {
        transformed.push_back({s * (p.x - cx), s * (p.y - cy)});
    }
    return {std::move(transformed), transform};
}

ModelParams fit_homography(std::span<const Correspondence> subset, double degeneracy_tol) {
    if (subset.size() < 4) {
        throw DegeneracyError("homography fit needs at least 4 correspondences");
    }
    std::vector<Point2> pts1, pts2;
    pts1.reserve(subset.size());
    pts2.reserve(subset.size());
    for (const Correspondence& c : subset) {
        pts1.push_back(c.p1);
        pts2.push_back(c.p2);
    }
    auto [n1, t1] = normalize_points(pts1);
    auto [n2, t2] = normalize_points(pts2);

    Eigen::MatrixXd design(2 * subset.size(), 9);
    for (std::size_t i = 0; i < subset.size(); ++i) {
        const double x1 = n1[i].x, y1 = n1[i].y;
        const double x2 = n2[i].x, y2 = n2[i].y;
        design.row(2 * i) << 0.0, 0.0, 0.0, -x1, -y1, -1.0, y2 * x1, y2 * y1, y2;
        design.row(2 * i + 1) << x1, y1, 1.0, 0.0, 0.0, 0.0, -x2 * x1, -x2 * y1, -x2;
    }

    const Eigen::Matrix<double, 9, 1> h = solve_nullspace(design, degeneracy_tol);
    Mat3 hn;
    hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
    const Mat3 model = t2.inverse() * hn * t1;
    return canonicalize(model);
}

ModelParams fit_fundamental(std::span<const Correspondence> subset, double degeneracy_tol) {
    if (subset.size() < 8) {
        throw DegeneracyError("fundamental fit needs at least 8 correspondences");
    }
    std::vector<Point2> pts1, pts2;
    pts1.reserve(subset.size());
    pts2.reserve(subset.size());
    for (const Correspondence& c : subset) {
        pts1.push_back(c.p1);
        pts2.push_back(c.p2);
    }
    auto [n1, t1] = normalize_points(pts1);
    auto [n2, t2] = normalize_points(pts2);

    Eigen::MatrixXd design(subset.size(), 9);
    for (std::size_t i = 0; i < subset.size(); ++i) {
        const double x1 = n1[i].x, y1 = n1[i].y;
        const double x2 = n2[i].x, y2 = n2[i].y;
        design.row(i) << x2 * x1, x2 * y1, x2, y2 * x1, y2 * y1, y2, x1, y1, 1.0;
    }

    const Eigen::Matrix<double, 9, 1> f = solve_nullspace(design, degeneracy_tol);
    Mat3 fn;
    fn << f(0), f(1), f(2), f(3), f(4), f(5), f(6), f(7), f(8);

    // Rank-2 enforcement: zero the smallest singular value.
    Eigen::JacobiSVD<Mat3> svd(fn, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Vector3d sv = svd.singularValues();
    sv(2) = 0.0;
    fn = svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();

    const Mat3 model = t2.transpose() * fn * t1;
    return canonicalize(model);
}

ModelParams fit_model(ModelKind kind, std::span<const Correspondence> subset, double degeneracy_tol) {
    return kind == ModelKind::Homography ? fit_homography(subset, degeneracy_tol)
                                         : fit_fundamental(subset, degeneracy_tol);
}

namespace {

double sampson_fundamental(const Mat3& f, const Correspondence& c) {
    const Eigen::Vector3d x1 = to_homogeneous(c.p1);
    const Eigen::Vector3d x2 = to_homogeneous(c.p2);
    const Eigen::Vector3d fx1 = f * x1;
    const Eigen::Vector3d ftx2 = f.transpose() * x2;
    const double num = x2.dot(fx1);
    const double grad2 = fx1(0) * fx1(0) + fx1(1) * fx1(1) + ftx2(0) * ftx2(0) + ftx2(1) * ftx2(1);
    if (!(grad2 > 1e-24) || !std::isfinite(grad2)) {
        return std::numeric_limits<double>::infinity();
    }
    return std::abs(num) / std::sqrt(grad2);
}

/// Sampson approximation of the homography transfer error: first-order
/// distance in (x1, y1, x2, y2) space to the zero set of the two DLT
/// constraint rows.
double sampson_homography(const Mat3& h, const Correspondence& c) {
    const double x1 = c.p1.x, y1 = c.p1.y;
    const double x2 = c.p2.x, y2 = c.p2.y;
    const double u = h(0, 0) * x1 + h(0, 1) * y1 + h(0, 2);
    const double v = h(1, 0) * x1 + h(1, 1) * y1 + h(1, 2);
    const double w = h(2, 0) * x1 + h(2, 1) * y1 + h(2, 2);

    const double e1 = -v + y2 * w;
    const double e2 = u - x2 * w;

    // J = d(e1,e2)/d(x1,y1,x2,y2)
    const double j11 = -h(1, 0) + y2 * h(2, 0);
    const double j12 = -h(1, 1) + y2 * h(2, 1);
    const double j14 = w;
    const double j21 = h(0, 0) - x2 * h(2, 0);
    const double j22 = h(0, 1) - x2 * h(2, 1);
    const double j23 = -w;

    const double a = j11 * j11 + j12 * j12 + j14 * j14;
    const double b = j11 * j21 + j12 * j22;
    const double d = j21 * j21 + j22 * j22 + j23 * j23;
    const double det = a * d - b * b;
    if (!(det > 1e-24) || !std::isfinite(det)) {
        return std::numeric_limits<double>::infinity();
    }
    const double dist2 = (e1 * e1 * d - 2.0 * e1 * e2 * b + e2 * e2 * a) / det;
    return std::sqrt(std::max(dist2, 0.0));
}

}  // namespace

double sampson_residual(const ModelParams& model, ModelKind kind, const Correspondence& c) {
    return kind == ModelKind::Homography ? sampson_homography(model.m, c)
                                         : sampson_fundamental(model.m, c);
}

}  // namespace multifit

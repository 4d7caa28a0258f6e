#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "multifit/geometry.hpp"
#include "multifit/random.hpp"
#include "multifit/types.hpp"

namespace multifit::testing {

inline Mat3 similarity(double scale, double angle_rad, double tx, double ty) {
    Mat3 h;
    h << scale * std::cos(angle_rad), -scale * std::sin(angle_rad), tx,
         scale * std::sin(angle_rad), scale * std::cos(angle_rad), ty,
         0.0, 0.0, 1.0;
    return h;
}

inline Point2 map_h(const Mat3& h, const Point2& p) {
    const Eigen::Vector3d q = h * Eigen::Vector3d(p.x, p.y, 1.0);
    return {q(0) / q(2), q(1) / q(2)};
}

/// Exact correspondences under a homography, view-1 points uniform in a box.
inline std::vector<Correspondence> h_correspondences(const Mat3& h, int count, Rng& rng,
                                                     double x0 = 0, double y0 = 0,
                                                     double x1 = 500, double y1 = 400) {
    std::vector<Correspondence> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        const Point2 p1{uniform_range(rng, x0, x1), uniform_range(rng, y0, y1)};
        out.push_back({p1, map_h(h, p1), 1.0});
    }
    return out;
}

/// A well-conditioned rank-2 fundamental matrix from a plausible camera pair.
inline Mat3 sample_fundamental(Rng& rng) {
    Mat3 k;
    k << 520.0, 0.0, 320.0,
         0.0, 520.0, 240.0,
         0.0, 0.0, 1.0;
    const double a = uniform_range(rng, -0.08, 0.08);
    const double b = uniform_range(rng, -0.08, 0.08);
    Mat3 ry, rx;
    ry << std::cos(a), 0.0, std::sin(a), 0.0, 1.0, 0.0, -std::sin(a), 0.0, std::cos(a);
    rx << 1.0, 0.0, 0.0, 0.0, std::cos(b), -std::sin(b), 0.0, std::sin(b), std::cos(b);
    const Eigen::Vector3d t(uniform_range(rng, 0.2, 0.6), uniform_range(rng, -0.1, 0.1),
                            uniform_range(rng, -0.05, 0.05));
    Mat3 tx;
    tx << 0.0, -t(2), t(1), t(2), 0.0, -t(0), -t(1), t(0), 0.0;
    return k.inverse().transpose() * tx * (ry * rx) * k.inverse();
}

/// Exact correspondences satisfying x2' F x1 = 0: x1 is drawn in a box and
/// x2 is put directly on its epipolar line.
inline std::vector<Correspondence> f_correspondences(const Mat3& f, int count, Rng& rng,
                                                     double x0 = 0, double y0 = 0,
                                                     double x1 = 640, double y1 = 480) {
    std::vector<Correspondence> out;
    while (static_cast<int>(out.size()) < count) {
        const Point2 p1{uniform_range(rng, x0, x1), uniform_range(rng, y0, y1)};
        const Eigen::Vector3d line = f * Eigen::Vector3d(p1.x, p1.y, 1.0);
        if (std::abs(line(1)) < 1e-8) continue;
        const double sx = uniform_range(rng, 0.0, 640.0);
        const double sy = -(line(0) * sx + line(2)) / line(1);
        if (!std::isfinite(sy) || std::abs(sy) > 5000.0) continue;
        out.push_back({p1, {sx, sy}, 1.0});
    }
    return out;
}

inline double max_abs_diff(const Mat3& a, const Mat3& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace multifit::testing

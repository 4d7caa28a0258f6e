#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "multifit/errors.hpp"
#include "multifit/geometry.hpp"
#include "multifit/random.hpp"

using namespace multifit;
using namespace multifit::testing;

namespace {

/// Sampson distance for a homography rebuilt from scratch with a
/// finite-difference Jacobian of the two DLT constraint rows.
double sampson_h_finite_difference(const Mat3& h, const Correspondence& c) {
    auto error_vec = [&](double x1, double y1, double x2, double y2, double* e) {
        const double u = h(0, 0) * x1 + h(0, 1) * y1 + h(0, 2);
        const double v = h(1, 0) * x1 + h(1, 1) * y1 + h(1, 2);
        const double w = h(2, 0) * x1 + h(2, 1) * y1 + h(2, 2);
        e[0] = -v + y2 * w;
        e[1] = u - x2 * w;
    };
    double e[2];
    error_vec(c.p1.x, c.p1.y, c.p2.x, c.p2.y, e);

    const double step = 1e-5;
    double jac[2][4];
    const double base[4] = {c.p1.x, c.p1.y, c.p2.x, c.p2.y};
    for (int k = 0; k < 4; ++k) {
        double lo[4], hi[4];
        for (int i = 0; i < 4; ++i) lo[i] = hi[i] = base[i];
        lo[k] -= step;
        hi[k] += step;
        double el[2], eh[2];
        error_vec(lo[0], lo[1], lo[2], lo[3], el);
        error_vec(hi[0], hi[1], hi[2], hi[3], eh);
        jac[0][k] = (eh[0] - el[0]) / (2.0 * step);
        jac[1][k] = (eh[1] - el[1]) / (2.0 * step);
    }
    double a = 0, b = 0, d = 0;
    for (int k = 0; k < 4; ++k) {
        a += jac[0][k] * jac[0][k];
        b += jac[0][k] * jac[1][k];
        d += jac[1][k] * jac[1][k];
    }
    const double det = a * d - b * b;
    REQUIRE(det > 0.0);
    return std::sqrt((e[0] * e[0] * d - 2.0 * e[0] * e[1] * b + e[1] * e[1] * a) / det);
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("normalize_points centers and scales a symmetric square") {
    const std::vector<Point2> pts{{0, 0}, {2, 0}, {0, 2}, {2, 2}};
    const auto [normed, transform] = normalize_points(pts);

    double cx = 0, cy = 0, mean_dist = 0;
    for (const Point2& p : normed) {
        cx += p.x;
        cy += p.y;
        mean_dist += std::hypot(p.x, p.y);
    }
    cx /= 4;
    cy /= 4;
    mean_dist /= 4;
    CHECK(std::abs(cx) < 1e-12);
    CHECK(std::abs(cy) < 1e-12);
    CHECK(mean_dist == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Eigen::Vector3d mapped = transform * Eigen::Vector3d(pts[i].x, pts[i].y, 1.0);
        CHECK(std::abs(mapped(0) - normed[i].x) < 1e-12);
        CHECK(std::abs(mapped(1) - normed[i].y) < 1e-12);
    }
}

TEST_CASE("normalize_points rejects zero spread") {
    const std::vector<Point2> pts{{3, 4}, {3, 4}, {3, 4}, {3, 4}};
    CHECK_THROWS_AS(normalize_points(pts), DegeneracyError);
}

TEST_CASE("normalize_points postconditions on a random cloud") {
    Rng rng(11);
    std::vector<Point2> pts;
    for (int i = 0; i < 10; ++i) {
        pts.push_back({uniform_range(rng, -40, 900), uniform_range(rng, 13, 600)});
    }
    const auto [normed, transform] = normalize_points(pts);
    double cx = 0, cy = 0, mean_dist = 0;
    for (const Point2& p : normed) {
        cx += p.x;
        cy += p.y;
        mean_dist += std::hypot(p.x, p.y);
    }
    CHECK(std::abs(cx / 10) < 1e-12);
    CHECK(std::abs(cy / 10) < 1e-12);
    CHECK(std::abs(mean_dist / 10 - std::sqrt(2.0)) < 1e-12);
    (void)transform;
}

TEST_CASE("canonicalize is bit-exactly idempotent") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        Mat3 m;
        for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = uniform_range(rng, -10, 10);
        const ModelParams once = canonicalize(m);
        const ModelParams twice = canonicalize(once.m);
        for (int i = 0; i < 9; ++i) {
            CHECK(once.m(i / 3, i % 3) == twice.m(i / 3, i % 3));
        }
        CHECK(std::abs(once.m.norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("fit_homography on identity points returns identity / sqrt(3)") {
    const std::vector<Correspondence> subset{
        {{0, 0}, {0, 0}, 1},
        {{100, 0}, {100, 0}, 1},
        {{0, 100}, {0, 100}, 1},
        {{100, 100}, {100, 100}, 1},
    };
    const ModelParams h = fit_homography(subset);
    const Mat3 expected = Mat3::Identity() / std::sqrt(3.0);
    CHECK(max_abs_diff(h.m, expected) < 1e-9);
}

TEST_CASE("fit_homography recovers a known similarity from 6 points") {
    const Mat3 truth = similarity(2.0, 0.0, 5.0, -3.0);
    Rng rng(17);
    const auto subset = h_correspondences(truth, 6, rng);
    const ModelParams fitted = fit_homography(subset);
    const ModelParams canon_truth = canonicalize(truth);
    CHECK(max_abs_diff(fitted.m, canon_truth.m) < 1e-9);
}

TEST_CASE("fit_homography rejects 3 collinear view-1 points") {
    const Mat3 h = similarity(1.4, 0.35, 12.0, -6.0);
    std::vector<Correspondence> subset;
    for (const Point2 p : {Point2{0, 0}, Point2{50, 0}, Point2{100, 0}, Point2{100, 100}}) {
        subset.push_back({p, map_h(h, p), 1.0});
    }
    CHECK_THROWS_AS(fit_homography(subset), DegeneracyError);
}

TEST_CASE("fit_fundamental recovers a constructed rank-2 F") {
    Rng rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        const Mat3 truth = sample_fundamental(rng);
        const ModelParams canon_truth = canonicalize(truth);

        const auto subset8 = f_correspondences(truth, 8, rng);
        const ModelParams fit8 = fit_fundamental(subset8);
        CHECK(max_abs_diff(fit8.m, canon_truth.m) < 1e-8);

        // Over-determined consistency.
        const auto subset10 = f_correspondences(truth, 10, rng);
        const ModelParams fit10 = fit_fundamental(subset10);
        CHECK(max_abs_diff(fit10.m, canon_truth.m) < 1e-8);
    }
}

TEST_CASE("fit_fundamental rejects identical view-1 points") {
    std::vector<Correspondence> subset;
    Rng rng(3);
    for (int i = 0; i < 8; ++i) {
        subset.push_back({{7, 9}, {uniform_range(rng, 0, 100), uniform_range(rng, 0, 100)}, 1});
    }
    CHECK_THROWS_AS(fit_fundamental(subset), DegeneracyError);
}

TEST_CASE("fundamental outputs are rank 2") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const Mat3 truth = sample_fundamental(rng);
        const auto subset = f_correspondences(truth, 12, rng);
        const ModelParams fitted = fit_fundamental(subset);
        CHECK(std::abs(fitted.m.determinant()) < 1e-9);
    }
}

TEST_CASE("sampson residual of an exact homography fit is zero") {
    const ModelParams identity = canonicalize(Mat3::Identity());
    const Correspondence c{{3, 7}, {3, 7}, 1};
    CHECK(sampson_residual(identity, ModelKind::Homography, c) == 0.0);
}

TEST_CASE("sampson residual is zero on the epipolar line") {
    Rng rng(41);
    const Mat3 f = sample_fundamental(rng);
    const ModelParams canon = canonicalize(f);
    const auto pts = f_correspondences(canon.m, 20, rng);
    for (const Correspondence& c : pts) {
        CHECK(sampson_residual(canon, ModelKind::FundamentalMatrix, c) < 1e-10);
    }
}

TEST_CASE("homography sampson matches a finite-difference oracle") {
    Rng rng(43);
    const Mat3 truth = similarity(1.3, 0.2, 12.0, -4.0);
    const ModelParams canon = canonicalize(truth);
    for (int trial = 0; trial < 50; ++trial) {
        Correspondence c = h_correspondences(truth, 1, rng)[0];
        c.p2.x += uniform_range(rng, -5, 5);
        c.p2.y += uniform_range(rng, -5, 5);
        const double expected = sampson_h_finite_difference(canon.m, c);
        const double actual = sampson_residual(canon, ModelKind::Homography, c);
        if (expected > 1e-9) {
            CHECK(std::abs(actual - expected) / expected < 1e-6);
        }
    }
}

TEST_CASE("sampson residual returns the +inf sentinel at an epipole") {
    Rng rng(47);
    const Mat3 f = sample_fundamental(rng);
    const ModelParams canon = canonicalize(f);
    // The right epipole: F e1 = 0, so both line gradients vanish when the
    // left point sits on e1 and the right on e2.
    Eigen::JacobiSVD<Mat3> svd(canon.m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Vector3d e1 = svd.matrixV().col(2);
    Eigen::Vector3d e2 = svd.matrixU().col(2);
    e1 /= e1(2);
    e2 /= e2(2);
    const Correspondence c{{e1(0), e1(1)}, {e2(0), e2(1)}, 1};
    const double r = sampson_residual(canon, ModelKind::FundamentalMatrix, c);
    CHECK(std::isinf(r));
}

TEST_CASE("scale invariance of fitted models") {
    Rng rng(53);
    const double k = 3.7;

    SUBCASE("homography") {
        const Mat3 truth = similarity(1.2, 0.1, 8.0, 2.0);
        auto pts = h_correspondences(truth, 12, rng);
        for (auto& c : pts) {
            c.p2.x += uniform_range(rng, -1, 1);
            c.p2.y += uniform_range(rng, -1, 1);
        }
        auto scaled = pts;
        for (auto& c : scaled) {
            c.p1.x *= k;
            c.p1.y *= k;
            c.p2.x *= k;
            c.p2.y *= k;
        }
        const ModelParams base = fit_homography(pts);
        const ModelParams big = fit_homography(scaled);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double r0 = sampson_residual(base, ModelKind::Homography, pts[i]);
            const double r1 = sampson_residual(big, ModelKind::Homography, scaled[i]);
            if (r0 > 1e-9) {
                CHECK(std::abs(r1 - k * r0) / (k * r0) < 1e-6);
            }
        }
    }

    SUBCASE("fundamental") {
        const Mat3 truth = sample_fundamental(rng);
        auto pts = f_correspondences(truth, 16, rng);
        for (auto& c : pts) {
            c.p2.x += uniform_range(rng, -1, 1);
            c.p2.y += uniform_range(rng, -1, 1);
        }
        auto scaled = pts;
        for (auto& c : scaled) {
            c.p1.x *= k;
            c.p1.y *= k;
            c.p2.x *= k;
            c.p2.y *= k;
        }
        const ModelParams base = fit_fundamental(pts);
        const ModelParams big = fit_fundamental(scaled);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double r0 = sampson_residual(base, ModelKind::FundamentalMatrix, pts[i]);
            const double r1 = sampson_residual(big, ModelKind::FundamentalMatrix, scaled[i]);
            if (r0 > 1e-9) {
                CHECK(std::abs(r1 - k * r0) / (k * r0) < 1e-6);
            }
        }
    }
}

TEST_CASE("noiseless recovery keeps residuals at numerical zero") {
    Rng rng(59);
    for (int trial = 0; trial < 20; ++trial) {
        const Mat3 h = similarity(uniform_range(rng, 0.5, 2.0), uniform_range(rng, -0.5, 0.5),
                                  uniform_range(rng, -30, 30), uniform_range(rng, -30, 30));
        const auto pts = h_correspondences(h, 8, rng);
        const ModelParams fitted = fit_homography(pts);
        for (const Correspondence& c : pts) {
            CHECK(sampson_residual(fitted, ModelKind::Homography, c) <= 1e-7);
        }

        const Mat3 f = sample_fundamental(rng);
        const auto fpts = f_correspondences(f, 10, rng);
        const ModelParams ffitted = fit_fundamental(fpts);
        for (const Correspondence& c : fpts) {
            CHECK(sampson_residual(ffitted, ModelKind::FundamentalMatrix, c) <= 1e-7);
        }
    }
}

TEST_CASE("fits are deterministic bit for bit") {
    Rng rng(61);
    const Mat3 truth = similarity(1.1, 0.3, 4.0, 9.0);
    auto pts = h_correspondences(truth, 10, rng);
    for (auto& c : pts) {
        c.p2.x += uniform_range(rng, -2, 2);
        c.p2.y += uniform_range(rng, -2, 2);
    }
    const ModelParams a = fit_homography(pts);
    const ModelParams b = fit_homography(pts);
    for (int i = 0; i < 9; ++i) {
        CHECK(a.m(i / 3, i % 3) == b.m(i / 3, i % 3));
    }
}

}  // TEST_SUITE

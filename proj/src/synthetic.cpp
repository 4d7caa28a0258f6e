#include "multifit/synthetic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "multifit/errors.hpp"
#include "multifit/geometry.hpp"
#include "multifit/random.hpp"

namespace multifit {

namespace {

constexpr int kMaxDrawAttempts = 1000;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

struct Palette {
    std::uint8_t r, g, b;
};

constexpr Palette kBackground{58, 58, 58};
constexpr Palette kPalette[] = {
    {196, 88, 56}, {66, 142, 198}, {96, 180, 86}, {208, 176, 60},
    {150, 84, 188}, {70, 190, 180}, {214, 120, 160}, {128, 128, 220},
};

Point2 uniform_in_box(Rng& rng, const Box& box) {
    return {uniform_range(rng, box.x0, box.x1 + 1.0), uniform_range(rng, box.y0, box.y1 + 1.0)};
}

bool in_image(const Point2& p, int width, int height) {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= width - 1.0 && p.y <= height - 1.0;
}

/// Maps p through the homography; returns false when the point is at infinity.
bool apply_homography(const Mat3& h, const Point2& p, Point2& out) {
    const Eigen::Vector3d q = h * Eigen::Vector3d(p.x, p.y, 1.0);
    if (std::abs(q(2)) < 1e-12) return false;
    out = {q(0) / q(2), q(1) / q(2)};
    return true;
}

/// Clips the line ax + by + c = 0 to the rectangle [0,w-1]x[0,h-1].
/// Returns false when the line misses the rectangle.
bool clip_line_to_rect(double a, double b, double c, int width, int height, Point2& q0, Point2& q1) {
    std::vector<Point2> hits;
    const double x_max = width - 1.0;
    const double y_max = height - 1.0;
    auto push_unique = [&](Point2 p) {
        for (const Point2& h : hits) {
            if (std::abs(h.x - p.x) < 1e-9 && std::abs(h.y - p.y) < 1e-9) return;
        }
        hits.push_back(p);
    };
    if (std::abs(b) > 1e-15) {
        for (const double x : {0.0, x_max}) {
            const double y = -(a * x + c) / b;
            if (y >= 0.0 && y <= y_max) push_unique({x, y});
        }
    }
    if (std::abs(a) > 1e-15) {
        for (const double y : {0.0, y_max}) {
            const double x = -(b * y + c) / a;
            if (x >= 0.0 && x <= x_max) push_unique({x, y});
        }
    }
    if (hits.size() < 2) return false;
    q0 = hits[0];
    q1 = hits[1];
    // Keep the farthest pair when a corner produced a third hit.
    double best = -1.0;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        for (std::size_t j = i + 1; j < hits.size(); ++j) {
            const double d = std::hypot(hits[i].x - hits[j].x, hits[i].y - hits[j].y);
            if (d > best) {
                best = d;
                q0 = hits[i];
                q1 = hits[j];
            }
        }
    }
    return best > 1.0;
}

double true_residual(const ModelParams& model, ModelKind kind, const Correspondence& c) {
    return sampson_residual(model, kind, c);
}

/// Adds Gaussian noise to both views, redrawing until the residual under
/// the true model stays within 3 sigma. Falls back to the noiseless pair.
Correspondence perturb(Rng& rng, const ModelParams& model, ModelKind kind, const Point2& p1,
                       const Point2& p2, double sigma) {
    if (sigma <= 0.0) return {p1, p2, 0.0};
    for (int attempt = 0; attempt < kMaxDrawAttempts; ++attempt) {
        Correspondence c{{p1.x + sigma * normal_unit(rng), p1.y + sigma * normal_unit(rng)},
                         {p2.x + sigma * normal_unit(rng), p2.y + sigma * normal_unit(rng)},
                         0.0};
        if (true_residual(model, kind, c) <= 3.0 * sigma) return c;
    }
    return {p1, p2, 0.0};
}

void fill_box(RgbImage& img, const Box& box, const Palette& color, std::uint64_t salt) {
    const int x0 = std::clamp(box.x0, 0, img.width - 1);
    const int y0 = std::clamp(box.y0, 0, img.height - 1);
    const int x1 = std::clamp(box.x1, 0, img.width - 1);
    const int y1 = std::clamp(box.y1, 0, img.height - 1);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            std::uint8_t* px = img.pixel(x, y);
            const std::uint64_t h = splitmix64(salt ^ (static_cast<std::uint64_t>(y) << 32) ^
                                               static_cast<std::uint64_t>(x));
            const int noise = static_cast<int>(h % 25) - 12;
            px[0] = static_cast<std::uint8_t>(std::clamp(color.r + noise, 0, 255));
            px[1] = static_cast<std::uint8_t>(std::clamp(color.g + noise, 0, 255));
            px[2] = static_cast<std::uint8_t>(std::clamp(color.b + noise, 0, 255));
        }
    }
}

void fill_quad(RgbImage& img, const Point2 quad[4], const Palette& color, std::uint64_t salt) {
    double min_x = quad[0].x, max_x = quad[0].x, min_y = quad[0].y, max_y = quad[0].y;
    for (int i = 1; i < 4; ++i) {
        min_x = std::min(min_x, quad[i].x);
        max_x = std::max(max_x, quad[i].x);
        min_y = std::min(min_y, quad[i].y);
        max_y = std::max(max_y, quad[i].y);
    }
    const int x0 = std::clamp(static_cast<int>(std::floor(min_x)), 0, img.width - 1);
    const int y0 = std::clamp(static_cast<int>(std::floor(min_y)), 0, img.height - 1);
    const int x1 = std::clamp(static_cast<int>(std::ceil(max_x)), 0, img.width - 1);
    const int y1 = std::clamp(static_cast<int>(std::ceil(max_y)), 0, img.height - 1);

    auto inside = [&](double px, double py) {
        int sign = 0;
        for (int i = 0; i < 4; ++i) {
            const Point2& a = quad[i];
            const Point2& b = quad[(i + 1) % 4];
            const double cross = (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
            if (cross > 0) {
                if (sign < 0) return false;
                sign = 1;
            } else if (cross < 0) {
                if (sign > 0) return false;
                sign = -1;
            }
        }
        return true;
    };
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            if (!inside(x, y)) continue;
            std::uint8_t* px = img.pixel(x, y);
            const std::uint64_t h = splitmix64(salt ^ (static_cast<std::uint64_t>(y) << 32) ^
                                               static_cast<std::uint64_t>(x));
            const int noise = static_cast<int>(h % 25) - 12;
            px[0] = static_cast<std::uint8_t>(std::clamp(color.r + noise, 0, 255));
            px[1] = static_cast<std::uint8_t>(std::clamp(color.g + noise, 0, 255));
            px[2] = static_cast<std::uint8_t>(std::clamp(color.b + noise, 0, 255));
        }
    }
}

void validate_spec(const SceneSpec& spec) {
    if (spec.image_width < 1 || spec.image_height < 1) {
        throw InvalidConfigError("scene images must be at least 1x1");
    }
    if (spec.outlier_count < 0 || spec.score_correlation < 0.0 || spec.score_correlation > 1.0) {
        throw InvalidConfigError("outlier count must be >= 0 and rho in [0, 1]");
    }
    if (spec.noise_sigma < 0.0) {
        throw InvalidConfigError("noise sigma must be >= 0");
    }
    for (const StructureSpec& s : spec.structures) {
        if (s.inlier_count < 0) throw InvalidConfigError("inlier count must be >= 0");
        if (s.region.empty() || s.region.x0 < 0 || s.region.y0 < 0 ||
            s.region.x1 > spec.image_width - 1 || s.region.y1 > spec.image_height - 1) {
            throw InvalidConfigError("structure region must lie within the image bounds");
        }
    }
}

}  // namespace

std::vector<int> LabeledScene::structure_indices(int k) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == k) out.push_back(static_cast<int>(i));
    }
    return out;
}

ModelParams fundamental_from_cameras(const Mat3& k1, const Mat3& r, const Eigen::Vector3d& t,
                                     const Mat3& k2) {
    Mat3 tx;
    tx << 0.0, -t(2), t(1),
          t(2), 0.0, -t(0),
          -t(1), t(0), 0.0;
    const Mat3 f = k2.inverse().transpose() * tx * r * k1.inverse();
    return canonicalize(f);
}

LabeledScene generate_scene(const SceneSpec& spec) {
    validate_spec(spec);
    Rng rng(spec.seed);

    LabeledScene scene;
    for (std::size_t i = 0; i < spec.structures.size(); ++i) {
        for (std::size_t j = i + 1; j < spec.structures.size(); ++j) {
            const Box& a = spec.structures[i].region;
            const Box& b = spec.structures[j].region;
            if (a.x0 == b.x0 && a.y0 == b.y0 && a.x1 == b.x1 && a.y1 == b.y1) {
                scene.warnings.push_back("structure regions " + std::to_string(i + 1) + " and " +
                                         std::to_string(j + 1) + " coincide; labels may be ambiguous");
            }
        }
    }

    const int width = spec.image_width;
    const int height = spec.image_height;
    std::vector<Box> view2_boxes(spec.structures.size());

    for (std::size_t k = 0; k < spec.structures.size(); ++k) {
        const StructureSpec& s = spec.structures[k];
        scene.true_models.push_back(s.model);
        Box v2box;
        for (int i = 0; i < s.inlier_count; ++i) {
            Point2 p1{}, p2{};
            bool placed = false;
            for (int attempt = 0; attempt < kMaxDrawAttempts && !placed; ++attempt) {
                p1 = uniform_in_box(rng, s.region);
                if (spec.kind == ModelKind::Homography) {
                    placed = apply_homography(s.model.m, p1, p2) && in_image(p2, width, height);
                } else {
                    const Eigen::Vector3d line = s.model.m * Eigen::Vector3d(p1.x, p1.y, 1.0);
                    Point2 q0, q1;
                    if (!clip_line_to_rect(line(0), line(1), line(2), width, height, q0, q1)) {
                        continue;
                    }
                    const double t = uniform_unit(rng);
                    p2 = {q0.x + t * (q1.x - q0.x), q0.y + t * (q1.y - q0.y)};
                    placed = true;
                }
            }
            if (!placed) {
                throw InvalidConfigError(
                    "structure " + std::to_string(k + 1) +
                    ": could not place inliers inside view 2 (model maps the region off-image)");
            }
            Correspondence c = perturb(rng, s.model, spec.kind, p1, p2, spec.noise_sigma);
            v2box = v2box.united(Box{static_cast<int>(p2.x), static_cast<int>(p2.y),
                                     static_cast<int>(p2.x), static_cast<int>(p2.y)});
            scene.correspondences.push_back(c);
            scene.labels.push_back(static_cast<int>(k) + 1);
        }
        view2_boxes[k] = v2box;
    }

    const Box full{0, 0, width - 1, height - 1};
    for (int i = 0; i < spec.outlier_count; ++i) {
        Correspondence c{uniform_in_box(rng, full), uniform_in_box(rng, full), 0.0};
        scene.correspondences.push_back(c);
        scene.labels.push_back(0);
    }

    // Matching scores: rho * inlier_indicator + (1 - rho) * uniform.
    const double rho = spec.score_correlation;
    for (std::size_t i = 0; i < scene.correspondences.size(); ++i) {
        const double indicator = scene.labels[i] > 0 ? 1.0 : 0.0;
        const double u = uniform_unit(rng);
        scene.correspondences[i].score = std::clamp(rho * indicator + (1.0 - rho) * u, 0.0, 1.0);
    }

    // Fisher-Yates shuffle so structures are interleaved like real matches.
    for (std::size_t i = scene.correspondences.size(); i > 1; --i) {
        const std::size_t j = uniform_below(rng, i);
        std::swap(scene.correspondences[i - 1], scene.correspondences[j]);
        std::swap(scene.labels[i - 1], scene.labels[j]);
    }

    // Rendering: flat background plus one distinct texture per structure,
    // placed consistently in both views.
    scene.rgb1.width = scene.rgb2.width = width;
    scene.rgb1.height = scene.rgb2.height = height;
    scene.rgb1.data.assign(static_cast<std::size_t>(3) * width * height, 0);
    scene.rgb2.data.assign(static_cast<std::size_t>(3) * width * height, 0);
    fill_box(scene.rgb1, full, kBackground, splitmix64(spec.seed ^ 0x1111));
    fill_box(scene.rgb2, full, kBackground, splitmix64(spec.seed ^ 0x2222));

    for (std::size_t k = 0; k < spec.structures.size(); ++k) {
        const StructureSpec& s = spec.structures[k];
        const Palette color = kPalette[k % std::size(kPalette)];
        const std::uint64_t salt1 = splitmix64(spec.seed ^ (0x97531ULL + k));
        const std::uint64_t salt2 = splitmix64(spec.seed ^ (0x86420ULL + k));
        fill_box(scene.rgb1, s.region, color, salt1);
        if (spec.kind == ModelKind::Homography) {
            Point2 quad[4];
            const Point2 corners[4] = {{double(s.region.x0), double(s.region.y0)},
                                       {double(s.region.x1), double(s.region.y0)},
                                       {double(s.region.x1), double(s.region.y1)},
                                       {double(s.region.x0), double(s.region.y1)}};
            bool ok = true;
            for (int i = 0; i < 4; ++i) ok = ok && apply_homography(s.model.m, corners[i], quad[i]);
            if (ok) fill_quad(scene.rgb2, quad, color, salt2);
        } else if (!view2_boxes[k].empty()) {
            Box padded = view2_boxes[k];
            padded.x0 -= 8;
            padded.y0 -= 8;
            padded.x1 += 8;
            padded.y1 += 8;
            fill_box(scene.rgb2, padded, color, salt2);
        }
    }

    scene.image1 = to_lab(scene.rgb1);
    scene.image2 = to_lab(scene.rgb2);
    return scene;
}

int oracle_inlier_count(const ModelParams& model, ModelKind kind,
                        std::span<const Correspondence> correspondences, double scale) {
    // Plain scalar re-derivation of the Sampson distances; shares no code
    // with geometry::sampson_residual.
    double m[9];
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) m[3 * r + c] = model.m(r, c);
    }
    int count = 0;
    for (const Correspondence& corr : correspondences) {
        const double x1 = corr.p1.x, y1 = corr.p1.y, x2 = corr.p2.x, y2 = corr.p2.y;
        double residual;
        if (kind == ModelKind::FundamentalMatrix) {
            const double l0 = m[0] * x1 + m[1] * y1 + m[2];
            const double l1 = m[3] * x1 + m[4] * y1 + m[5];
            const double l2 = m[6] * x1 + m[7] * y1 + m[8];
            const double r0 = m[0] * x2 + m[3] * y2 + m[6];
            const double r1 = m[1] * x2 + m[4] * y2 + m[7];
            const double num = x2 * l0 + y2 * l1 + l2;
            const double grad = l0 * l0 + l1 * l1 + r0 * r0 + r1 * r1;
            residual = grad > 1e-24 ? std::fabs(num) / std::sqrt(grad)
                                    : std::numeric_limits<double>::infinity();
        } else {
            const double u = m[0] * x1 + m[1] * y1 + m[2];
            const double v = m[3] * x1 + m[4] * y1 + m[5];
            const double w = m[6] * x1 + m[7] * y1 + m[8];
            const double e1 = y2 * w - v;
            const double e2 = u - x2 * w;
            const double j11 = y2 * m[6] - m[3];
            const double j12 = y2 * m[7] - m[4];
            const double j21 = m[0] - x2 * m[6];
            const double j22 = m[1] - x2 * m[7];
            const double a = j11 * j11 + j12 * j12 + w * w;
            const double b = j11 * j21 + j12 * j22;
            const double d = j21 * j21 + j22 * j22 + w * w;
            const double det = a * d - b * b;
            if (det > 1e-24) {
                const double q = (e1 * (e1 * d - e2 * b) + e2 * (e2 * a - e1 * b)) / det;
                residual = q > 0.0 ? std::sqrt(q) : 0.0;
            } else {
                residual = std::numeric_limits<double>::infinity();
            }
        }
        if (residual <= scale) ++count;
    }
    return count;
}

SelectionTrace oracle_select(std::span<const Hypothesis> hypotheses, int num_structures) {
    if (hypotheses.empty()) {
        throw NoHypothesesError("selection over an empty hypothesis set");
    }
    SelectionTrace trace;
    std::vector<bool> alive(hypotheses.size(), true);
    for (int t = 0; t < num_structures; ++t) {
        int best = -1;
        for (std::size_t i = 0; i < hypotheses.size(); ++i) {
            if (!alive[i]) continue;
            if (best < 0 || hypotheses[i].inlier_set.size() > hypotheses[best].inlier_set.size()) {
                best = static_cast<int>(i);
            }
        }
        if (best < 0) {
            trace.exhausted_early = true;
            break;
        }
        trace.selected.push_back(hypotheses[best].gen_index);
        alive[best] = false;
        std::vector<int> removed_now;
        for (std::size_t j = 0; j < hypotheses.size(); ++j) {
            if (!alive[j]) continue;
            bool shares = false;
            for (const int s : hypotheses[j].sampled_subset) {
                for (const int in : hypotheses[best].inlier_set) {
                    if (s == in) shares = true;
                }
            }
            if (shares) {
                removed_now.push_back(hypotheses[j].gen_index);
                alive[j] = false;
            }
        }
        trace.removed.push_back(std::move(removed_now));
    }
    return trace;
}

}  // namespace multifit

#pragma once

#include <cstdint>
#include <vector>

#include "multifit/image.hpp"

namespace multifit {

struct SlicConfig {
    int num_superpixels = 150;  ///< requested count M; final K lands in [0.5M, 1.5M]
    double compactness = 10.0;
    int max_iters = 10;
};

/// Per-pixel superpixel assignment. Every label in [0, num_labels) names a
/// 4-connected region and every pixel carries exactly one label.
struct LabelMap {
    int width = 0;
    int height = 0;
    int num_labels = 0;
    std::vector<std::int32_t> labels;  ///< row-major

    std::int32_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

/// Tight axis-aligned pixel box, inclusive on all edges.
struct Box {
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;

    int span_x() const { return x1 - x0 + 1; }
    int span_y() const { return y1 - y0 + 1; }
    bool empty() const { return x1 < x0 || y1 < y0; }

    Box united(const Box& o) const {
        if (empty()) return o;
        if (o.empty()) return *this;
        return {std::min(x0, o.x0), std::min(y0, o.y0), std::max(x1, o.x1), std::max(y1, o.y1)};
    }
};

/// Expected superpixel side length S = sqrt(N / M).
/// Throws InvalidConfigError unless N >= M >= 1.
double grid_interval(std::int64_t pixel_count, std::int64_t num_superpixels);

/// Deterministic SLIC: grid-seeded localized k-means in labxy space with
/// distance D = sqrt(d_lab^2 + (d_xy / S)^2 * compactness^2), followed by
/// connectivity enforcement that merges orphan fragments into the largest
/// adjacent region. Assignment ties go to the lower cluster id, so the
/// output is bit-identical across runs and worker counts.
LabelMap slic_segment(const Image& img, const SlicConfig& cfg);

/// Tight bounding box per label id.
std::vector<Box> superpixel_bounding_boxes(const LabelMap& lm);

}  // namespace multifit

#include "multifit/slic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "multifit/errors.hpp"
#include "multifit/parallel.hpp"

namespace multifit {

double grid_interval(std::int64_t pixel_count, std::int64_t num_superpixels) {
    if (num_superpixels < 1 || num_superpixels > pixel_count) {
        throw InvalidConfigError("superpixel count must satisfy 1 <= M <= pixel count");
    }
    return std::sqrt(static_cast<double>(pixel_count) / static_cast<double>(num_superpixels));
}

namespace {

struct Center {
    double l = 0, a = 0, b = 0, x = 0, y = 0;
};

/// Squared color-gradient magnitude used to nudge seeds off edges.
double gradient2(const Image& img, int x, int y) {
    const int xm = std::max(0, x - 1), xp = std::min(img.width - 1, x + 1);
    const int ym = std::max(0, y - 1), yp = std::min(img.height - 1, y + 1);
    const auto& gx0 = img.lab(xm, y);
    const auto& gx1 = img.lab(xp, y);
    const auto& gy0 = img.lab(x, ym);
    const auto& gy1 = img.lab(x, yp);
    double g = 0;
    for (int c = 0; c < 3; ++c) {
        const double dx = static_cast<double>(gx1[c]) - gx0[c];
        const double dy = static_cast<double>(gy1[c]) - gy0[c];
        g += dx * dx + dy * dy;
    }
    return g;
}

std::vector<Center> seed_centers(const Image& img, double s) {
    const int nx = std::clamp(static_cast<int>(std::llround(img.width / s)), 1, img.width);
    const int ny = std::clamp(static_cast<int>(std::llround(img.height / s)), 1, img.height);

    std::vector<Center> centers;
    centers.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            int px = std::min(img.width - 1, static_cast<int>((i + 0.5) * img.width / nx));
            int py = std::min(img.height - 1, static_cast<int>((j + 0.5) * img.height / ny));
            // Move to the lowest-gradient spot in the 3x3 neighborhood;
            // raster order breaks ties.
            int bx = px, by = py;
            double bg = gradient2(img, px, py);
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int qx = px + dx, qy = py + dy;
                    if (qx < 0 || qy < 0 || qx >= img.width || qy >= img.height) continue;
                    const double g = gradient2(img, qx, qy);
                    if (g < bg) {
                        bg = g;
                        bx = qx;
                        by = qy;
                    }
                }
            }
            const auto& lab = img.lab(bx, by);
            centers.push_back({lab[0], lab[1], lab[2], static_cast<double>(bx), static_cast<double>(by)});
        }
    }
    return centers;
}

/// Relabels so that every final label is one 4-connected region: each
/// cluster keeps its largest component and every smaller fragment is merged
/// into the largest adjacent region (ties to the lowest label id).
/// Surviving labels are compacted to 0..K-1 in ascending original id.
void enforce_connectivity(std::vector<std::int32_t>& labels, int width, int height, int num_clusters) {
    const std::size_t n = labels.size();
    std::vector<std::int32_t> comp(n, -1);
    struct Component {
        std::int32_t label;
        std::vector<int> pixels;
    };
    std::vector<Component> components;

    std::vector<int> stack;
    for (std::size_t start = 0; start < n; ++start) {
        if (comp[start] != -1) continue;
        const std::int32_t label = labels[start];
        const std::int32_t id = static_cast<std::int32_t>(components.size());
        components.push_back({label, {}});
        stack.push_back(static_cast<int>(start));
        comp[start] = id;
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            components[id].pixels.push_back(p);
            const int x = p % width, y = p / width;
            const int neigh[4] = {x > 0 ? p - 1 : -1, x + 1 < width ? p + 1 : -1,
                                  y > 0 ? p - width : -1, y + 1 < height ? p + width : -1};
            for (int q : neigh) {
                if (q >= 0 && comp[q] == -1 && labels[q] == label) {
                    comp[q] = id;
                    stack.push_back(q);
                }
            }
        }
    }

    // Largest component per label is the main region; discovery order breaks ties.
    std::vector<std::int32_t> main_comp(num_clusters, -1);
    for (std::size_t c = 0; c < components.size(); ++c) {
        const std::int32_t label = components[c].label;
        if (main_comp[label] == -1 ||
            components[c].pixels.size() > components[main_comp[label]].pixels.size()) {
            main_comp[label] = static_cast<std::int32_t>(c);
        }
    }

    std::vector<std::size_t> region_size(num_clusters, 0);
    std::vector<bool> is_orphan(components.size(), false);
    std::vector<std::int32_t> orphans;
    for (std::size_t c = 0; c < components.size(); ++c) {
        if (main_comp[components[c].label] == static_cast<std::int32_t>(c)) {
            region_size[components[c].label] += components[c].pixels.size();
        } else {
            is_orphan[c] = true;
            orphans.push_back(static_cast<std::int32_t>(c));
        }
    }

    while (!orphans.empty()) {
        bool progressed = false;
        std::vector<std::int32_t> remaining;
        for (const std::int32_t c : orphans) {
            // Adjacent non-orphan regions of this fragment.
            std::int32_t best_label = -1;
            std::size_t best_size = 0;
            for (const int p : components[c].pixels) {
                const int x = p % width, y = p / width;
                const int neigh[4] = {x > 0 ? p - 1 : -1, x + 1 < width ? p + 1 : -1,
                                      y > 0 ? p - width : -1, y + 1 < height ? p + width : -1};
                for (int q : neigh) {
                    if (q < 0 || is_orphan[comp[q]] || comp[q] == c) continue;
                    const std::int32_t lab = labels[q];
                    const std::size_t sz = region_size[lab];
                    if (sz > best_size || (sz == best_size && (best_label == -1 || lab < best_label))) {
                        best_size = sz;
                        best_label = lab;
                    }
                }
            }
            if (best_label == -1) {
                remaining.push_back(c);
                continue;
            }
            for (const int p : components[c].pixels) labels[p] = best_label;
            region_size[best_label] += components[c].pixels.size();
            // The fragment now belongs to the target's region; re-point its
            // component at the target's main component so neighbors see it.
            const std::int32_t target = main_comp[best_label];
            for (const int p : components[c].pixels) comp[p] = target;
            is_orphan[c] = false;
            progressed = true;
        }
        if (!progressed) {
            // Cannot happen on a covered image, but never loop forever.
            for (const std::int32_t c : remaining) {
                for (const int p : components[c].pixels) labels[p] = components[c].label;
                is_orphan[c] = false;
            }
            break;
        }
        orphans = std::move(remaining);
    }

    // Compact ids of surviving labels.
    std::vector<std::int32_t> remap(num_clusters, -1);
    std::int32_t next = 0;
    for (int k = 0; k < num_clusters; ++k) {
        if (region_size[k] > 0) remap[k] = next++;
    }
    for (auto& l : labels) l = remap[l];
}

}  // namespace

LabelMap slic_segment(const Image& img, const SlicConfig& cfg) {
    if (img.width < 1 || img.height < 1) {
        throw InvalidConfigError("slic_segment: empty image");
    }
    if (cfg.compactness <= 0.0 || cfg.max_iters < 1) {
        throw InvalidConfigError("slic_segment: compactness must be > 0 and max_iters >= 1");
    }
    const std::int64_t n = img.pixel_count();
    const double s = grid_interval(n, cfg.num_superpixels);

    std::vector<Center> centers = seed_centers(img, s);
    const int k = static_cast<int>(centers.size());

    std::vector<std::int32_t> labels(n, 0);

    const double inv_s2 = 1.0 / (s * s);
    const double m2 = cfg.compactness * cfg.compactness;

    // Cell grid for candidate lookup: clusters whose window can reach a
    // pixel live in the pixel's cell or one of the 8 surrounding cells.
    const int cells_x = std::max(1, static_cast<int>(img.width / s) + 1);
    const int cells_y = std::max(1, static_cast<int>(img.height / s) + 1);
    std::vector<std::vector<std::int32_t>> cell_clusters(static_cast<std::size_t>(cells_x) * cells_y);

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        for (auto& cell : cell_clusters) cell.clear();
        for (std::int32_t c = 0; c < k; ++c) {
            const int cx = std::clamp(static_cast<int>(centers[c].x / s), 0, cells_x - 1);
            const int cy = std::clamp(static_cast<int>(centers[c].y / s), 0, cells_y - 1);
            cell_clusters[static_cast<std::size_t>(cy) * cells_x + cx].push_back(c);
        }

        parallel_chunks(img.height, [&](int row_begin, int row_end) {
            for (int y = row_begin; y < row_end; ++y) {
                const int cy = std::clamp(static_cast<int>(y / s), 0, cells_y - 1);
                for (int x = 0; x < img.width; ++x) {
                    const std::size_t pix = static_cast<std::size_t>(y) * img.width + x;
                    const auto& lab = img.pixels[pix];
                    const int cx = std::clamp(static_cast<int>(x / s), 0, cells_x - 1);
                    double best = std::numeric_limits<double>::infinity();
                    std::int32_t best_id = -1;
                    for (int gy = std::max(0, cy - 1); gy <= std::min(cells_y - 1, cy + 1); ++gy) {
                        for (int gx = std::max(0, cx - 1); gx <= std::min(cells_x - 1, cx + 1); ++gx) {
                            for (const std::int32_t c : cell_clusters[static_cast<std::size_t>(gy) * cells_x + gx]) {
                                const Center& ctr = centers[c];
                                if (std::abs(x - ctr.x) > s || std::abs(y - ctr.y) > s) continue;
                                const double dl = lab[0] - ctr.l;
                                const double da = lab[1] - ctr.a;
                                const double db = lab[2] - ctr.b;
                                const double dx = x - ctr.x;
                                const double dy = y - ctr.y;
                                const double d2 =
                                    dl * dl + da * da + db * db + (dx * dx + dy * dy) * inv_s2 * m2;
                                if (d2 < best || (d2 == best && c < best_id)) {
                                    best = d2;
                                    best_id = c;
                                }
                            }
                        }
                    }
                    if (best_id < 0) {
                        // No center window covers this pixel; fall back to a
                        // full scan with the same tie rule.
                        for (std::int32_t c = 0; c < k; ++c) {
                            const Center& ctr = centers[c];
                            const double dl = lab[0] - ctr.l;
                            const double da = lab[1] - ctr.a;
                            const double db = lab[2] - ctr.b;
                            const double dx = x - ctr.x;
                            const double dy = y - ctr.y;
                            const double d2 =
                                dl * dl + da * da + db * db + (dx * dx + dy * dy) * inv_s2 * m2;
                            if (d2 < best || (d2 == best && c < best_id)) {
                                best = d2;
                                best_id = c;
                            }
                        }
                    }
                    labels[pix] = best_id;
                }
            }
        });

        // Serial center update in raster order keeps the result independent
        // of the worker count.
        std::vector<Center> sums(k);
        std::vector<std::int64_t> counts(k, 0);
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x) {
                const std::size_t pix = static_cast<std::size_t>(y) * img.width + x;
                const std::int32_t c = labels[pix];
                const auto& lab = img.pixels[pix];
                sums[c].l += lab[0];
                sums[c].a += lab[1];
                sums[c].b += lab[2];
                sums[c].x += x;
                sums[c].y += y;
                ++counts[c];
            }
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            const double inv = 1.0 / static_cast<double>(counts[c]);
            centers[c] = {sums[c].l * inv, sums[c].a * inv, sums[c].b * inv, sums[c].x * inv,
                          sums[c].y * inv};
        }
    }

    enforce_connectivity(labels, img.width, img.height, k);

    LabelMap lm;
    lm.width = img.width;
    lm.height = img.height;
    lm.labels = std::move(labels);
    lm.num_labels = lm.labels.empty() ? 0 : *std::max_element(lm.labels.begin(), lm.labels.end()) + 1;
    return lm;
}

std::vector<Box> superpixel_bounding_boxes(const LabelMap& lm) {
    std::vector<Box> boxes(lm.num_labels,
                           Box{lm.width, lm.height, -1, -1});
    for (int y = 0; y < lm.height; ++y) {
        for (int x = 0; x < lm.width; ++x) {
            Box& b = boxes[lm.at(x, y)];
            b.x0 = std::min(b.x0, x);
            b.y0 = std::min(b.y0, y);
            b.x1 = std::max(b.x1, x);
            b.y1 = std::max(b.y1, y);
        }
    }
    return boxes;
}

}  // namespace multifit

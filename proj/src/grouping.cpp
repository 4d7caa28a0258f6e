#include "multifit/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace multifit {

GroupSet partition_groups(std::span<const Correspondence> correspondences, const LabelMap& lm,
                          int view) {
    std::map<std::int32_t, std::vector<int>> buckets;
    for (std::size_t i = 0; i < correspondences.size(); ++i) {
        const Point2& f = view == 1 ? correspondences[i].p1 : correspondences[i].p2;
        const int x = std::clamp(static_cast<int>(std::llround(f.x)), 0, lm.width - 1);
        const int y = std::clamp(static_cast<int>(std::llround(f.y)), 0, lm.height - 1);
        buckets[lm.at(x, y)].push_back(static_cast<int>(i));
    }

    const std::vector<Box> boxes = superpixel_bounding_boxes(lm);

    // Superpixel adjacency from 4-adjacent pixel pairs with different labels.
    std::vector<std::set<std::int32_t>> adjacent(lm.num_labels);
    for (int y = 0; y < lm.height; ++y) {
        for (int x = 0; x < lm.width; ++x) {
            const std::int32_t a = lm.at(x, y);
            if (x + 1 < lm.width) {
                const std::int32_t b = lm.at(x + 1, y);
                if (a != b) {
                    adjacent[a].insert(b);
                    adjacent[b].insert(a);
                }
            }
            if (y + 1 < lm.height) {
                const std::int32_t b = lm.at(x, y + 1);
                if (a != b) {
                    adjacent[a].insert(b);
                    adjacent[b].insert(a);
                }
            }
        }
    }

    GroupSet gs;
    gs.view = view;
    gs.S = grid_interval(static_cast<std::int64_t>(lm.width) * lm.height,
                         std::max(1, lm.num_labels));
    std::vector<int> group_of_superpixel(lm.num_labels, -1);
    for (const auto& [id, members] : buckets) {
        group_of_superpixel[id] = static_cast<int>(gs.groups.size());
        Group g;
        g.members = members;
        g.source_superpixels = {{view, static_cast<int>(id)}};
        g.region = boxes[id];
        gs.groups.push_back(std::move(g));
    }

    gs.neighbors.resize(gs.groups.size());
    for (const auto& [id, members] : buckets) {
        const int gi = group_of_superpixel[id];
        for (const std::int32_t other : adjacent[id]) {
            const int gj = group_of_superpixel[other];
            if (gj >= 0) gs.neighbors[gi].push_back(gj);
        }
        std::sort(gs.neighbors[gi].begin(), gs.neighbors[gi].end());
    }
    return gs;
}

GroupSet combine_groups(const GroupSet& gs, double s) {
    const double limit = 2.0 * s;
    const int n = static_cast<int>(gs.groups.size());

    auto qualifies = [&](int i, int j) {
        const Box u = gs.groups[i].region.united(gs.groups[j].region);
        return u.span_x() <= limit && u.span_y() <= limit;
    };

    GroupSet out;
    out.view = gs.view;
    out.S = s;

    std::vector<std::pair<int, int>> merges;
    std::vector<bool> merged(n, false);
    for (int i = 0; i < n; ++i) {
        for (const int j : gs.neighbors[i]) {
            if (j <= i) continue;
            if (qualifies(i, j)) {
                merges.emplace_back(i, j);
                merged[i] = true;
                merged[j] = true;
            }
        }
    }

    for (int i = 0; i < n; ++i) {
        if (!merged[i]) out.groups.push_back(gs.groups[i]);
    }
    std::sort(merges.begin(), merges.end());
    for (const auto& [i, j] : merges) {
        const Group& a = gs.groups[i];
        const Group& b = gs.groups[j];
        Group m;
        m.members.resize(a.members.size() + b.members.size());
        std::merge(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(),
                   m.members.begin());
        m.members.erase(std::unique(m.members.begin(), m.members.end()), m.members.end());
        m.source_superpixels = a.source_superpixels;
        m.source_superpixels.insert(m.source_superpixels.end(), b.source_superpixels.begin(),
                                    b.source_superpixels.end());
        m.region = a.region.united(b.region);
        out.groups.push_back(std::move(m));
    }
    // Merged-pair outputs do not expose adjacency; the set is final.
    out.neighbors.assign(out.groups.size(), {});
    return out;
}

std::vector<int> sort_group(const Group& g, std::span<const Correspondence> correspondences) {
    std::vector<int> order(g.members.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return correspondences[g.members[a]].score > correspondences[g.members[b]].score;
    });
    return order;
}

}  // namespace multifit

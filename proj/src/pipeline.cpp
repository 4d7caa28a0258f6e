#include "multifit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <sstream>

#include "multifit/errors.hpp"
#include "multifit/parallel.hpp"

namespace multifit {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string group_size_histogram(std::span<const GroupSet> groupsets) {
    std::map<std::size_t, int> hist;
    for (const GroupSet& gs : groupsets) {
        for (const Group& g : gs.groups) ++hist[g.members.size()];
    }
    std::ostringstream os;
    os << "group size histogram:";
    for (const auto& [size, count] : hist) os << " " << size << "x" << count;
    if (hist.empty()) os << " (no groups)";
    return os.str();
}

ModelParams refit_on_inliers(const Hypothesis& h,
                             std::span<const Correspondence> correspondences,
                             const FitConfig& cfg) {
    if (static_cast<int>(h.inlier_set.size()) < minimal_sample_size(cfg.kind)) return h.params;
    std::vector<Correspondence> subset;
    subset.reserve(h.inlier_set.size());
    for (const int idx : h.inlier_set) subset.push_back(correspondences[idx]);
    try {
        return fit_model(cfg.kind, subset, cfg.degeneracy_tol);
    } catch (const DegeneracyError&) {
        return h.params;
    }
}

}  // namespace

const char* grouping_view_name(GroupingView v) {
    switch (v) {
        case GroupingView::Both: return "both";
        case GroupingView::View1: return "view1";
        default: return "view2";
    }
}

std::vector<int> inlier_set(const ModelParams& model, ModelKind kind,
                            std::span<const Correspondence> correspondences, double scale) {
    std::vector<int> inliers;
    for (std::size_t i = 0; i < correspondences.size(); ++i) {
        const double r = sampson_residual(model, kind, correspondences[i]);
        if (r <= scale) inliers.push_back(static_cast<int>(i));
    }
    return inliers;
}

std::vector<Hypothesis> generate_hypotheses(std::span<const GroupSet> groupsets,
                                            std::span<const Correspondence> correspondences,
                                            const FitConfig& cfg, int* degenerate_subsets) {
    const int p = minimal_sample_size(cfg.kind);
    const int m0 = cfg.subset_size();
    if (m0 < p) {
        throw InvalidConfigError("m0 must be at least the minimal sample size");
    }

    std::vector<const Group*> eligible;
    for (const GroupSet& gs : groupsets) {
        for (const Group& g : gs.groups) {
            if (static_cast<int>(g.members.size()) >= p) eligible.push_back(&g);
        }
    }

    // Each slot is independent, so groups can be fitted in parallel; the
    // compaction below assigns gen_index in group order either way.
    std::vector<Hypothesis> slots(eligible.size());
    std::vector<char> ok(eligible.size(), 0);
    parallel_chunks(static_cast<int>(eligible.size()), [&](int begin, int end) {
        for (int gi = begin; gi < end; ++gi) {
            const Group& g = *eligible[gi];
            const std::vector<int> order = sort_group(g, correspondences);
            const int take = std::min<int>(m0, static_cast<int>(g.members.size()));
            std::vector<int> subset_indices(take);
            std::vector<Correspondence> subset(take);
            for (int j = 0; j < take; ++j) {
                subset_indices[j] = g.members[order[j]];
                subset[j] = correspondences[subset_indices[j]];
            }
            try {
                Hypothesis h;
                h.params = fit_model(cfg.kind, subset, cfg.degeneracy_tol);
                h.kind = cfg.kind;
                h.sampled_subset = std::move(subset_indices);
                h.inlier_set = inlier_set(h.params, cfg.kind, correspondences, cfg.inlier_scale);
                slots[gi] = std::move(h);
                ok[gi] = 1;
            } catch (const DegeneracyError&) {
                ok[gi] = 0;
            }
        }
    });

    std::vector<Hypothesis> hypotheses;
    hypotheses.reserve(eligible.size());
    int degenerate = 0;
    for (std::size_t gi = 0; gi < eligible.size(); ++gi) {
        if (!ok[gi]) {
            ++degenerate;
            continue;
        }
        slots[gi].gen_index = static_cast<int>(hypotheses.size());
        hypotheses.push_back(std::move(slots[gi]));
    }
    if (degenerate_subsets) *degenerate_subsets = degenerate;
    if (hypotheses.empty()) {
        throw NoHypothesesError("no hypotheses could be generated; " +
                                group_size_histogram(groupsets));
    }
    return hypotheses;
}

const Hypothesis& select_single(std::span<const Hypothesis> hypotheses) {
    if (hypotheses.empty()) {
        throw NoHypothesesError("selection over an empty hypothesis set");
    }
    const Hypothesis* best = &hypotheses[0];
    for (const Hypothesis& h : hypotheses.subspan(1)) {
        if (h.inlier_set.size() > best->inlier_set.size()) best = &h;
    }
    return *best;
}

bool is_redundant(const Hypothesis& selected, const Hypothesis& candidate) {
    for (const int idx : candidate.sampled_subset) {
        if (std::binary_search(selected.inlier_set.begin(), selected.inlier_set.end(), idx)) {
            return true;
        }
    }
    return false;
}

FitResult select_models(std::span<const Hypothesis> hypotheses, const FitConfig& cfg) {
    if (hypotheses.empty()) {
        throw NoHypothesesError("selection over an empty hypothesis set");
    }
    FitResult result;
    std::vector<const Hypothesis*> survivors;
    survivors.reserve(hypotheses.size());
    for (const Hypothesis& h : hypotheses) survivors.push_back(&h);

    for (int t = 0; t < cfg.num_structures; ++t) {
        if (survivors.empty()) {
            result.exhausted_early = true;
            break;
        }
        const Hypothesis* best = survivors[0];
        for (const Hypothesis* h : survivors) {
            if (h->inlier_set.size() > best->inlier_set.size()) best = h;
        }
        result.instances.push_back(*best);

        int removed = 0;
        std::vector<const Hypothesis*> next;
        next.reserve(survivors.size());
        for (const Hypothesis* h : survivors) {
            if (h == best) continue;
            if (is_redundant(*best, *h)) {
                ++removed;
                continue;
            }
            next.push_back(h);
        }
        result.removed_counts.push_back(removed);
        survivors = std::move(next);
    }
    return result;
}

FitResult sdf_fit(const Image& image1, const Image& image2,
                  std::span<const Correspondence> correspondences, const FitConfig& cfg) {
    const int p = minimal_sample_size(cfg.kind);
    if (static_cast<int>(correspondences.size()) < p) {
        throw InvalidConfigError("sdf_fit needs at least p correspondences");
    }
    if (cfg.inlier_scale <= 0.0 || cfg.num_structures < 1) {
        throw InvalidConfigError("inlier scale must be > 0 and T >= 1");
    }

    SlicConfig slic_cfg{cfg.num_superpixels, cfg.compactness, cfg.max_slic_iters};
    StageTimings timings;

    auto start = Clock::now();
    std::vector<std::pair<const Image*, int>> views;
    if (cfg.grouping_view != GroupingView::View2) views.emplace_back(&image1, 1);
    if (cfg.grouping_view != GroupingView::View1) views.emplace_back(&image2, 2);

    std::vector<LabelMap> label_maps;
    label_maps.reserve(views.size());
    for (const auto& [img, view] : views) label_maps.push_back(slic_segment(*img, slic_cfg));
    timings.slic_ms = ms_since(start);

    start = Clock::now();
    std::vector<GroupSet> groupsets;
    groupsets.reserve(views.size());
    for (std::size_t v = 0; v < views.size(); ++v) {
        const double s = grid_interval(views[v].first->pixel_count(), cfg.num_superpixels);
        groupsets.push_back(
            combine_groups(partition_groups(correspondences, label_maps[v], views[v].second), s));
    }
    timings.grouping_ms = ms_since(start);

    start = Clock::now();
    int degenerate = 0;
    const std::vector<Hypothesis> hypotheses =
        generate_hypotheses(groupsets, correspondences, cfg, &degenerate);
    timings.hypotheses_ms = ms_since(start);

    start = Clock::now();
    FitResult result = select_models(hypotheses, cfg);
    if (cfg.polish) {
        for (Hypothesis& h : result.instances) {
            h.params = refit_on_inliers(h, correspondences, cfg);
            h.inlier_set = inlier_set(h.params, cfg.kind, correspondences, cfg.inlier_scale);
        }
    }
    timings.selection_ms = ms_since(start);

    result.timings = timings;
    result.hypotheses_generated = static_cast<int>(hypotheses.size());
    result.degenerate_subsets = degenerate;
    return result;
}

}  // namespace multifit

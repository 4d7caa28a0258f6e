#include <doctest.h>

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "multifit/errors.hpp"
#include "multifit/pipeline.hpp"
#include "multifit/synthetic.hpp"

using namespace multifit;
using namespace multifit::testing;

namespace {

GroupSet groupset_of(std::vector<Group> groups) {
    GroupSet gs;
    gs.view = 1;
    gs.S = 10.0;
    gs.groups = std::move(groups);
    gs.neighbors.assign(gs.groups.size(), {});
    return gs;
}

Group group_of(std::vector<int> members) {
    Group g;
    g.members = std::move(members);
    g.source_superpixels = {{1, 0}};
    g.region = Box{0, 0, 9, 9};
    return g;
}

Hypothesis synthetic_hypothesis(int gen_index, std::vector<int> subset, std::vector<int> inliers) {
    Hypothesis h;
    h.params = canonicalize(Mat3::Identity());
    h.kind = ModelKind::Homography;
    h.sampled_subset = std::move(subset);
    h.inlier_set = std::move(inliers);
    std::sort(h.inlier_set.begin(), h.inlier_set.end());
    h.gen_index = gen_index;
    return h;
}

std::vector<Hypothesis> random_hypothesis_set(Rng& rng, int count, int universe) {
    std::vector<Hypothesis> hyps;
    for (int i = 0; i < count; ++i) {
        std::set<int> subset;
        while (static_cast<int>(subset.size()) < 4) {
            subset.insert(static_cast<int>(uniform_below(rng, universe)));
        }
        std::set<int> inliers(subset.begin(), subset.end());
        const int extra = static_cast<int>(uniform_below(rng, universe / 2));
        for (int e = 0; e < extra; ++e) inliers.insert(static_cast<int>(uniform_below(rng, universe)));
        hyps.push_back(synthetic_hypothesis(i, {subset.begin(), subset.end()},
                                            {inliers.begin(), inliers.end()}));
    }
    return hyps;
}

FitConfig h_config(double scale = 1.0) {
    FitConfig cfg;
    cfg.kind = ModelKind::Homography;
    cfg.inlier_scale = scale;
    return cfg;
}

/// Two separated planar patches sized to the sampling window (the fitter
/// samples within 2S x 2S regions, so structures spanning much more than
/// that yield poorly extrapolating local fits).
SceneSpec two_plane_scene(std::uint64_t seed, int inliers1, int inliers2, int outliers,
                          double sigma) {
    SceneSpec spec;
    spec.kind = ModelKind::Homography;
    spec.image_width = 1024;
    spec.image_height = 768;
    spec.noise_sigma = sigma;
    spec.outlier_count = outliers;
    spec.seed = seed;

    StructureSpec s1;
    s1.model = canonicalize(similarity(0.97, 0.035, 12.0, 6.0));
    s1.inlier_count = inliers1;
    s1.region = Box{128, 294, 307, 473};
    spec.structures.push_back(s1);

    StructureSpec s2;
    s2.model = canonicalize(similarity(1.05, -0.05, -10.0, 14.0));
    s2.inlier_count = inliers2;
    s2.region = Box{640, 294, 819, 473};
    spec.structures.push_back(s2);
    return spec;
}

FitConfig two_plane_config(double scale) {
    FitConfig cfg;
    cfg.kind = ModelKind::Homography;
    cfg.inlier_scale = scale;
    cfg.num_structures = 2;
    cfg.num_superpixels = 60;
    cfg.m0 = 10;
    return cfg;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("one noiseless coplanar group yields one covering hypothesis") {
    Rng rng(7);
    const Mat3 truth = similarity(1.2, 0.1, 5.0, -2.0);
    const std::vector<Correspondence> c = h_correspondences(truth, 6, rng, 0, 0, 60, 60);
    const GroupSet gs = groupset_of({group_of({0, 1, 2, 3, 4, 5})});

    const auto hyps = generate_hypotheses({&gs, 1}, c, h_config());
    REQUIRE(hyps.size() == 1);
    CHECK(hyps[0].gen_index == 0);
    CHECK(hyps[0].sampled_subset.size() == 6);  // m0 = p + 2
    for (const int idx : {0, 1, 2, 3, 4, 5}) {
        CHECK(std::binary_search(hyps[0].inlier_set.begin(), hyps[0].inlier_set.end(), idx));
    }
}

TEST_CASE("a group below the minimal sample size is skipped") {
    Rng rng(9);
    const std::vector<Correspondence> c =
        h_correspondences(similarity(1, 0, 0, 0), 3, rng, 0, 0, 60, 60);
    const GroupSet gs = groupset_of({group_of({0, 1, 2})});
    CHECK_THROWS_AS(generate_hypotheses({&gs, 1}, c, h_config()), NoHypothesesError);
}

TEST_CASE("the no-hypotheses error carries a group size histogram") {
    Rng rng(10);
    const std::vector<Correspondence> c =
        h_correspondences(similarity(1, 0, 0, 0), 3, rng, 0, 0, 60, 60);
    const GroupSet gs = groupset_of({group_of({0, 1, 2}), group_of({0, 1})});
    try {
        generate_hypotheses({&gs, 1}, c, h_config());
        FAIL("expected NoHypothesesError");
    } catch (const NoHypothesesError& e) {
        const std::string what = e.what();
        CHECK(what.find("histogram") != std::string::npos);
        CHECK(what.find("3x1") != std::string::npos);
        CHECK(what.find("2x1") != std::string::npos);
    }
}

TEST_CASE("groups sized between p and m0 use all their members") {
    Rng rng(12);
    const Mat3 truth = similarity(0.9, -0.2, 3.0, 4.0);
    const std::vector<Correspondence> c = h_correspondences(truth, 5, rng, 0, 0, 80, 80);
    const GroupSet gs = groupset_of({group_of({0, 1, 2, 3, 4})});
    const auto hyps = generate_hypotheses({&gs, 1}, c, h_config());
    REQUIRE(hyps.size() == 1);
    CHECK(hyps[0].sampled_subset.size() == 5);
}

TEST_CASE("subsets take the top-scored members") {
    Rng rng(13);
    const Mat3 truth = similarity(1.1, 0.05, 2.0, 1.0);
    std::vector<Correspondence> c = h_correspondences(truth, 8, rng, 0, 0, 100, 100);
    for (std::size_t i = 0; i < c.size(); ++i) c[i].score = static_cast<double>(i);
    const GroupSet gs = groupset_of({group_of({0, 1, 2, 3, 4, 5, 6, 7})});
    const auto hyps = generate_hypotheses({&gs, 1}, c, h_config());
    REQUIRE(hyps.size() == 1);
    CHECK(hyps[0].sampled_subset == std::vector<int>{7, 6, 5, 4, 3, 2});
}

TEST_CASE("degenerate groups are skipped and counted") {
    Rng rng(14);
    const Mat3 truth = similarity(1.0, 0.0, 10.0, 0.0);
    std::vector<Correspondence> c = h_correspondences(truth, 6, rng, 0, 0, 80, 80);
    // A second group whose members are a single repeated point.
    for (int i = 0; i < 4; ++i) c.push_back({{5.0, 5.0}, {15.0, 5.0}, 1.0});
    const GroupSet gs =
        groupset_of({group_of({0, 1, 2, 3, 4, 5}), group_of({6, 7, 8, 9})});
    int degenerate = 0;
    const auto hyps = generate_hypotheses({&gs, 1}, c, h_config(), &degenerate);
    CHECK(hyps.size() == 1);
    CHECK(degenerate == 1);
}

TEST_CASE("two structure-pure groups produce hypotheses with distinct inliers") {
    Rng rng(15);
    const Mat3 h1 = similarity(1.0, 0.0, 40.0, 0.0);
    const Mat3 h2 = similarity(1.0, 0.0, -40.0, 25.0);
    std::vector<Correspondence> c = h_correspondences(h1, 6, rng, 0, 0, 80, 80);
    const auto second = h_correspondences(h2, 6, rng, 300, 300, 400, 400);
    c.insert(c.end(), second.begin(), second.end());
    const GroupSet gs =
        groupset_of({group_of({0, 1, 2, 3, 4, 5}), group_of({6, 7, 8, 9, 10, 11})});
    const auto hyps = generate_hypotheses({&gs, 1}, c, h_config());
    REQUIRE(hyps.size() == 2);
    std::vector<int> overlap;
    std::set_intersection(hyps[0].inlier_set.begin(), hyps[0].inlier_set.end(),
                          hyps[1].inlier_set.begin(), hyps[1].inlier_set.end(),
                          std::back_inserter(overlap));
    CHECK(overlap.empty());
    CHECK(hyps[0].inlier_set.size() == 6);
    CHECK(hyps[1].inlier_set.size() == 6);
}

TEST_CASE("select_single keeps the earliest of tied inlier counts") {
    std::vector<Hypothesis> hyps;
    const std::vector<int> counts{5, 9, 9, 2};
    int next = 0;
    for (const int count : counts) {
        std::vector<int> inliers(count);
        for (int i = 0; i < count; ++i) inliers[i] = i;
        hyps.push_back(synthetic_hypothesis(next++, {0, 1, 2, 3}, inliers));
    }
    CHECK(select_single(hyps).gen_index == 1);

    const std::vector<Hypothesis> one{synthetic_hypothesis(0, {0, 1}, {0, 1, 2})};
    CHECK(select_single(one).gen_index == 0);
    CHECK_THROWS_AS(select_single({}), NoHypothesesError);
}

TEST_CASE("select_single equals a brute-force max scan") {
    Rng rng(21);
    const auto hyps = random_hypothesis_set(rng, 100, 60);
    const Hypothesis& chosen = select_single(hyps);
    std::size_t best_count = 0;
    int best_index = -1;
    for (const Hypothesis& h : hyps) {
        if (h.inlier_set.size() > best_count) {
            best_count = h.inlier_set.size();
            best_index = h.gen_index;
        }
    }
    CHECK(chosen.gen_index == best_index);
    CHECK(chosen.inlier_set.size() == best_count);
}

TEST_CASE("redundancy is subset-intersects-inliers") {
    const Hypothesis selected = synthetic_hypothesis(0, {1, 9}, {1, 3, 9});
    CHECK(is_redundant(selected, synthetic_hypothesis(1, {3, 8}, {})));
    CHECK(!is_redundant(selected, synthetic_hypothesis(2, {4, 5}, {})));
    // A hypothesis is redundant against itself whenever Sam is inside In.
    CHECK(is_redundant(selected, selected));
}

TEST_CASE("select_models with T=1 equals select_single") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const auto hyps = random_hypothesis_set(rng, 30, 50);
        FitConfig cfg = h_config();
        cfg.num_structures = 1;
        const FitResult result = select_models(hyps, cfg);
        REQUIRE(result.instances.size() == 1);
        CHECK(result.instances[0].gen_index == select_single(hyps).gen_index);
    }
}

TEST_CASE("exhaustion before T selections sets the early-stop status") {
    // Two clusters of mutually redundant hypotheses: after two selections
    // nothing survives even though T = 3.
    std::vector<Hypothesis> hyps;
    hyps.push_back(synthetic_hypothesis(0, {0, 1}, {0, 1, 2, 3}));
    hyps.push_back(synthetic_hypothesis(1, {2, 3}, {0, 1, 2}));
    hyps.push_back(synthetic_hypothesis(2, {10, 11}, {10, 11, 12}));
    hyps.push_back(synthetic_hypothesis(3, {12, 10}, {10, 12}));
    FitConfig cfg = h_config();
    cfg.num_structures = 3;
    const FitResult result = select_models(hyps, cfg);
    CHECK(result.instances.size() == 2);
    CHECK(result.instances[0].gen_index == 0);
    CHECK(result.instances[1].gen_index == 2);
    CHECK(result.exhausted_early);
    REQUIRE(result.removed_counts.size() == 2);
    CHECK(result.removed_counts[0] == 1);
    CHECK(result.removed_counts[1] == 1);
}

TEST_CASE("select_models matches the oracle trace on random sets") {
    Rng rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        const int count = 1 + static_cast<int>(uniform_below(rng, 20));
        const auto hyps = random_hypothesis_set(rng, count, 40);
        const int t = 1 + static_cast<int>(uniform_below(rng, 5));
        FitConfig cfg = h_config();
        cfg.num_structures = t;

        const FitResult result = select_models(hyps, cfg);
        const SelectionTrace trace = oracle_select(hyps, t);

        REQUIRE(result.instances.size() == trace.selected.size());
        for (std::size_t i = 0; i < trace.selected.size(); ++i) {
            CHECK(result.instances[i].gen_index == trace.selected[i]);
            CHECK(result.removed_counts[i] == static_cast<int>(trace.removed[i].size()));
        }
        CHECK(result.exhausted_early == trace.exhausted_early);
    }
}

TEST_CASE("removal soundness after each selection") {
    Rng rng(31);
    const auto hyps = random_hypothesis_set(rng, 40, 50);
    FitConfig cfg = h_config();
    cfg.num_structures = 4;
    const FitResult result = select_models(hyps, cfg);

    // Replay: after removing each selected instance's redundant set, no
    // survivor may intersect that inlier set with its subset.
    std::vector<const Hypothesis*> survivors;
    for (const Hypothesis& h : hyps) survivors.push_back(&h);
    for (const Hypothesis& selected : result.instances) {
        std::vector<const Hypothesis*> next;
        for (const Hypothesis* h : survivors) {
            if (h->gen_index == selected.gen_index) continue;
            if (is_redundant(selected, *h)) continue;
            next.push_back(h);
        }
        CHECK(next.size() < survivors.size());  // monotone shrink
        for (const Hypothesis* h : next) CHECK(!is_redundant(selected, *h));
        survivors = std::move(next);
    }
}

TEST_CASE("sdf_fit recovers a single noisy plane") {
    SceneSpec spec;
    spec.kind = ModelKind::Homography;
    spec.image_width = 800;
    spec.image_height = 600;
    spec.noise_sigma = 1.0;
    spec.outlier_count = 60;  // 30% of 200
    spec.seed = 32;
    StructureSpec s;
    s.model = canonicalize(similarity(0.97, 0.03, 10.0, 6.0));
    s.inlier_count = 140;
    s.region = Box{330, 230, 479, 379};
    spec.structures.push_back(s);
    const LabeledScene scene = generate_scene(spec);

    FitConfig cfg = h_config(4.0);
    cfg.num_structures = 1;
    cfg.num_superpixels = 60;
    cfg.m0 = 10;
    const FitResult result = sdf_fit(scene.image1, scene.image2, scene.correspondences, cfg);
    REQUIRE(result.instances.size() == 1);

    double mean = 0.0;
    const auto gt = scene.structure_indices(1);
    for (const int idx : gt) {
        mean += sampson_residual(result.instances[0].params, ModelKind::Homography,
                                 scene.correspondences[idx]);
    }
    mean /= static_cast<double>(gt.size());
    CHECK(mean <= 2.0 * spec.noise_sigma);
}

TEST_CASE("sdf_fit is bit-identical across repeated runs") {
    const LabeledScene scene = generate_scene(two_plane_scene(35, 60, 55, 60, 1.0));
    const FitConfig cfg = two_plane_config(3.0);

    const FitResult a = sdf_fit(scene.image1, scene.image2, scene.correspondences, cfg);
    const FitResult b = sdf_fit(scene.image1, scene.image2, scene.correspondences, cfg);
    REQUIRE(a.instances.size() == b.instances.size());
    for (std::size_t i = 0; i < a.instances.size(); ++i) {
        for (int e = 0; e < 9; ++e) {
            CHECK(a.instances[i].params.m(e / 3, e % 3) == b.instances[i].params.m(e / 3, e % 3));
        }
        CHECK(a.instances[i].inlier_set == b.instances[i].inlier_set);
        CHECK(a.instances[i].sampled_subset == b.instances[i].sampled_subset);
        CHECK(a.instances[i].gen_index == b.instances[i].gen_index);
    }
    CHECK(a.removed_counts == b.removed_counts);
    CHECK(a.hypotheses_generated == b.hypotheses_generated);
}

TEST_CASE("sdf_fit separates two planes at low inlier rates") {
    // 38 + 46 inliers of 214 matches, the two-structure operating point.
    const LabeledScene scene = generate_scene(two_plane_scene(2000, 38, 46, 130, 1.0));
    const FitConfig cfg = two_plane_config(5.0);
    const FitResult result = sdf_fit(scene.image1, scene.image2, scene.correspondences, cfg);
    REQUIRE(result.instances.size() == 2);

    // Each ground-truth structure must be recovered by one instance with
    // at least 80 percent inlier recall.
    for (const int structure : {1, 2}) {
        const auto gt = scene.structure_indices(structure);
        double best_recall = 0.0;
        for (const Hypothesis& inst : result.instances) {
            int hits = 0;
            for (const int idx : gt) {
                if (std::binary_search(inst.inlier_set.begin(), inst.inlier_set.end(), idx)) {
                    ++hits;
                }
            }
            best_recall = std::max(best_recall, static_cast<double>(hits) / gt.size());
        }
        CHECK(best_recall >= 0.8);
    }
}

TEST_CASE("the polish flag refits on inlier sets and keeps them consistent") {
    const LabeledScene scene = generate_scene(two_plane_scene(51, 60, 55, 60, 1.0));
    FitConfig cfg = two_plane_config(3.0);
    const FitResult plain = sdf_fit(scene.image1, scene.image2, scene.correspondences, cfg);
    cfg.polish = true;
    const FitResult polished = sdf_fit(scene.image1, scene.image2, scene.correspondences, cfg);

    REQUIRE(polished.instances.size() == plain.instances.size());
    for (const Hypothesis& inst : polished.instances) {
        CHECK(std::abs(inst.params.m.norm() - 1.0) < 1e-12);
        for (std::size_t i = 0; i < scene.correspondences.size(); ++i) {
            const double r =
                sampson_residual(inst.params, cfg.kind, scene.correspondences[i]);
            const bool in = std::binary_search(inst.inlier_set.begin(), inst.inlier_set.end(),
                                               static_cast<int>(i));
            CHECK(in == (r <= cfg.inlier_scale));
        }
    }
    // The refit consumes every inlier, so it can only widen the consensus.
    CHECK(polished.instances[0].inlier_set.size() + 2 >= plain.instances[0].inlier_set.size());
}

TEST_CASE("inlier sets are consistent with the scale") {
    Rng rng(43);
    const Mat3 truth = similarity(1.05, 0.06, 6.0, -3.0);
    std::vector<Correspondence> c = h_correspondences(truth, 30, rng);
    for (auto& corr : c) {
        corr.p2.x += uniform_range(rng, -3, 3);
        corr.p2.y += uniform_range(rng, -3, 3);
    }
    const ModelParams model = canonicalize(truth);
    const double scale = 1.5;
    const std::vector<int> inliers = inlier_set(model, ModelKind::Homography, c, scale);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double r = sampson_residual(model, ModelKind::Homography, c[i]);
        const bool in = std::binary_search(inliers.begin(), inliers.end(), static_cast<int>(i));
        CHECK(in == (r <= scale));
    }
}

TEST_CASE("single-view grouping works and both-views covers at least as much") {
    const LabeledScene scene = generate_scene(two_plane_scene(61, 50, 50, 40, 0.5));
    FitConfig cfg = two_plane_config(3.0);

    for (const GroupingView view : {GroupingView::View1, GroupingView::View2}) {
        cfg.grouping_view = view;
        const FitResult result =
            sdf_fit(scene.image1, scene.image2, scene.correspondences, cfg);
        CHECK(result.instances.size() == 2);
        CHECK(result.hypotheses_generated >= 1);
    }

    cfg.grouping_view = GroupingView::Both;
    const FitResult both = sdf_fit(scene.image1, scene.image2, scene.correspondences, cfg);
    cfg.grouping_view = GroupingView::View1;
    const FitResult one = sdf_fit(scene.image1, scene.image2, scene.correspondences, cfg);
    CHECK(both.hypotheses_generated >= one.hypotheses_generated);
}

TEST_CASE("sdf_fit validates its preconditions") {
    const LabeledScene scene = generate_scene(two_plane_scene(1, 10, 10, 5, 0.0));
    FitConfig cfg = h_config(0.0);  // invalid scale
    CHECK_THROWS_AS(sdf_fit(scene.image1, scene.image2, scene.correspondences, cfg),
                    InvalidConfigError);

    FitConfig ok = h_config(2.0);
    const std::vector<Correspondence> too_few(3, scene.correspondences[0]);
    CHECK_THROWS_AS(sdf_fit(scene.image1, scene.image2, too_few, ok), InvalidConfigError);
}

}  // TEST_SUITE

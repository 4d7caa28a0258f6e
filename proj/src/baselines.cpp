#include "multifit/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "multifit/errors.hpp"
#include "multifit/random.hpp"

namespace multifit {

namespace {

using Clock = std::chrono::steady_clock;

void validate(const BaselineConfig& cfg) {
    if (cfg.confidence <= 0.0 || cfg.confidence >= 1.0) {
        throw InvalidConfigError("confidence must lie in (0, 1)");
    }
    if (cfg.max_iters < 1 || cfg.num_structures < 1 || cfg.inlier_scale <= 0.0) {
        throw InvalidConfigError("max_iters and T must be >= 1, inlier scale > 0");
    }
}

/// Inliers of the model within the pool, as positions into `pool`.
std::vector<int> pool_inliers(const ModelParams& model, ModelKind kind,
                              std::span<const Correspondence> correspondences,
                              std::span<const int> pool, double scale) {
    std::vector<int> result;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (sampson_residual(model, kind, correspondences[pool[i]]) <= scale) {
            result.push_back(static_cast<int>(i));
        }
    }
    return result;
}

Hypothesis make_hypothesis(const ModelParams& model, ModelKind kind,
                           std::vector<int> sampled_global, std::span<const int> pool,
                           std::span<const int> inlier_positions, int gen_index) {
    Hypothesis h;
    h.params = model;
    h.kind = kind;
    h.sampled_subset = std::move(sampled_global);
    h.inlier_set.reserve(inlier_positions.size());
    for (const int pos : inlier_positions) h.inlier_set.push_back(pool[pos]);
    std::sort(h.inlier_set.begin(), h.inlier_set.end());
    h.gen_index = gen_index;
    return h;
}

void remove_positions(std::vector<int>& pool, std::span<const int> positions) {
    std::vector<int> next;
    next.reserve(pool.size() - positions.size());
    std::size_t r = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (r < positions.size() && static_cast<int>(i) == positions[r]) {
            ++r;
            continue;
        }
        next.push_back(pool[i]);
    }
    pool = std::move(next);
}

/// Draws `count` distinct positions in [0, n), ascending.
std::vector<int> sample_distinct(Rng& rng, int n, int count) {
    std::vector<int> picks;
    picks.reserve(count);
    while (static_cast<int>(picks.size()) < count) {
        const int candidate = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n)));
        if (std::find(picks.begin(), picks.end(), candidate) == picks.end()) {
            picks.push_back(candidate);
        }
    }
    std::sort(picks.begin(), picks.end());
    return picks;
}

}  // namespace

int adaptive_iteration_bound(double confidence, double inlier_ratio, int sample_size,
                             int max_iters) {
    if (inlier_ratio >= 1.0) return 1;
    if (inlier_ratio <= 0.0) return max_iters;
    const double pw = std::pow(inlier_ratio, sample_size);
    if (pw <= 1e-12) return max_iters;
    const double denom = std::log1p(-pw);
    const double bound = std::ceil(std::log(1.0 - confidence) / denom);
    if (!(bound >= 1.0)) return 1;
    if (bound >= static_cast<double>(max_iters)) return max_iters;
    return static_cast<int>(bound);
}

FitResult ransac_fit(std::span<const Correspondence> correspondences, const BaselineConfig& cfg) {
    validate(cfg);
    const int p = minimal_sample_size(cfg.kind);
    if (static_cast<int>(correspondences.size()) < p) {
        throw NoHypothesesError("fewer correspondences than the minimal sample size");
    }

    Rng rng(cfg.rng_seed);
    std::vector<int> pool(correspondences.size());
    std::iota(pool.begin(), pool.end(), 0);

    FitResult result;
    const auto start = Clock::now();
    for (int t = 0; t < cfg.num_structures; ++t) {
        if (static_cast<int>(pool.size()) < p) {
            result.exhausted_early = true;
            break;
        }
        bool have_best = false;
        ModelParams best_model;
        std::vector<int> best_sample;
        std::size_t best_count = 0;
        int iter_bound = cfg.max_iters;
        int iters = 0;
        while (iters < iter_bound) {
            ++iters;
            const std::vector<int> positions = sample_distinct(rng, static_cast<int>(pool.size()), p);
            std::vector<Correspondence> sample(p);
            std::vector<int> sample_global(p);
            for (int j = 0; j < p; ++j) {
                sample_global[j] = pool[positions[j]];
                sample[j] = correspondences[sample_global[j]];
            }
            ModelParams model;
            try {
                model = fit_model(cfg.kind, sample, cfg.degeneracy_tol);
            } catch (const DegeneracyError&) {
                continue;
            }
            ++result.hypotheses_generated;
            std::size_t count = 0;
            for (const int idx : pool) {
                if (sampson_residual(model, cfg.kind, correspondences[idx]) <= cfg.inlier_scale) {
                    ++count;
                }
            }
            if (!have_best || count > best_count) {
                have_best = true;
                best_count = count;
                best_model = model;
                best_sample = std::move(sample_global);
                const double w = static_cast<double>(count) / static_cast<double>(pool.size());
                iter_bound = std::min(iter_bound,
                                      adaptive_iteration_bound(cfg.confidence, w, p, cfg.max_iters));
            }
        }
        result.iterations_per_structure.push_back(iters);
        if (!have_best) {
            result.exhausted_early = true;
            break;
        }
        const std::vector<int> inlier_positions =
            pool_inliers(best_model, cfg.kind, correspondences, pool, cfg.inlier_scale);
        result.instances.push_back(make_hypothesis(best_model, cfg.kind, std::move(best_sample),
                                                   pool, inlier_positions, t));
        remove_positions(pool, inlier_positions);
    }
    result.timings.selection_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    if (result.instances.empty()) {
        throw NoHypothesesError("RANSAC produced no model");
    }
    return result;
}

namespace {

/// Progressive sampling state for one PROSAC structure pass (Chum & Matas
/// growth function with budget T_N over a score-sorted pool of size N).
class ProsacSchedule {
public:
    ProsacSchedule(int pool_size, int sample_size, double t_total)
        : n_(sample_size), pool_size_(pool_size), sample_size_(sample_size) {
        t_n_ = t_total;
        for (int i = 0; i < sample_size_; ++i) {
            t_n_ *= static_cast<double>(sample_size_ - i) / (pool_size_ - i);
        }
        t_n_prime_ = 1.0;
    }

    /// Positions (into the score-sorted order) of the next sample. Uses the
    /// corrected growth test g(t) = min{n : T'_n >= t}: grow while t > T'_n,
    /// so the very first sample is exactly the m top-scored points.
    std::vector<int> next_sample(Rng& rng) {
        ++t_;
        if (static_cast<double>(t_) > t_n_prime_ && n_ < pool_size_) {
            const double t_n1 = t_n_ * static_cast<double>(n_ + 1) / (n_ + 1 - sample_size_);
            ++n_;
            t_n_prime_ += std::ceil(t_n1 - t_n_);
            t_n_ = t_n1;
        }
        if (static_cast<double>(t_) > t_n_prime_) {
            // Finishing stage: a plain RANSAC sample from the first n points.
            return sample_distinct(rng, n_, sample_size_);
        }
        // m-1 random points from the first n-1 plus the n-th point itself.
        std::vector<int> positions = sample_distinct(rng, n_ - 1, sample_size_ - 1);
        positions.push_back(n_ - 1);
        return positions;
    }

private:
    int n_;
    int pool_size_;
    int sample_size_;
    double t_n_;
    double t_n_prime_;
    long t_ = 0;
};

}  // namespace

FitResult prosac_fit(std::span<const Correspondence> correspondences, const BaselineConfig& cfg) {
    validate(cfg);
    const int p = minimal_sample_size(cfg.kind);
    if (static_cast<int>(correspondences.size()) < p) {
        throw NoHypothesesError("fewer correspondences than the minimal sample size");
    }

    Rng rng(cfg.rng_seed);
    std::vector<int> pool(correspondences.size());
    std::iota(pool.begin(), pool.end(), 0);

    FitResult result;
    const auto start = Clock::now();
    for (int t = 0; t < cfg.num_structures; ++t) {
        if (static_cast<int>(pool.size()) < p) {
            result.exhausted_early = true;
            break;
        }
        // Non-ascending score order; equal scores keep ascending index order.
        std::stable_sort(pool.begin(), pool.end(), [&](int a, int b) {
            return correspondences[a].score > correspondences[b].score;
        });

        ProsacSchedule schedule(static_cast<int>(pool.size()), p, cfg.prosac_t_n);
        bool have_best = false;
        ModelParams best_model;
        std::vector<int> best_sample;
        std::size_t best_count = 0;
        int iter_bound = cfg.max_iters;
        int iters = 0;
        while (iters < iter_bound) {
            ++iters;
            const std::vector<int> positions = schedule.next_sample(rng);
            std::vector<Correspondence> sample(p);
            std::vector<int> sample_global(p);
            for (int j = 0; j < p; ++j) {
                sample_global[j] = pool[positions[j]];
                sample[j] = correspondences[sample_global[j]];
            }
            ModelParams model;
            try {
                model = fit_model(cfg.kind, sample, cfg.degeneracy_tol);
            } catch (const DegeneracyError&) {
                continue;
            }
            ++result.hypotheses_generated;
            std::size_t count = 0;
            for (const int idx : pool) {
                if (sampson_residual(model, cfg.kind, correspondences[idx]) <= cfg.inlier_scale) {
                    ++count;
                }
            }
            if (!have_best || count > best_count) {
                have_best = true;
                best_count = count;
                best_model = model;
                best_sample = std::move(sample_global);
                const double w = static_cast<double>(count) / static_cast<double>(pool.size());
                iter_bound = std::min(iter_bound,
                                      adaptive_iteration_bound(cfg.confidence, w, p, cfg.max_iters));
            }
        }
        result.iterations_per_structure.push_back(iters);
        if (!have_best) {
            result.exhausted_early = true;
            break;
        }
        const std::vector<int> inlier_positions =
            pool_inliers(best_model, cfg.kind, correspondences, pool, cfg.inlier_scale);
        result.instances.push_back(make_hypothesis(best_model, cfg.kind, std::move(best_sample),
                                                   pool, inlier_positions, t));
        remove_positions(pool, inlier_positions);
    }
    result.timings.selection_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    if (result.instances.empty()) {
        throw NoHypothesesError("PROSAC produced no model");
    }
    return result;
}

}  // namespace multifit

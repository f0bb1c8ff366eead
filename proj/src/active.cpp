#include "topal/active.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <iterator>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "topal/rng.hpp"

namespace topal {

std::size_t count_provenance(const LabeledPool& pool, Provenance p) {
    std::size_t c = 0;
    for (const auto& [idx, e] : pool)
        if (e.provenance == p) ++c;
    return c;
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "uncertainty") return Strategy::uncertainty;
    if (name == "margin") return Strategy::margin;
    if (name == "entropy") return Strategy::entropy;
    throw std::invalid_argument("unknown strategy: " + name);
}

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::uncertainty: return "uncertainty";
        case Strategy::margin: return "margin";
        case Strategy::entropy: return "entropy";
    }
    return "?";
}

void propagate_labels(const Clustering& regions, const DensityEstimate& dens,
                      const std::vector<std::uint32_t>& region_ids, Oracle& oracle,
                      LabeledPool& pool) {
    const std::size_t n = regions.assignment.size();
    // Region argmaxes (ties to the lowest index).
    std::vector<std::uint32_t> argmax(regions.k, UINT32_MAX);
    for (std::size_t i = 0; i < n; ++i) {
        auto& a = argmax[regions.assignment[i]];
        if (a == UINT32_MAX || dens.raw[i] > dens.raw[a]) a = static_cast<std::uint32_t>(i);
    }
    for (auto q : region_ids) {
        if (q >= regions.k) throw std::invalid_argument("propagate_labels: bad region id");
        const std::uint32_t peak = argmax[q];
        const int label = oracle.query(peak);
        for (std::size_t i = 0; i < n; ++i) {
            if (regions.assignment[i] != q) continue;
            pool[i] = {label, i == peak ? Provenance::oracle : Provenance::propagated};
        }
    }
}

namespace {

// Region ids ordered by decreasing size, ties to the lower id.
std::vector<std::uint32_t> regions_by_size(const Clustering& regions) {
    const auto sizes = regions.sizes();
    std::vector<std::uint32_t> ids(regions.k);
    std::iota(ids.begin(), ids.end(), 0);
    std::sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
        return a < b;
    });
    return ids;
}

}  // namespace

LabeledPool zero_shot(const Clustering& regions, const DensityEstimate& dens, Oracle& oracle,
                      std::size_t budget) {
    if (budget < 1) throw std::invalid_argument("zero_shot: budget must be >= 1");
    auto ids = regions_by_size(regions);
    if (ids.size() > budget) {
        ids.resize(budget);
    } else if (ids.size() < budget) {
        std::cerr << "warning: only " << ids.size() << " regions available for budget "
                  << budget << "; labeling all of them\n";
    }
    LabeledPool pool;
    propagate_labels(regions, dens, ids, oracle, pool);
    return pool;
}

std::vector<double> query_scores(Strategy kind, const Matrix& proba) {
    std::vector<double> scores(proba.rows());
    for (std::size_t i = 0; i < proba.rows(); ++i) {
        const auto row = proba.row(i);
        switch (kind) {
            case Strategy::uncertainty: {
                double mx = 0.0;
                for (double p : row) mx = std::max(mx, p);
                scores[i] = 1.0 - mx;
                break;
            }
            case Strategy::margin: {
                double top1 = 0.0, top2 = 0.0;
                for (double p : row) {
                    if (p > top1) {
                        top2 = top1;
                        top1 = p;
                    } else if (p > top2) {
                        top2 = p;
                    }
                }
                scores[i] = -(top1 - top2);
                break;
            }
            case Strategy::entropy: {
                double h = 0.0;
                for (double p : row)
                    if (p > 0.0) h -= p * std::log(p);
                scores[i] = h;
                break;
            }
        }
    }
    return scores;
}

void fit_on_pool(Learner& learner, const Dataset& pool_data, const LabeledPool& pool,
                 std::uint64_t seed, const Matrix* extra_X, const std::vector<int>* extra_y) {
    const std::size_t extra = extra_X ? extra_X->rows() : 0;
    Matrix X(pool.size() + extra, pool_data.dim());
    std::vector<int> y;
    y.reserve(pool.size() + extra);
    std::size_t r = 0;
    for (const auto& [idx, e] : pool) {
        for (std::size_t f = 0; f < pool_data.dim(); ++f) X(r, f) = pool_data.features(idx, f);
        y.push_back(e.label);
        ++r;
    }
    for (std::size_t i = 0; i < extra; ++i) {
        for (std::size_t f = 0; f < pool_data.dim(); ++f) X(r, f) = (*extra_X)(i, f);
        y.push_back((*extra_y)[i]);
        ++r;
    }
    learner.fit(X, y, seed);
}

namespace {

// Top-B unlabeled row indices by score; already-labeled rows are masked.
// Ties break to the lower row index.
std::vector<std::size_t> top_unlabeled(const std::vector<double>& scores,
                                       const LabeledPool& pool, std::size_t budget) {
    std::vector<std::size_t> idx;
    idx.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (!pool.count(i)) idx.push_back(i);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    if (idx.size() > budget) idx.resize(budget);
    return idx;
}

}  // namespace

PalResult pal_ptr(const Dataset& pool_data, const PTRModel& ptr, Oracle& oracle,
                  Learner& learner, const ALConfig& cfg, std::uint64_t seed,
                  const EvalFn& evaluate) {
    const auto& regions = ptr.regions;
    const auto by_size = regions_by_size(regions);

    PalResult result;
    result.pool = zero_shot(regions, ptr.density, oracle, cfg.budget);

    std::vector<bool> region_labeled(regions.k, false);
    for (const auto& [idx, e] : result.pool) region_labeled[regions.assignment[idx]] = true;

    auto record_round = [&](std::size_t round) {
        fit_on_pool(learner, pool_data, result.pool, mix_seed(seed, 0xf17ull, round));
        result.rounds.push_back({round, oracle.query_count(),
                                 count_provenance(result.pool, Provenance::oracle),
                                 count_provenance(result.pool, Provenance::propagated),
                                 evaluate(learner)});
    };

    record_round(0);
    for (std::size_t u = 0; u < cfg.rounds; ++u) {
        if (result.pool.size() >= pool_data.size()) {
            result.exhausted_early = true;
            break;
        }
        // The model fitted for round u drives the queries of round u+1.
        const auto proba = learner.proba(pool_data.features);
        const auto scores = query_scores(cfg.strategy, proba);
        const auto picked = top_unlabeled(scores, result.pool, cfg.budget);

        std::vector<std::uint32_t> to_label;
        for (auto i : picked) {
            const std::uint32_t q = regions.assignment[i];
            if (!region_labeled[q] &&
                std::find(to_label.begin(), to_label.end(), q) == to_label.end())
                to_label.push_back(q);
        }
        // Spend any remaining budget on the largest untouched regions.
        for (auto q : by_size) {
            if (to_label.size() >= cfg.budget) break;
            if (region_labeled[q]) continue;
            if (std::find(to_label.begin(), to_label.end(), q) != to_label.end()) continue;
            to_label.push_back(q);
        }
        if (to_label.empty()) {
            result.exhausted_early = true;
            break;
        }
        propagate_labels(regions, ptr.density, to_label, oracle, result.pool);
        for (auto q : to_label) region_labeled[q] = true;
        record_round(u + 1);
    }
    return result;
}

PalResult plain_al(const Dataset& pool_data, Oracle& oracle, Learner& learner,
                   const ALConfig& cfg, std::uint64_t seed, const EvalFn& evaluate) {
    const std::size_t n = pool_data.size();
    if (cfg.budget > n) throw std::invalid_argument("plain_al: budget exceeds pool");

    PalResult result;
    {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        std::vector<std::size_t> chosen;
        auto rng = make_rng(mix_seed(seed, 0x9a11ull));
        std::sample(all.begin(), all.end(), std::back_inserter(chosen), cfg.budget, rng);
        for (auto i : chosen) result.pool[i] = {oracle.query(i), Provenance::oracle};
    }

    auto record_round = [&](std::size_t round) {
        fit_on_pool(learner, pool_data, result.pool, mix_seed(seed, 0xf17ull, round));
        result.rounds.push_back({round, oracle.query_count(), result.pool.size(), 0,
                                 evaluate(learner)});
    };

    record_round(0);
    for (std::size_t u = 0; u < cfg.rounds; ++u) {
        if (result.pool.size() >= n) {
            result.exhausted_early = true;
            break;
        }
        const auto proba = learner.proba(pool_data.features);
        const auto scores = query_scores(cfg.strategy, proba);
        const auto picked = top_unlabeled(scores, result.pool, cfg.budget);
        if (picked.empty()) {
            result.exhausted_early = true;
            break;
        }
        for (auto i : picked) result.pool[i] = {oracle.query(i), Provenance::oracle};
        record_round(u + 1);
    }
    return result;
}

}  // namespace topal

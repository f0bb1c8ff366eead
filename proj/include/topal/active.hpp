#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "topal/dataset.hpp"
#include "topal/forest.hpp"
#include "topal/matrix.hpp"
#include "topal/metric_graph.hpp"
#include "topal/ptr.hpp"

namespace topal {

enum class Provenance { oracle, propagated };

struct LabeledEntry {
    int label = 0;
    Provenance provenance = Provenance::oracle;

    bool operator==(const LabeledEntry&) const = default;
};

/// Growing labeled pool: pool row index -> (label, provenance).
using LabeledPool = std::map<std::size_t, LabeledEntry>;

std::size_t count_provenance(const LabeledPool& pool, Provenance p);

enum class Strategy { uncertainty, margin, entropy };

Strategy strategy_from_name(const std::string& name);
std::string strategy_name(Strategy s);

struct ALConfig {
    std::size_t budget = 10;
    std::size_t rounds = 10;
    Strategy strategy = Strategy::uncertainty;
};

/// Labels every member of each listed region with the oracle answer at the
/// region's density argmax (argmax gets oracle provenance, the rest
/// propagated). Entries are inserted into `pool`; one oracle query per
/// region whose argmax was not asked before.
void propagate_labels(const Clustering& regions, const DensityEstimate& dens,
                      const std::vector<std::uint32_t>& region_ids, Oracle& oracle,
                      LabeledPool& pool);

/// Labels the B largest regions (ties to the lower region id). Spends
/// exactly min(B, k) oracle queries; warns when fewer regions than B exist.
LabeledPool zero_shot(const Clustering& regions, const DensityEstimate& dens, Oracle& oracle,
                      std::size_t budget);

/// Per-row informativeness scores (higher = more informative):
/// uncertainty = 1 - max p; margin = -(top1 - top2); entropy = -sum p ln p.
std::vector<double> query_scores(Strategy kind, const Matrix& proba);

struct RoundRecord {
    std::size_t round = 0;
    std::size_t oracle_queries = 0;     // cumulative
    std::size_t pool_oracle = 0;        // labeled-pool size by provenance
    std::size_t pool_propagated = 0;
    double evaluation = 0.0;            // whatever the callback returns
};

struct PalResult {
    LabeledPool pool;
    std::vector<RoundRecord> rounds;
    bool exhausted_early = false;
};

/// Evaluation hook called on the model fitted at each round.
using EvalFn = std::function<double(const Learner&)>;

/// Pool-based active learning on topological regions. Round 0 labels the B
/// largest regions (zero-shot); each later round fits the learner on the
/// current pool, scores the unlabeled points, maps the top-B points to their
/// regions and labels those; if fewer than B distinct regions are hit, the
/// remaining budget goes to the largest unlabeled regions disjoint from the
/// selection. Stops early when no unlabeled region remains.
PalResult pal_ptr(const Dataset& pool_data, const PTRModel& ptr, Oracle& oracle,
                  Learner& learner, const ALConfig& cfg, std::uint64_t seed,
                  const EvalFn& evaluate);

/// Plain pool-based active learning baseline: a random initial set of B
/// points, then top-B strategy queries per round, all labeled directly.
PalResult plain_al(const Dataset& pool_data, Oracle& oracle, Learner& learner,
                   const ALConfig& cfg, std::uint64_t seed, const EvalFn& evaluate);

/// Fits the learner on the current pool (plus optional synthetic extras).
void fit_on_pool(Learner& learner, const Dataset& pool_data, const LabeledPool& pool,
                 std::uint64_t seed, const Matrix* extra_X = nullptr,
                 const std::vector<int>* extra_y = nullptr);

}  // namespace topal

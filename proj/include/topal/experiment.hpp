#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "topal/dataset.hpp"
#include "topal/metric_graph.hpp"
#include "topal/ptr.hpp"

namespace topal {

struct DatasetSpec {
    std::string name;
    std::string path;
    std::string label_column;
};

/// Harness configuration; serializable to/from JSON so an emitted manifest
/// can reproduce the identical run.
struct ExperimentConfig {
    std::vector<DatasetSpec> datasets;
    std::vector<std::size_t> budgets{10};
    std::vector<std::string> coldstart_methods{"rs", "ptr"};
    std::vector<std::string> strategies{"uncertainty"};
    std::size_t splits = 20;
    std::uint64_t base_seed = 1;
    double train_fraction = 0.7;
    std::size_t trials = 500;
    double lambda_step = 0.01;
    std::size_t max_lambda_steps = 100;
    std::size_t density_ell = 0;  // 0 = min(n-1, 2000)
    std::size_t rounds = 10;
    std::string out_dir = "results";
    int jobs = 1;

    void validate() const;
};

ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

/// One evaluation outcome. For active-learning runs the method name is
/// "<init>+<strategy>" and `round` counts labeling rounds (0 = cold start).
struct ResultRecord {
    std::string dataset;
    std::string method;
    std::size_t budget = 0;
    std::uint64_t split_seed = 0;
    std::size_t round = 0;
    double balanced_accuracy = 0.0;
    std::size_t oracle_queries = 0;
    std::size_t pool_oracle = 0;
    std::size_t pool_propagated = 0;
    double wall_time_ms = 0.0;
};

/// Cold-start protocol: per (dataset, budget, split, method) fit the forest
/// on the initial labeled set and score balanced accuracy on the test side.
std::vector<ResultRecord> run_coldstart(const ExperimentConfig& cfg);

/// Active-learning protocol: per (dataset, budget, strategy, split) run the
/// region-based loop against the plain random-start loop, one record per
/// round.
std::vector<ResultRecord> run_al(const ExperimentConfig& cfg);

/// Writes records.csv, summary.csv (mean/std and rank-sum significance vs
/// the random baseline), rounds.jsonl, timings.csv and manifest.json.
/// records.csv excludes wall time so reruns are byte-identical.
void emit_results(const std::vector<ResultRecord>& records, const ExperimentConfig& cfg,
                  const std::string& dir);

/// Constant-threshold vs adaptive-threshold comparison: minimize PuritySize
/// of the graph's connected components over each family's parameter box with
/// the same trial budget.
struct GraphCompareResult {
    double rips_best_ps = 0.0;
    double rips_best_delta = 0.0;
    double sigma_best_ps = 0.0;
    SigmaParams sigma_best;
};

GraphCompareResult graph_compare(const Dataset& d, const DistanceMatrix& D,
                                 const DensityEstimate& dens, std::size_t trials,
                                 std::uint64_t seed);

/// Threshold-vs-density curve data for the comparison plot: one row per
/// density value u with the adaptive threshold and the constant one.
void write_threshold_curve(const GraphCompareResult& r, const std::string& path);

}  // namespace topal

#pragma once

#include <cstdint>
#include <string>

#include "topal/blackbox.hpp"
#include "topal/dataset.hpp"
#include "topal/metric_graph.hpp"
#include "topal/tomato.hpp"

namespace topal {

/// Configuration of the two-stage region optimization.
struct PTRConfig {
    double lambda_step = 0.01;      // line-search step
    std::size_t trials = 500;       // trials per optimizer run
    std::uint64_t seed = 0;
    OptMethod method = OptMethod::tpe;
    std::size_t max_lambda_steps = 100;  // safety cap on the line search

    // Search boxes. delta is log-scaled over (delta_floor_frac * d_max, d_max].
    double delta_floor_frac = 1e-4;
    double r_lower = 1.0 + 1e-6;
    double r_upper = 2.0;
    double t_lower = 0.05;
    double t_upper = 1.0;
};

/// Fitted proper-topological-regions model.
struct PTRModel {
    SigmaParams params;
    double tau = 0.0;
    double lambda_final = 0.0;
    double stage1_value = 0.0;  // the kept trial's objective value
    DensityEstimate density;
    NeighborGraph graph;
    Clustering regions;
    bool degenerate_at_first_lambda = false;
    bool lambda_cap_hit = false;
    std::size_t lambda_steps_run = 0;
};

/// Two-stage optimization: a lambda line search maximizing SilSize of the
/// sigma-Rips graph's connected components over (delta, r, t), stepping
/// lambda up until the optimizer's graph degenerates, then stepping back and
/// maximizing SilSize of the ToMATo clustering over tau on the kept graph.
/// Each lambda's best parameters are cached, so the step back does not rerun
/// the optimizer. If the very first lambda already yields a degenerate
/// graph, that solution is kept and a warning is emitted.
PTRModel optimize_ptr(const Dataset& d, const DistanceMatrix& D, const DensityEstimate& dens,
                      const PTRConfig& cfg);

/// Stage-1 search box over (delta, r, t) for a given max pairwise distance.
SearchSpace sigma_search_space(double d_max, const PTRConfig& cfg);

std::string ptr_model_to_json(const PTRModel& m);
void save_ptr_model(const PTRModel& m, const std::string& path);

}  // namespace topal

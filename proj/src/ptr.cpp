#include "topal/ptr.hpp"

#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "topal/objectives.hpp"
#include "topal/rng.hpp"

#include "json.hpp"

namespace topal {

SearchSpace sigma_search_space(double d_max, const PTRConfig& cfg) {
    if (!(d_max > 0.0)) throw std::invalid_argument("sigma_search_space: d_max must be > 0");
    SearchSpace space;
    space.dims = {
        {"delta", cfg.delta_floor_frac * d_max, d_max, Scale::log},
        {"r", cfg.r_lower, cfg.r_upper, Scale::linear},
        {"t", cfg.t_lower, cfg.t_upper, Scale::linear},
    };
    return space;
}

namespace {

SigmaParams params_from(const std::vector<double>& p) {
    return SigmaParams{p[0], p[1], p[2]};
}

}  // namespace

PTRModel optimize_ptr(const Dataset& d, const DistanceMatrix& D, const DensityEstimate& dens,
                      const PTRConfig& cfg) {
    if (!(cfg.lambda_step > 0.0)) throw std::invalid_argument("optimize_ptr: lambda_step <= 0");
    if (cfg.trials < 1) throw std::invalid_argument("optimize_ptr: trials < 1");
    if (D.n != d.size() || dens.raw.size() != d.size())
        throw std::invalid_argument("optimize_ptr: dataset/distance/density size mismatch");

    const auto space = sigma_search_space(D.max_value(), cfg);

    // Stage 1 at a fixed lambda: SilSize of the sigma-Rips graph's connected
    // components over (delta, r, t). Each lambda warm-starts from the
    // previous lambda's best parameters.
    std::vector<std::vector<double>> warm;
    auto stage1_best = [&](double lambda, std::uint64_t seed) {
        const auto log = optimize(
            [&](const std::vector<double>& p) {
                const auto comps = sigma_rips_components(D, dens, params_from(p));
                return sil_size(comps, D, lambda);
            },
            space, cfg.trials, cfg.method, seed, warm);
        warm = {log.best().params};
        return log.best();
    };

    // A lambda is worth keeping when its best graph has no giant component
    // and at most 5% of the points sit in dust components (below the
    // degeneracy size floor). Wholesale fragmentation fails this; a stray
    // two-point clump next to real structure does not.
    auto healthy = [&](const Clustering& comps) {
        if (has_giant_component(comps, D.n)) return false;
        const std::size_t floor_size = std::max<std::size_t>(
            3, static_cast<std::size_t>(std::ceil(0.01 * static_cast<double>(D.n))));
        std::size_t dust = 0;
        for (auto s : comps.sizes())
            if (s < floor_size) dust += s;
        return static_cast<double>(dust) <= 0.05 * static_cast<double>(D.n);
    };

    PTRModel model;
    model.density = dens;

    // Lambda line search. The walk climbs until the optimizer's best graph
    // collapses into a giant component (the agglomerated end of the scale),
    // then keeps the largest healthy lambda seen. Every lambda's best is
    // cached, so stepping back never reruns the optimizer.
    std::vector<Trial> per_lambda;  // step index -> best trial
    std::ptrdiff_t last_healthy = -1;
    double lambda = cfg.lambda_step;
    std::size_t step = 1;
    bool cap_hit = false;
    bool giant_now = false;
    while (true) {
        const auto best = stage1_best(lambda, mix_seed(cfg.seed, 0x57a6e1ull, step));
        per_lambda.push_back(best);
        const auto comps = sigma_rips_components(D, dens, params_from(best.params));
        giant_now = has_giant_component(comps, D.n);
        if (healthy(comps)) last_healthy = static_cast<std::ptrdiff_t>(per_lambda.size()) - 1;
        if (giant_now && last_healthy >= 0) break;
        if (step >= cfg.max_lambda_steps) {
            cap_hit = true;
            break;
        }
        lambda += cfg.lambda_step;
        ++step;
    }
    model.lambda_steps_run = per_lambda.size();
    model.lambda_cap_hit = cap_hit;

    std::size_t kept;  // 0-based index into per_lambda
    if (last_healthy >= 0) {
        kept = static_cast<std::size_t>(last_healthy);
    } else {
        // No healthy lambda anywhere: fall back to the best-scoring cached
        // non-giant graph, or the first lambda when even that is missing.
        model.degenerate_at_first_lambda = giant_now && per_lambda.size() == 1;
        kept = 0;
        double best_value = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < per_lambda.size(); ++i) {
            const auto comps =
                sigma_rips_components(D, dens, params_from(per_lambda[i].params));
            if (has_giant_component(comps, D.n)) continue;
            if (per_lambda[i].value > best_value) {
                best_value = per_lambda[i].value;
                kept = i;
            }
        }
        std::cerr << "warning: no healthy sigma-Rips graph along the lambda line search; "
                     "keeping the best non-giant solution (lambda="
                  << cfg.lambda_step * static_cast<double>(kept + 1) << ")\n";
    }
    model.lambda_final = cfg.lambda_step * static_cast<double>(kept + 1);
    model.stage1_value = per_lambda[kept].value;

    model.params = params_from(per_lambda[kept].params);
    model.graph = build_sigma_rips(D, dens, model.params);

    // Stage 2: SilSize of the ToMATo clustering over tau on the kept graph.
    const double lambda_final = model.lambda_final;
    SearchSpace tau_space;
    tau_space.dims = {{"tau", 0.0, 1.0, Scale::linear}};
    const auto tau_log = optimize(
        [&](const std::vector<double>& p) {
            const auto result = tomato_cluster(model.graph, dens, p[0]);
            return sil_size(result.clustering, D, lambda_final);
        },
        tau_space, cfg.trials, cfg.method, mix_seed(cfg.seed, 0x57a6e2ull));
    model.tau = tau_log.best().params[0];
    model.regions = tomato_cluster(model.graph, dens, model.tau).clustering;
    return model;
}

std::string ptr_model_to_json(const PTRModel& m) {
    nlohmann::json j;
    j["params"] = {{"delta", m.params.delta}, {"r", m.params.r}, {"t", m.params.t},
                   {"tau", m.tau}};
    j["lambda_final"] = m.lambda_final;
    j["lambda_steps_run"] = m.lambda_steps_run;
    j["degenerate_at_first_lambda"] = m.degenerate_at_first_lambda;
    j["lambda_cap_hit"] = m.lambda_cap_hit;
    j["k"] = m.regions.k;
    j["assignment"] = m.regions.assignment;
    j["region_peaks"] = m.regions.roots;
    return j.dump(2);
}

void save_ptr_model(const PTRModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write PTR model: " + path);
    out << ptr_model_to_json(m) << "\n";
}

}  // namespace topal

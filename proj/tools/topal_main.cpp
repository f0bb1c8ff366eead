#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "topal/active.hpp"
#include "topal/blackbox.hpp"
#include "topal/experiment.hpp"
#include "topal/persistence.hpp"
#include "topal/ptr.hpp"
#include "topal/rng.hpp"
#include "topal/tomato.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 0;
};

topal::ExperimentConfig resolve_config(const CommonOpts& o) {
    auto cfg = topal::load_config(o.config_path);
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (o.seed_set) cfg.base_seed = o.seed;
    if (o.jobs > 0) cfg.jobs = o.jobs;
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_config) {
    auto* c = cmd->add_option("--config", o.config_path, "experiment config (JSON)");
    if (needs_config) c->required();
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "base seed override")
        ->each([&o](const std::string&) { o.seed_set = true; });
    cmd->add_option("--jobs", o.jobs, "parallel independent runs");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topology-guided cold start and pool-based active learning harness"};
    app.require_subcommand(1);

    CommonOpts cold_opts, al_opts;
    auto* cold = app.add_subcommand("coldstart", "run the cold-start benchmark");
    add_common(cold, cold_opts, true);
    auto* al = app.add_subcommand("al", "run the active-learning benchmark");
    add_common(al, al_opts, true);

    struct {
        std::string data, label_column = "class", out = "ptr_model.json";
        std::string dump_graph, dump_diagram, dump_trials;
        std::uint64_t seed = 1;
        std::size_t trials = 500;
        double lambda_step = 0.01;
        std::size_t max_lambda_steps = 100;
        std::size_t density_ell = 0;
        std::int64_t split_seed = -1;
        double train_fraction = 0.7;
    } fit_opts;
    auto* fit = app.add_subcommand("ptr-fit", "fit topological regions and dump the model");
    fit->add_option("--data", fit_opts.data, "dataset CSV")->required();
    fit->add_option("--label-column", fit_opts.label_column, "label column name");
    fit->add_option("--out", fit_opts.out, "model JSON path");
    fit->add_option("--seed", fit_opts.seed, "optimizer seed");
    fit->add_option("--trials", fit_opts.trials, "optimizer trials per run");
    fit->add_option("--lambda-step", fit_opts.lambda_step, "line-search step");
    fit->add_option("--max-lambda-steps", fit_opts.max_lambda_steps, "line-search cap");
    fit->add_option("--density-ell", fit_opts.density_ell, "neighbor count (0 = auto)");
    fit->add_option("--split-seed", fit_opts.split_seed,
                    "fit on the train side of this stratified split (-1 = full data)");
    fit->add_option("--train-fraction", fit_opts.train_fraction, "train fraction for --split-seed");
    fit->add_option("--dump-graph", fit_opts.dump_graph, "edge list dump path");
    fit->add_option("--dump-diagram", fit_opts.dump_diagram, "persistence diagram CSV path");

    struct {
        std::string data, label_column = "class", out = "graph_compare";
        std::uint64_t seed = 1;
        std::size_t trials = 500;
        std::size_t density_ell = 0;
    } gc_opts;
    auto* gc = app.add_subcommand("graph-compare",
                                  "constant vs adaptive threshold comparison on PuritySize");
    gc->add_option("--data", gc_opts.data, "dataset CSV")->required();
    gc->add_option("--label-column", gc_opts.label_column, "label column name");
    gc->add_option("--out", gc_opts.out, "output directory");
    gc->add_option("--seed", gc_opts.seed, "optimizer seed");
    gc->add_option("--trials", gc_opts.trials, "optimizer trials per family");
    gc->add_option("--density-ell", gc_opts.density_ell, "neighbor count (0 = auto)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cold->parsed()) {
            const auto cfg = resolve_config(cold_opts);
            const auto records = topal::run_coldstart(cfg);
            topal::emit_results(records, cfg, cfg.out_dir);
            std::cout << "wrote " << records.size() << " records to " << cfg.out_dir << "\n";
        } else if (al->parsed()) {
            const auto cfg = resolve_config(al_opts);
            const auto records = topal::run_al(cfg);
            topal::emit_results(records, cfg, cfg.out_dir);
            std::cout << "wrote " << records.size() << " records to " << cfg.out_dir << "\n";
        } else if (fit->parsed()) {
            auto full = topal::load_dataset(fit_opts.data, fit_opts.label_column);
            topal::Dataset pool = full;
            if (fit_opts.split_seed >= 0) {
                const auto split = topal::stratified_split(
                    full, static_cast<std::uint64_t>(fit_opts.split_seed),
                    fit_opts.train_fraction);
                pool = topal::subset(full, split.train_indices);
            }
            const auto D = topal::pairwise_distances(pool);
            const std::size_t ell = fit_opts.density_ell > 0
                                        ? std::min(fit_opts.density_ell, pool.size() - 1)
                                        : topal::default_density_ell(pool.size());
            const auto dens = topal::estimate_density(D, ell);
            topal::PTRConfig pcfg;
            pcfg.trials = fit_opts.trials;
            pcfg.lambda_step = fit_opts.lambda_step;
            pcfg.max_lambda_steps = fit_opts.max_lambda_steps;
            pcfg.seed = fit_opts.seed;
            const auto model = topal::optimize_ptr(pool, D, dens, pcfg);
            topal::save_ptr_model(model, fit_opts.out);
            if (!fit_opts.dump_graph.empty())
                topal::dump_edge_list(model.graph, D, fit_opts.dump_graph);
            if (!fit_opts.dump_diagram.empty())
                topal::dump_diagram_csv(
                    topal::upper_star_diagram(model.graph, model.density),
                    fit_opts.dump_diagram);
            std::cout << "k=" << model.regions.k << " lambda=" << model.lambda_final
                      << " tau=" << model.tau << " -> " << fit_opts.out << "\n";
        } else if (gc->parsed()) {
            const auto d = topal::load_dataset(gc_opts.data, gc_opts.label_column);
            const auto D = topal::pairwise_distances(d);
            const std::size_t ell = gc_opts.density_ell > 0
                                        ? std::min(gc_opts.density_ell, d.size() - 1)
                                        : topal::default_density_ell(d.size());
            const auto dens = topal::estimate_density(D, ell);
            const auto r = topal::graph_compare(d, D, dens, gc_opts.trials, gc_opts.seed);
            std::filesystem::create_directories(gc_opts.out);
            topal::write_threshold_curve(r, gc_opts.out + "/threshold_curve.csv");
            std::ofstream summary(gc_opts.out + "/comparison.csv");
            summary << "family,best_purity_size,delta,r,t\n";
            summary << "rips," << r.rips_best_ps << "," << r.rips_best_delta << ",,\n";
            summary << "sigma_rips," << r.sigma_best_ps << "," << r.sigma_best.delta << ","
                    << r.sigma_best.r << "," << r.sigma_best.t << "\n";
            std::cout << "best PS rips=" << r.rips_best_ps
                      << " sigma=" << r.sigma_best_ps << " -> " << gc_opts.out << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

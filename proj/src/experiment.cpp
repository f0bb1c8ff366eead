#include "topal/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "topal/active.hpp"
#include "topal/coldstart.hpp"
#include "topal/forest.hpp"
#include "topal/objectives.hpp"
#include "topal/rng.hpp"
#include "topal/stats.hpp"

#include "json.hpp"

namespace topal {

using nlohmann::json;

void ExperimentConfig::validate() const {
    if (datasets.empty()) throw std::invalid_argument("config: no datasets");
    if (budgets.empty()) throw std::invalid_argument("config: no budgets");
    for (auto b : budgets)
        if (b < 1) throw std::invalid_argument("config: budgets must be >= 1");
    if (splits < 1) throw std::invalid_argument("config: splits must be >= 1");
    for (const auto& m : coldstart_methods) coldstart_from_name(m);
    for (const auto& s : strategies) strategy_from_name(s);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json j;
    in >> j;

    ExperimentConfig cfg;
    cfg.datasets.clear();
    for (const auto& d : j.at("datasets"))
        cfg.datasets.push_back({d.at("name").get<std::string>(), d.at("path").get<std::string>(),
                                d.at("label_column").get<std::string>()});
    if (j.contains("budgets")) cfg.budgets = j["budgets"].get<std::vector<std::size_t>>();
    if (j.contains("coldstart_methods"))
        cfg.coldstart_methods = j["coldstart_methods"].get<std::vector<std::string>>();
    if (j.contains("strategies"))
        cfg.strategies = j["strategies"].get<std::vector<std::string>>();
    if (j.contains("splits")) cfg.splits = j["splits"].get<std::size_t>();
    if (j.contains("base_seed")) cfg.base_seed = j["base_seed"].get<std::uint64_t>();
    if (j.contains("train_fraction")) cfg.train_fraction = j["train_fraction"].get<double>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<std::size_t>();
    if (j.contains("lambda_step")) cfg.lambda_step = j["lambda_step"].get<double>();
    if (j.contains("max_lambda_steps"))
        cfg.max_lambda_steps = j["max_lambda_steps"].get<std::size_t>();
    if (j.contains("density_ell")) cfg.density_ell = j["density_ell"].get<std::size_t>();
    if (j.contains("rounds")) cfg.rounds = j["rounds"].get<std::size_t>();
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
    cfg.validate();
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["datasets"] = json::array();
    for (const auto& d : cfg.datasets)
        j["datasets"].push_back(
            {{"name", d.name}, {"path", d.path}, {"label_column", d.label_column}});
    j["budgets"] = cfg.budgets;
    j["coldstart_methods"] = cfg.coldstart_methods;
    j["strategies"] = cfg.strategies;
    j["splits"] = cfg.splits;
    j["base_seed"] = cfg.base_seed;
    j["train_fraction"] = cfg.train_fraction;
    j["trials"] = cfg.trials;
    j["lambda_step"] = cfg.lambda_step;
    j["max_lambda_steps"] = cfg.max_lambda_steps;
    j["density_ell"] = cfg.density_ell;
    j["rounds"] = cfg.rounds;
    j["out_dir"] = cfg.out_dir;
    j["jobs"] = cfg.jobs;
    return j.dump(2);
}

namespace {

struct PoolContext {
    Dataset pool;
    Dataset test;
    DistanceMatrix D;
    DensityEstimate dens;
};

PoolContext make_pool(const Dataset& full, std::uint64_t split_seed,
                      const ExperimentConfig& cfg) {
    PoolContext ctx;
    const auto split = stratified_split(full, split_seed, cfg.train_fraction);
    ctx.pool = subset(full, split.train_indices);
    ctx.test = subset(full, split.test_indices);
    ctx.D = pairwise_distances(ctx.pool);
    const std::size_t ell =
        cfg.density_ell > 0 ? std::min(cfg.density_ell, ctx.pool.size() - 1)
                            : default_density_ell(ctx.pool.size());
    ctx.dens = estimate_density(ctx.D, ell);
    return ctx;
}

PTRModel fit_ptr(const PoolContext& ctx, std::uint64_t split_seed,
                 const ExperimentConfig& cfg) {
    PTRConfig pcfg;
    pcfg.lambda_step = cfg.lambda_step;
    pcfg.trials = cfg.trials;
    pcfg.max_lambda_steps = cfg.max_lambda_steps;
    pcfg.seed = mix_seed(cfg.base_seed, split_seed, 0x9742ull);
    return optimize_ptr(ctx.pool, ctx.D, ctx.dens, pcfg);
}

double test_accuracy(const Learner& learner, const Dataset& test) {
    return balanced_accuracy(test.labels, learner.predict_labels(test.features));
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

template <class Fn>
void parallel_jobs(std::size_t count, int jobs, Fn&& fn) {
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (std::size_t i = 0; i < count; ++i) {
        try {
            fn(i);
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<ResultRecord> run_coldstart(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<Dataset> data;
    for (const auto& spec : cfg.datasets) {
        auto d = load_dataset(spec.path, spec.label_column);
        d.name = spec.name;
        data.push_back(std::move(d));
    }

    const bool wants_ptr =
        std::find(cfg.coldstart_methods.begin(), cfg.coldstart_methods.end(), "ptr") !=
        cfg.coldstart_methods.end();

    struct Job {
        std::size_t dataset;
        std::size_t split;
    };
    std::vector<Job> jobs;
    for (std::size_t d = 0; d < data.size(); ++d)
        for (std::size_t s = 0; s < cfg.splits; ++s) jobs.push_back({d, s});

    std::vector<std::vector<ResultRecord>> per_job(jobs.size());
    parallel_jobs(jobs.size(), cfg.jobs, [&](std::size_t ji) {
        const auto& job = jobs[ji];
        const auto& full = data[job.dataset];
        const std::uint64_t split_seed = cfg.base_seed + job.split;
        const auto ctx = make_pool(full, split_seed, cfg);

        PTRModel ptr_model;
        if (wants_ptr) ptr_model = fit_ptr(ctx, split_seed, cfg);

        for (auto budget : cfg.budgets) {
            for (const auto& method_name : cfg.coldstart_methods) {
                const auto method = coldstart_from_name(method_name);
                const auto t0 = std::chrono::steady_clock::now();
                Oracle oracle(ctx.pool.labels);
                RandomForestLearner learner;
                LabeledPool pool;
                Matrix extra_X;
                std::vector<int> extra_y;
                if (method == ColdStart::ptr) {
                    pool = zero_shot(ptr_model.regions, ptr_model.density, oracle, budget);
                } else {
                    auto cold = coldstart_init(method, ctx.pool, ctx.D, budget, oracle,
                                               mix_seed(mix_seed(cfg.base_seed, split_seed,
                                                                 budget),
                                                        method_name));
                    pool = std::move(cold.pool);
                    extra_X = std::move(cold.extra_features);
                    extra_y = std::move(cold.extra_labels);
                }
                fit_on_pool(learner, ctx.pool, pool,
                            mix_seed(cfg.base_seed, split_seed, 0xf0ull),
                            extra_X.rows() ? &extra_X : nullptr,
                            extra_X.rows() ? &extra_y : nullptr);
                ResultRecord rec;
                rec.dataset = full.name;
                rec.method = method_name;
                rec.budget = budget;
                rec.split_seed = split_seed;
                rec.round = 0;
                rec.balanced_accuracy = test_accuracy(learner, ctx.test);
                rec.oracle_queries = oracle.query_count();
                rec.pool_oracle = count_provenance(pool, Provenance::oracle);
                rec.pool_propagated = count_provenance(pool, Provenance::propagated);
                rec.wall_time_ms = ms_since(t0);
                per_job[ji].push_back(std::move(rec));
            }
        }
    });

    std::vector<ResultRecord> records;
    for (auto& v : per_job)
        for (auto& r : v) records.push_back(std::move(r));
    return records;
}

std::vector<ResultRecord> run_al(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<Dataset> data;
    for (const auto& spec : cfg.datasets) {
        auto d = load_dataset(spec.path, spec.label_column);
        d.name = spec.name;
        data.push_back(std::move(d));
    }

    struct Job {
        std::size_t dataset;
        std::size_t split;
    };
    std::vector<Job> jobs;
    for (std::size_t d = 0; d < data.size(); ++d)
        for (std::size_t s = 0; s < cfg.splits; ++s) jobs.push_back({d, s});

    std::vector<std::vector<ResultRecord>> per_job(jobs.size());
    parallel_jobs(jobs.size(), cfg.jobs, [&](std::size_t ji) {
        const auto& job = jobs[ji];
        const auto& full = data[job.dataset];
        const std::uint64_t split_seed = cfg.base_seed + job.split;
        const auto ctx = make_pool(full, split_seed, cfg);
        const auto ptr_model = fit_ptr(ctx, split_seed, cfg);

        for (auto budget : cfg.budgets) {
            for (const auto& strategy_str : cfg.strategies) {
                ALConfig al;
                al.budget = budget;
                al.rounds = cfg.rounds;
                al.strategy = strategy_from_name(strategy_str);

                auto push_rounds = [&](const std::string& method_name, const PalResult& res,
                                       double wall_ms) {
                    for (const auto& r : res.rounds) {
                        ResultRecord rec;
                        rec.dataset = full.name;
                        rec.method = method_name;
                        rec.budget = budget;
                        rec.split_seed = split_seed;
                        rec.round = r.round;
                        rec.balanced_accuracy = r.evaluation;
                        rec.oracle_queries = r.oracle_queries;
                        rec.pool_oracle = r.pool_oracle;
                        rec.pool_propagated = r.pool_propagated;
                        rec.wall_time_ms = wall_ms;
                        per_job[ji].push_back(std::move(rec));
                    }
                };

                {
                    const auto t0 = std::chrono::steady_clock::now();
                    Oracle oracle(ctx.pool.labels);
                    RandomForestLearner learner;
                    const auto res = pal_ptr(
                        ctx.pool, ptr_model, oracle, learner, al,
                        mix_seed(cfg.base_seed, split_seed, 0xa1ull),
                        [&](const Learner& l) { return test_accuracy(l, ctx.test); });
                    push_rounds("ptr+" + strategy_str, res, ms_since(t0));
                }
                {
                    const auto t0 = std::chrono::steady_clock::now();
                    Oracle oracle(ctx.pool.labels);
                    RandomForestLearner learner;
                    const auto res = plain_al(
                        ctx.pool, oracle, learner, al,
                        mix_seed(cfg.base_seed, split_seed, 0xa2ull),
                        [&](const Learner& l) { return test_accuracy(l, ctx.test); });
                    push_rounds("rs+" + strategy_str, res, ms_since(t0));
                }
            }
        }
    });

    std::vector<ResultRecord> records;
    for (auto& v : per_job)
        for (auto& r : v) records.push_back(std::move(r));
    return records;
}

namespace {

void sort_records(std::vector<ResultRecord>& records) {
    std::sort(records.begin(), records.end(), [](const ResultRecord& a, const ResultRecord& b) {
        return std::tie(a.dataset, a.method, a.budget, a.split_seed, a.round) <
               std::tie(b.dataset, b.method, b.budget, b.split_seed, b.round);
    });
}

std::string format_double(double v) {
    std::ostringstream ss;
    ss.precision(12);
    ss << v;
    return ss.str();
}

// "rs" pairs with cold-start methods, "rs+<strategy>" with "<init>+<strategy>".
std::string baseline_method_for(const std::string& method) {
    const auto plus = method.find('+');
    if (plus == std::string::npos) return "rs";
    return "rs" + method.substr(plus);
}

}  // namespace

void emit_results(const std::vector<ResultRecord>& records, const ExperimentConfig& cfg,
                  const std::string& dir) {
    if (records.empty()) throw std::invalid_argument("emit_results: no records");
    std::filesystem::create_directories(dir);

    auto sorted = records;
    sort_records(sorted);

    {
        std::ofstream out(dir + "/records.csv");
        if (!out) throw std::runtime_error("cannot write records.csv in " + dir);
        out << "dataset,method,budget,split_seed,round,balanced_accuracy,oracle_queries,"
               "pool_oracle,pool_propagated\n";
        for (const auto& r : sorted)
            out << r.dataset << "," << r.method << "," << r.budget << "," << r.split_seed << ","
                << r.round << "," << format_double(r.balanced_accuracy) << ","
                << r.oracle_queries << "," << r.pool_oracle << "," << r.pool_propagated << "\n";
    }
    {
        // Wall times live in their own file; they vary between reruns.
        std::ofstream out(dir + "/timings.csv");
        out << "dataset,method,budget,split_seed,round,wall_time_ms\n";
        for (const auto& r : sorted)
            out << r.dataset << "," << r.method << "," << r.budget << "," << r.split_seed << ","
                << r.round << "," << r.wall_time_ms << "\n";
    }
    {
        std::ofstream out(dir + "/rounds.jsonl");
        for (const auto& r : sorted) {
            json j{{"dataset", r.dataset},       {"method", r.method},
                   {"budget", r.budget},         {"split_seed", r.split_seed},
                   {"round", r.round},           {"queries", r.oracle_queries},
                   {"pool_oracle", r.pool_oracle}, {"pool_propagated", r.pool_propagated},
                   {"balanced_accuracy", r.balanced_accuracy}};
            out << j.dump() << "\n";
        }
    }

    // Per-(dataset, method, budget, round) aggregation with significance
    // against the matching random baseline.
    std::map<std::tuple<std::string, std::string, std::size_t, std::size_t>, std::vector<double>>
        groups;
    for (const auto& r : sorted)
        groups[{r.dataset, r.method, r.budget, r.round}].push_back(r.balanced_accuracy);

    std::ofstream out(dir + "/summary.csv");
    if (!out) throw std::runtime_error("cannot write summary.csv in " + dir);
    out << "dataset,method,budget,round,mean,std,p_vs_rs,flag\n";
    for (const auto& [key, values] : groups) {
        const auto& [dataset, method, budget, round] = key;
        const double m = mean(values), sd = sample_stddev(values);
        std::string p_str, flag;
        const auto baseline = baseline_method_for(method);
        if (method != baseline) {
            auto it = groups.find({dataset, baseline, budget, round});
            if (it != groups.end() && it->second.size() >= 5 && values.size() >= 5) {
                const double p = rank_sum_test(values, it->second);
                p_str = format_double(p);
                if (p < 0.05) flag = m > mean(it->second) ? "up" : "down";
            }
        }
        out << dataset << "," << method << "," << budget << "," << round << ","
            << format_double(m) << "," << format_double(sd) << "," << p_str << "," << flag
            << "\n";
    }

    std::ofstream manifest(dir + "/manifest.json");
    manifest << config_to_json(cfg) << "\n";
}

GraphCompareResult graph_compare(const Dataset& d, const DistanceMatrix& D,
                                 const DensityEstimate& dens, std::size_t trials,
                                 std::uint64_t seed) {
    const double d_max = D.max_value();
    GraphCompareResult result;

    SearchSpace rips_space;
    rips_space.dims = {{"delta", 1e-4 * d_max, d_max, Scale::log}};
    const auto rips_log = optimize(
        [&](const std::vector<double>& p) {
            return -purity_size(rips_components(D, p[0]), d.labels, dens);
        },
        rips_space, trials, OptMethod::tpe, mix_seed(seed, 0x617ull));
    result.rips_best_delta = rips_log.best().params[0];
    result.rips_best_ps = -rips_log.best().value;

    PTRConfig pcfg;
    const auto sigma_space = sigma_search_space(d_max, pcfg);
    const auto sigma_log = optimize(
        [&](const std::vector<double>& p) {
            const SigmaParams sp{p[0], p[1], p[2]};
            return -purity_size(sigma_rips_components(D, dens, sp), d.labels, dens);
        },
        sigma_space, trials, OptMethod::tpe, mix_seed(seed, 0x618ull));
    const auto& best = sigma_log.best();
    result.sigma_best = SigmaParams{best.params[0], best.params[1], best.params[2]};
    result.sigma_best_ps = -best.value;
    return result;
}

void write_threshold_curve(const GraphCompareResult& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write threshold curve: " + path);
    out << "density,sigma_threshold,rips_threshold\n";
    for (int i = 0; i <= 200; ++i) {
        const double u = static_cast<double>(i) / 200.0;
        out << u << "," << sigma_threshold(r.sigma_best, u, u) << "," << r.rips_best_delta
            << "\n";
    }
}

}  // namespace topal

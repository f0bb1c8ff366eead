#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace topal {

enum class Scale { linear, log };

struct SearchDim {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;
    Scale scale = Scale::linear;
};

/// Box-shaped continuous search space. Log-scaled dims need lower > 0.
struct SearchSpace {
    std::vector<SearchDim> dims;
    void validate() const;
};

struct Trial {
    std::vector<double> params;
    double value = 0.0;
    std::size_t index = 0;
};

struct TrialLog {
    std::vector<Trial> entries;

    /// Max-value entry; ties resolve to the lowest trial index.
    const Trial& best() const;
};

enum class OptMethod { random, tpe };

using Objective = std::function<double(const std::vector<double>&)>;

/// Maximizes the objective over the box with the given trial budget.
/// Deterministic for a fixed seed. Non-finite objective values are recorded
/// as -infinity and the search continues.
///
/// TPE: the first trials are uniform; afterwards the history is split at the
/// gamma quantile by value, per-dimension kernel density estimators are fit
/// to the good and bad parameter sets, candidates are drawn from the good
/// model and the one maximizing the good/bad density ratio is evaluated.
///
/// initial_points, when given, are evaluated first and count against the
/// trial budget (warm starting).
TrialLog optimize(const Objective& objective, const SearchSpace& space, std::size_t trials,
                  OptMethod method, std::uint64_t seed,
                  const std::vector<std::vector<double>>& initial_points = {});

void dump_trials_csv(const TrialLog& log, const SearchSpace& space, const std::string& path);

}  // namespace topal

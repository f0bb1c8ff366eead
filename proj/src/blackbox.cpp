#include "topal/blackbox.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "topal/rng.hpp"

namespace topal {

namespace {

constexpr double kGamma = 0.25;
constexpr std::size_t kStartupTrials = 20;
constexpr std::size_t kCandidates = 24;

double to_internal(double x, const SearchDim& d) {
    return d.scale == Scale::log ? std::log(x) : x;
}
double from_internal(double x, const SearchDim& d) {
    return d.scale == Scale::log ? std::exp(x) : x;
}

// One-dimensional Gaussian kernel density with per-center bandwidths from
// nearest-neighbor spacing, clipped to a fraction of the box width.
class Kde1d {
public:
    Kde1d(std::vector<double> centers, double lo, double hi) : centers_(std::move(centers)) {
        std::sort(centers_.begin(), centers_.end());
        const double width = hi - lo;
        bw_.resize(centers_.size());
        for (std::size_t i = 0; i < centers_.size(); ++i) {
            double gap = width;
            if (i > 0) gap = centers_[i] - centers_[i - 1];
            if (i + 1 < centers_.size()) {
                const double right = centers_[i + 1] - centers_[i];
                gap = (i > 0) ? std::max(gap, right) : right;
            }
            // The floor keeps kernels from collapsing into needles once the
            // good set piles up near one point.
            bw_[i] = std::clamp(gap, 0.05 * width, width);
        }
    }

    double density(double x) const {
        double s = 0.0;
        for (std::size_t i = 0; i < centers_.size(); ++i) {
            const double z = (x - centers_[i]) / bw_[i];
            s += std::exp(-0.5 * z * z) / bw_[i];
        }
        return s / (std::sqrt(2.0 * M_PI) * static_cast<double>(centers_.size()));
    }

    double sample(std::mt19937_64& rng, double lo, double hi) const {
        std::uniform_int_distribution<std::size_t> pick(0, centers_.size() - 1);
        std::normal_distribution<double> gauss;
        for (int attempt = 0; attempt < 32; ++attempt) {
            const std::size_t i = pick(rng);
            const double x = centers_[i] + bw_[i] * gauss(rng);
            if (x >= lo && x <= hi) return x;
        }
        std::uniform_real_distribution<double> uni(lo, hi);
        return uni(rng);
    }

private:
    std::vector<double> centers_;
    std::vector<double> bw_;
};

std::vector<double> sample_uniform(const SearchSpace& space, std::mt19937_64& rng) {
    std::vector<double> p(space.dims.size());
    for (std::size_t d = 0; d < space.dims.size(); ++d) {
        const auto& dim = space.dims[d];
        std::uniform_real_distribution<double> uni(to_internal(dim.lower, dim),
                                                   to_internal(dim.upper, dim));
        p[d] = from_internal(uni(rng), dim);
    }
    return p;
}

std::vector<double> sample_tpe(const SearchSpace& space, const std::vector<Trial>& history,
                               std::mt19937_64& rng) {
    // Split at the gamma quantile by value: good = top fraction.
    std::vector<std::size_t> idx(history.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (history[a].value != history[b].value) return history[a].value > history[b].value;
        return history[a].index < history[b].index;
    });
    const std::size_t n_good = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(kGamma * static_cast<double>(history.size()))));

    const std::size_t nd = space.dims.size();
    std::vector<Kde1d> good_kde, bad_kde;
    good_kde.reserve(nd);
    bad_kde.reserve(nd);
    for (std::size_t d = 0; d < nd; ++d) {
        const auto& dim = space.dims[d];
        const double lo = to_internal(dim.lower, dim), hi = to_internal(dim.upper, dim);
        std::vector<double> good, bad;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const double x = to_internal(history[idx[i]].params[d], dim);
            (i < n_good ? good : bad).push_back(x);
        }
        if (bad.empty()) bad = good;
        good_kde.emplace_back(std::move(good), lo, hi);
        bad_kde.emplace_back(std::move(bad), lo, hi);
    }

    std::vector<double> best_point;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < kCandidates; ++c) {
        std::vector<double> internal(nd);
        double score = 0.0;  // sum of log density ratios across dimensions
        for (std::size_t d = 0; d < nd; ++d) {
            const auto& dim = space.dims[d];
            const double lo = to_internal(dim.lower, dim), hi = to_internal(dim.upper, dim);
            internal[d] = good_kde[d].sample(rng, lo, hi);
            const double pg = std::max(good_kde[d].density(internal[d]), 1e-300);
            const double pb = std::max(bad_kde[d].density(internal[d]), 1e-300);
            score += std::log(pg) - std::log(pb);
        }
        if (score > best_score) {
            best_score = score;
            best_point = std::move(internal);
        }
    }
    std::vector<double> out(nd);
    for (std::size_t d = 0; d < nd; ++d) out[d] = from_internal(best_point[d], space.dims[d]);
    return out;
}

}  // namespace

void SearchSpace::validate() const {
    if (dims.empty()) throw std::invalid_argument("SearchSpace: no dimensions");
    for (const auto& d : dims) {
        if (!(d.lower < d.upper))
            throw std::invalid_argument("SearchSpace: lower must be below upper for " + d.name);
        if (d.scale == Scale::log && !(d.lower > 0.0))
            throw std::invalid_argument("SearchSpace: log scale needs lower > 0 for " + d.name);
    }
}

const Trial& TrialLog::best() const {
    if (entries.empty()) throw std::logic_error("TrialLog: empty");
    const Trial* b = &entries.front();
    for (const auto& t : entries)
        if (t.value > b->value) b = &t;
    return *b;
}

TrialLog optimize(const Objective& objective, const SearchSpace& space, std::size_t trials,
                  OptMethod method, std::uint64_t seed,
                  const std::vector<std::vector<double>>& initial_points) {
    space.validate();
    if (trials < 1) throw std::invalid_argument("optimize: trials must be >= 1");

    auto rng = make_rng(mix_seed(seed, 0xb1acb0cull));
    TrialLog log;
    log.entries.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        std::vector<double> p;
        if (t < initial_points.size())
            p = initial_points[t];
        else if (method == OptMethod::random || t < kStartupTrials)
            p = sample_uniform(space, rng);
        else
            p = sample_tpe(space, log.entries, rng);
        double v = objective(p);
        if (!std::isfinite(v)) v = -std::numeric_limits<double>::infinity();
        log.entries.push_back({std::move(p), v, t});
    }
    return log;
}

void dump_trials_csv(const TrialLog& log, const SearchSpace& space, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trial log: " + path);
    out << "trial";
    for (const auto& d : space.dims) out << "," << d.name;
    out << ",value\n";
    for (const auto& t : log.entries) {
        out << t.index;
        for (double p : t.params) out << "," << p;
        out << "," << t.value << "\n";
    }
}

}  // namespace topal

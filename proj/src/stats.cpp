#include "topal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace topal {

double balanced_accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("balanced_accuracy: length mismatch");
    if (y_true.empty()) throw std::invalid_argument("balanced_accuracy: empty input");

    std::map<int, std::pair<std::size_t, std::size_t>> per_class;  // class -> (count, correct)
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        auto& [count, correct] = per_class[y_true[i]];
        ++count;
        if (y_pred[i] == y_true[i]) ++correct;
    }
    double sum = 0.0;
    for (const auto& [cls, cc] : per_class)
        sum += static_cast<double>(cc.second) / static_cast<double>(cc.first);
    return sum / static_cast<double>(per_class.size());
}

double rank_sum_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 5 || b.size() < 5)
        throw std::invalid_argument("rank_sum_test: need at least 5 samples per side");

    const std::size_t na = a.size(), nb = b.size(), n = na + nb;
    std::vector<std::pair<double, int>> all;  // (value, side)
    all.reserve(n);
    for (double v : a) all.emplace_back(v, 0);
    for (double v : b) all.emplace_back(v, 1);
    std::sort(all.begin(), all.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    // Average ranks over tie groups; accumulate the tie correction term.
    double rank_sum_a = 0.0;
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && all[j].first == all[i].first) ++j;
        const double t = static_cast<double>(j - i);
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (all[k].second == 0) rank_sum_a += avg_rank;
        tie_term += t * t * t - t;
        i = j;
    }

    const double dn = static_cast<double>(n);
    const double mu = static_cast<double>(na) * (dn + 1.0) / 2.0;
    const double var = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                       ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
    if (var <= 0.0) return 1.0;
    const double z = (rank_sum_a - mu) / std::sqrt(var);
    const double p = std::erfc(std::abs(z) / std::sqrt(2.0));
    return std::max(p, 1e-300);
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace topal

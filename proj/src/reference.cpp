#include "topal/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace topal::reference {

DistanceMatrix pairwise_distances(const Matrix& features) {
    const std::size_t n = features.rows(), m = features.cols();
    if (n < 2) throw std::invalid_argument("pairwise_distances: need at least 2 points");
    DistanceMatrix D(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t f = 0; f < m; ++f) {
                const double diff = features(i, f) - features(j, f);
                s += diff * diff;
            }
            D.at(i, j) = std::sqrt(s);
        }
    return D;
}

DensityEstimate estimate_density(const DistanceMatrix& D, std::size_t ell) {
    const std::size_t n = D.n;
    if (ell < 1 || ell > n - 1)
        throw std::invalid_argument("estimate_density: ell must be in [1, n-1]");
    DensityEstimate out;
    out.ell = ell;
    out.raw.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<double, std::size_t>> cand;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) cand.emplace_back(D(i, j), j);
        std::sort(cand.begin(), cand.end());
        double msq = 0.0;
        for (std::size_t k = 0; k < ell; ++k) msq += cand[k].first * cand[k].first;
        msq /= static_cast<double>(ell);
        out.raw[i] = msq > 0.0 ? 1.0 / std::sqrt(msq) : 1e12;
    }
    const auto [lo, hi] = std::minmax_element(out.raw.begin(), out.raw.end());
    const double range = *hi - *lo;
    out.normalized.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.normalized[i] = range > 0.0 ? (out.raw[i] - *lo) / range : 0.0;
    return out;
}

NeighborGraph build_sigma_rips(const DistanceMatrix& D, const DensityEstimate& dens,
                               const SigmaParams& p) {
    NeighborGraph g;
    g.n = D.n;
    g.adjacency.resize(D.n);
    g.kind = SigmaRipsKind{p};
    for (std::size_t i = 0; i < D.n; ++i)
        for (std::size_t j = 0; j < D.n; ++j) {
            if (j == i) continue;
            const double thr = sigma_threshold(p, dens.normalized[i], dens.normalized[j]);
            if (D(i, j) <= thr) g.adjacency[i].push_back(static_cast<std::uint32_t>(j));
        }
    return g;
}

double sil_size(const Clustering& clustering, const DistanceMatrix& D, double lambda) {
    const std::size_t n = clustering.assignment.size();
    const std::size_t k = clustering.k;
    const double penalty = lambda * static_cast<double>(k) / static_cast<double>(n);
    if (k == 1) return -penalty;

    const auto sizes = clustering.sizes();
    double macro = 0.0;
    for (std::size_t q = 0; q < k; ++q) {
        double cluster_mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (clustering.assignment[i] != q) continue;
            if (sizes[q] == 1) continue;  // singleton contributes 0
            double within = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (clustering.assignment[j] == q) within += D(i, j);
            within /= static_cast<double>(sizes[q] - 1);
            double nearest = std::numeric_limits<double>::infinity();
            for (std::size_t other = 0; other < k; ++other) {
                if (other == q) continue;
                double sum = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    if (clustering.assignment[j] == other) sum += D(i, j);
                nearest = std::min(nearest, sum / static_cast<double>(sizes[other]));
            }
            const double denom = std::max(within, nearest);
            if (denom > 0.0) cluster_mean += (nearest - within) / denom;
        }
        macro += cluster_mean / static_cast<double>(sizes[q]);
    }
    return macro / static_cast<double>(k) - penalty;
}

}  // namespace topal::reference

#include "topal/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace topal {

double purity_size(const Clustering& regions, const std::vector<int>& oracle_labels,
                   const DensityEstimate& dens) {
    const std::size_t n = regions.assignment.size();
    if (oracle_labels.size() != n || dens.raw.size() != n)
        throw std::invalid_argument("purity_size: size mismatch");

    // Density argmax per region, ties to the lowest index.
    std::vector<std::uint32_t> argmax(regions.k, UINT32_MAX);
    for (std::size_t i = 0; i < n; ++i) {
        auto& a = argmax[regions.assignment[i]];
        if (a == UINT32_MAX || dens.raw[i] > dens.raw[a]) a = static_cast<std::uint32_t>(i);
    }
    std::size_t errors = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (oracle_labels[argmax[regions.assignment[i]]] != oracle_labels[i]) ++errors;
    return (static_cast<double>(regions.k) + static_cast<double>(errors)) /
           static_cast<double>(n);
}

double sil_size(const Clustering& clustering, const DistanceMatrix& D, double lambda) {
    const std::size_t n = clustering.assignment.size();
    const std::size_t k = clustering.k;
    if (k < 1 || D.n != n) throw std::invalid_argument("sil_size: bad clustering");

    const double penalty = lambda * static_cast<double>(k) / static_cast<double>(n);
    if (k == 1) return 0.0 - penalty;

    const auto sizes = clustering.sizes();

    // Per-point values first, reduced serially in index order, so the result
    // does not depend on the thread count or scheduling.
    std::vector<double> point_sil(n, 0.0);
#pragma omp parallel
    {
        std::vector<double> dist_to(k);
#pragma omp for schedule(static)
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t ci = clustering.assignment[i];
            if (sizes[ci] == 1) continue;  // singleton silhouette is 0
            std::fill(dist_to.begin(), dist_to.end(), 0.0);
            for (std::size_t j = 0; j < n; ++j) dist_to[clustering.assignment[j]] += D(i, j);
            const double within =
                dist_to[ci] / static_cast<double>(sizes[ci] - 1);
            double nearest = std::numeric_limits<double>::infinity();
            for (std::size_t q = 0; q < k; ++q)
                if (q != ci)
                    nearest = std::min(nearest, dist_to[q] / static_cast<double>(sizes[q]));
            const double denom = std::max(within, nearest);
            if (denom > 0.0) point_sil[i] = (nearest - within) / denom;
        }
    }

    std::vector<double> cluster_sum(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) cluster_sum[clustering.assignment[i]] += point_sil[i];
    double macro = 0.0;
    for (std::size_t q = 0; q < k; ++q)
        macro += cluster_sum[q] / static_cast<double>(sizes[q]);
    return macro / static_cast<double>(k) - penalty;
}

namespace {

std::vector<std::vector<double>> centroids(const Clustering& c, const Matrix& X) {
    std::vector<std::vector<double>> mu(c.k, std::vector<double>(X.cols(), 0.0));
    const auto sizes = c.sizes();
    for (std::size_t i = 0; i < X.rows(); ++i) {
        auto& m = mu[c.assignment[i]];
        for (std::size_t f = 0; f < X.cols(); ++f) m[f] += X(i, f);
    }
    for (std::size_t q = 0; q < c.k; ++q) {
        if (sizes[q] == 0) throw std::invalid_argument("validity_score: empty cluster");
        for (auto& v : mu[q]) v /= static_cast<double>(sizes[q]);
    }
    return mu;
}

double dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t f = 0; f < a.size(); ++f) s += (a[f] - b[f]) * (a[f] - b[f]);
    return std::sqrt(s);
}

double dist_row(const Matrix& X, std::size_t i, const std::vector<double>& m) {
    double s = 0.0;
    for (std::size_t f = 0; f < X.cols(); ++f) s += (X(i, f) - m[f]) * (X(i, f) - m[f]);
    return std::sqrt(s);
}

}  // namespace

double validity_score(ValidityKind kind, const Clustering& c, const Dataset& d) {
    if (c.k < 2) throw std::invalid_argument("validity_score: need at least 2 clusters");
    const Matrix& X = d.features;
    const std::size_t n = X.rows();
    const auto sizes = c.sizes();
    const auto mu = centroids(c, X);

    if (kind == ValidityKind::calinski_harabasz) {
        std::vector<double> global(X.cols(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t f = 0; f < X.cols(); ++f) global[f] += X(i, f);
        for (auto& v : global) v /= static_cast<double>(n);

        double between = 0.0;
        for (std::size_t q = 0; q < c.k; ++q) {
            const double g = dist(mu[q], global);
            between += static_cast<double>(sizes[q]) * g * g;
        }
        double within = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double g = dist_row(X, i, mu[c.assignment[i]]);
            within += g * g;
        }
        if (within <= 0.0) return std::numeric_limits<double>::infinity();
        return (static_cast<double>(n - c.k) * between) /
               (static_cast<double>(c.k - 1) * within);
    }

    if (kind == ValidityKind::davies_bouldin) {
        std::vector<double> spread(c.k, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            spread[c.assignment[i]] += dist_row(X, i, mu[c.assignment[i]]);
        for (std::size_t q = 0; q < c.k; ++q) spread[q] /= static_cast<double>(sizes[q]);

        double total = 0.0;
        for (std::size_t q = 0; q < c.k; ++q) {
            double worst = 0.0;
            for (std::size_t j = 0; j < c.k; ++j) {
                if (j == q) continue;
                const double gap = dist(mu[q], mu[j]);
                if (gap <= 0.0)
                    throw std::invalid_argument("validity_score: zero centroid distance");
                worst = std::max(worst, (spread[q] + spread[j]) / gap);
            }
            total += worst;
        }
        return total / static_cast<double>(c.k);
    }

    // Dunn: min centroid gap over max cluster diameter.
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < c.k; ++q)
        for (std::size_t j = q + 1; j < c.k; ++j) min_gap = std::min(min_gap, dist(mu[q], mu[j]));
    double max_diameter = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (c.assignment[i] != c.assignment[j]) continue;
            double s = 0.0;
            for (std::size_t f = 0; f < X.cols(); ++f)
                s += (X(i, f) - X(j, f)) * (X(i, f) - X(j, f));
            max_diameter = std::max(max_diameter, std::sqrt(s));
        }
    if (max_diameter <= 0.0) throw std::invalid_argument("validity_score: zero max diameter");
    return min_gap / max_diameter;
}

}  // namespace topal

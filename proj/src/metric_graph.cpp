#include "topal/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "topal/union_find.hpp"

namespace topal {

namespace {
constexpr double kDensityCap = 1e12;
}

DistanceMatrix pairwise_distances(const Matrix& features) {
    const std::size_t n = features.rows(), m = features.cols();
    if (n < 2) throw std::invalid_argument("pairwise_distances: need at least 2 points");
    DistanceMatrix D(n);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        const auto ri = features.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const auto rj = features.row(j);
            double s = 0.0;
            for (std::size_t f = 0; f < m; ++f) {
                const double diff = ri[f] - rj[f];
                s += diff * diff;
            }
            D.at(i, j) = std::sqrt(s);
        }
    }
    return D;
}

DistanceMatrix pairwise_distances(const Dataset& d) { return pairwise_distances(d.features); }

std::size_t default_density_ell(std::size_t n) { return std::min<std::size_t>(n - 1, 2000); }

DensityEstimate estimate_density(const DistanceMatrix& D, std::size_t ell) {
    const std::size_t n = D.n;
    if (ell < 1 || ell > n - 1)
        throw std::invalid_argument("estimate_density: ell must be in [1, n-1]");

    DensityEstimate out;
    out.ell = ell;
    out.raw.resize(n);
    bool capped = false;

#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        // (distance, index) pairs, self excluded; lexicographic order breaks
        // ties at the ell-th neighbor by smallest index.
        std::vector<std::pair<double, std::uint32_t>> cand;
        cand.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) cand.emplace_back(D(i, j), static_cast<std::uint32_t>(j));
        std::nth_element(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(ell) - 1,
                         cand.end());
        double msq = 0.0;
        for (std::size_t k = 0; k < ell; ++k) msq += cand[k].first * cand[k].first;
        msq /= static_cast<double>(ell);
        if (msq <= 0.0) {
            out.raw[i] = kDensityCap;
#pragma omp critical
            capped = true;
        } else {
            out.raw[i] = 1.0 / std::sqrt(msq);
        }
    }
    if (capped)
        std::cerr << "warning: density capped at " << kDensityCap
                  << " for points with " << ell << " duplicate copies\n";

    const auto [lo_it, hi_it] = std::minmax_element(out.raw.begin(), out.raw.end());
    const double lo = *lo_it, range = *hi_it - *lo_it;
    out.normalized.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.normalized[i] = range > 0.0 ? (out.raw[i] - lo) / range : 0.0;
    return out;
}

double sigma_threshold(const SigmaParams& p, double pi, double pj) {
    const double mx = std::max(pi, pj);
    if (p.r <= mx)
        throw std::invalid_argument("sigma_threshold: r must exceed the max normalized density");
    return p.delta * std::pow(p.r - mx, 1.0 / p.t);
}

namespace {

// sigma(i,j) = min(s_i, s_j) with s_v = delta * (r - P(v))^(1/t), because
// the threshold is decreasing in the max of the two densities.
std::vector<double> per_vertex_sigma(const DensityEstimate& dens, const SigmaParams& p) {
    if (!(p.delta > 0.0) || !(p.t > 0.0 && p.t <= 1.0))
        throw std::invalid_argument("invalid SigmaParams");
    const double mx = *std::max_element(dens.normalized.begin(), dens.normalized.end());
    if (p.r <= mx)
        throw std::invalid_argument("SigmaParams: r must exceed the max normalized density");
    std::vector<double> s(dens.normalized.size());
    const double inv_t = 1.0 / p.t;
    for (std::size_t v = 0; v < s.size(); ++v)
        s[v] = p.delta * std::pow(p.r - dens.normalized[v], inv_t);
    return s;
}

template <class Threshold>
NeighborGraph build_graph(const DistanceMatrix& D, Threshold&& thr) {
    NeighborGraph g;
    g.n = D.n;
    g.adjacency.resize(D.n);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < D.n; ++i) {
        auto& adj = g.adjacency[i];
        for (std::size_t j = 0; j < D.n; ++j)
            if (j != i && D(i, j) <= thr(i, j)) adj.push_back(static_cast<std::uint32_t>(j));
    }
    return g;
}

Clustering components_from_uf(UnionFind& uf, std::size_t n) {
    Clustering c;
    c.assignment.resize(n);
    c.k = 0;
    std::vector<std::uint32_t> label(n, UINT32_MAX);
    for (std::size_t v = 0; v < n; ++v) {
        const std::size_t r = uf.find(v);
        if (label[r] == UINT32_MAX) label[r] = static_cast<std::uint32_t>(c.k++);
        c.assignment[v] = label[r];
    }
    return c;
}

}  // namespace

NeighborGraph build_rips(const DistanceMatrix& D, double delta) {
    if (delta < 0.0) throw std::invalid_argument("build_rips: delta must be >= 0");
    auto g = build_graph(D, [delta](std::size_t, std::size_t) { return delta; });
    g.kind = RipsKind{delta};
    return g;
}

NeighborGraph build_sigma_rips(const DistanceMatrix& D, const DensityEstimate& dens,
                               const SigmaParams& p) {
    if (dens.normalized.size() != D.n)
        throw std::invalid_argument("build_sigma_rips: density size mismatch");
    const auto s = per_vertex_sigma(dens, p);
    auto g = build_graph(D, [&s](std::size_t i, std::size_t j) { return std::min(s[i], s[j]); });
    g.kind = SigmaRipsKind{p};
    return g;
}

DistanceMatrix dhat_distance(const DistanceMatrix& D, const DensityEstimate& dens,
                             const SigmaParams& p) {
    const auto s = per_vertex_sigma(dens, p);
    DistanceMatrix out(D.n);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < D.n; ++i)
        for (std::size_t j = 0; j < D.n; ++j)
            if (j != i) out.at(i, j) = p.delta * D(i, j) / std::min(s[i], s[j]);
    return out;
}

Clustering connected_components(const NeighborGraph& g) {
    UnionFind uf(g.n);
    for (std::size_t i = 0; i < g.n; ++i)
        for (auto j : g.adjacency[i])
            if (j > i) uf.unite(i, j);
    return components_from_uf(uf, g.n);
}

Clustering sigma_rips_components(const DistanceMatrix& D, const DensityEstimate& dens,
                                 const SigmaParams& p) {
    const auto s = per_vertex_sigma(dens, p);
    UnionFind uf(D.n);
    for (std::size_t i = 0; i < D.n; ++i) {
        const double si = s[i];
        for (std::size_t j = i + 1; j < D.n; ++j)
            if (D(i, j) <= std::min(si, s[j])) uf.unite(i, j);
    }
    return components_from_uf(uf, D.n);
}

Clustering rips_components(const DistanceMatrix& D, double delta) {
    UnionFind uf(D.n);
    for (std::size_t i = 0; i < D.n; ++i)
        for (std::size_t j = i + 1; j < D.n; ++j)
            if (D(i, j) <= delta) uf.unite(i, j);
    return components_from_uf(uf, D.n);
}

bool has_giant_component(const Clustering& c, std::size_t n) {
    const auto sizes = c.sizes();
    const std::size_t largest = *std::max_element(sizes.begin(), sizes.end());
    return n >= 10 && static_cast<double>(largest) >= 0.99 * static_cast<double>(n);
}

bool is_degenerate_clustering(const Clustering& c, std::size_t n) {
    if (has_giant_component(c, n)) return true;
    const auto sizes = c.sizes();
    const std::size_t min_allowed =
        std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil(0.01 * static_cast<double>(n))));
    for (auto s : sizes)
        if (s < min_allowed) return true;
    return false;
}

bool is_degenerate(const NeighborGraph& g) {
    return is_degenerate_clustering(connected_components(g), g.n);
}

void fill_roots(Clustering& c, const DensityEstimate& dens) {
    c.roots.assign(c.k, UINT32_MAX);
    for (std::size_t v = 0; v < c.assignment.size(); ++v) {
        auto& r = c.roots[c.assignment[v]];
        if (r == UINT32_MAX || dens.raw[v] > dens.raw[r]) r = static_cast<std::uint32_t>(v);
    }
}

void dump_edge_list(const NeighborGraph& g, const DistanceMatrix& D, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write edge list: " + path);
    for (std::size_t i = 0; i < g.n; ++i)
        for (auto j : g.adjacency[i])
            if (j > i) out << i << " " << j << " " << D(i, j) << "\n";
}

}  // namespace topal

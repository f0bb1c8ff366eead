#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "topal/dataset.hpp"
#include "topal/matrix.hpp"

namespace topal {

/// Density estimate over a point set: inverse root-mean-squared distance to
/// the ell nearest neighbors (self excluded), plus its min-max rescaling.
struct DensityEstimate {
    std::vector<double> raw;         // strictly positive (capped for duplicates)
    std::vector<double> normalized;  // min-max rescale of raw to [0,1]
    std::size_t ell = 0;
};

/// Parameters of the adaptive threshold
///   sigma(x, x') = delta * (r - max(P(x), P(x')))^(1/t).
struct SigmaParams {
    double delta = 1.0;  // dilatation, > 0
    double r = 1.5;      // translation, > max normalized density
    double t = 1.0;      // temperature in (0, 1]
};

struct RipsKind {
    double delta = 0.0;
};
struct SigmaRipsKind {
    SigmaParams params;
};

/// Undirected neighborhood graph with per-vertex sorted adjacency.
struct NeighborGraph {
    std::size_t n = 0;
    std::vector<std::vector<std::uint32_t>> adjacency;
    std::variant<RipsKind, SigmaRipsKind> kind;

    std::size_t edge_count() const {
        std::size_t s = 0;
        for (const auto& a : adjacency) s += a.size();
        return s / 2;
    }
};

/// Vertex partition, also used for ToMATo output. Cluster ids are 0-based
/// and contiguous; roots (when present) hold each cluster's density argmax.
struct Clustering {
    std::vector<std::uint32_t> assignment;
    std::size_t k = 0;
    std::vector<std::uint32_t> roots;  // may be empty for plain components

    std::vector<std::size_t> sizes() const {
        std::vector<std::size_t> s(k, 0);
        for (auto c : assignment) ++s[c];
        return s;
    }
};

/// Exact Euclidean pairwise distances. Row-parallel.
DistanceMatrix pairwise_distances(const Dataset& d);
DistanceMatrix pairwise_distances(const Matrix& features);

/// Eq.-(8)-style density: raw(i) = (mean squared distance to the ell nearest
/// neighbors of i, self excluded)^(-1/2). Ties at the ell-th neighbor break
/// by smallest index. A point with ell duplicates gets a large finite cap.
DensityEstimate estimate_density(const DistanceMatrix& D, std::size_t ell);

/// ell rule used by the experiment harness: min(n-1, 2000).
std::size_t default_density_ell(std::size_t n);

/// sigma(x_i, x_j) for normalized densities pi, pj. Throws if r <= max(pi,pj).
double sigma_threshold(const SigmaParams& p, double pi, double pj);

/// Rips graph: edge (i,j) iff d(i,j) <= delta.
NeighborGraph build_rips(const DistanceMatrix& D, double delta);

/// Sigma-Rips graph: edge (i,j) iff d(i,j) <= sigma(x_i, x_j).
NeighborGraph build_sigma_rips(const DistanceMatrix& D, const DensityEstimate& dens,
                               const SigmaParams& p);

/// The non-metric rescaling dhat(i,j) = delta * d(i,j) / sigma(x_i, x_j);
/// a Rips graph at threshold delta on dhat has the sigma-Rips edge set.
DistanceMatrix dhat_distance(const DistanceMatrix& D, const DensityEstimate& dens,
                             const SigmaParams& p);

Clustering connected_components(const NeighborGraph& g);

/// Connected components computed straight from the edge rule, without
/// materializing adjacency. Used by the stage-1 objective hot loop.
Clustering sigma_rips_components(const DistanceMatrix& D, const DensityEstimate& dens,
                                 const SigmaParams& p);
Clustering rips_components(const DistanceMatrix& D, double delta);

/// Degenerate iff the largest component holds >= 99% of vertices (n >= 10)
/// or any component is smaller than max(3, ceil(0.01 n)).
bool is_degenerate(const NeighborGraph& g);
bool is_degenerate_clustering(const Clustering& c, std::size_t n);

/// The giant-component half of the degeneracy rule on its own. The region
/// optimizer's line search stops on this condition: silhouette optima
/// routinely keep a tiny outlier clump alive, so the small-component rule
/// would abort the search immediately at the fragmented low-lambda end.
bool has_giant_component(const Clustering& c, std::size_t n);

/// Fills roots with each cluster's density argmax (ties to lowest index).
void fill_roots(Clustering& c, const DensityEstimate& dens);

/// Debug dump, one "i j distance" line per edge (i < j).
void dump_edge_list(const NeighborGraph& g, const DistanceMatrix& D, const std::string& path);

}  // namespace topal

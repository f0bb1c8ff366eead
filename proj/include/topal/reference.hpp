#pragma once

#include "topal/matrix.hpp"
#include "topal/metric_graph.hpp"

namespace topal::reference {

/// Serial, definition-level implementations of the parallel kernels. They
/// are kept as the comparison baseline for the tests and the benchmark and
/// must stay independent of the optimized code paths.

/// Plain double loop over all pairs and features.
DistanceMatrix pairwise_distances(const Matrix& features);

/// Full sort of each row's neighbor distances.
DensityEstimate estimate_density(const DistanceMatrix& D, std::size_t ell);

/// Edge rule evaluated pairwise through sigma_threshold, no per-vertex
/// precomputation.
NeighborGraph build_sigma_rips(const DistanceMatrix& D, const DensityEstimate& dens,
                               const SigmaParams& p);

/// Per-definition silhouette term of SilSize, one point at a time.
double sil_size(const Clustering& clustering, const DistanceMatrix& D, double lambda);

}  // namespace topal::reference

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topal/active.hpp"
#include "topal/dataset.hpp"
#include "topal/matrix.hpp"

namespace topal {

enum class ColdStart { rs, km, km_me, kmedoids, ahc, fft, apc, ptr };

ColdStart coldstart_from_name(const std::string& name);
std::string coldstart_name(ColdStart m);

/// Initial labeled set plus optional synthetic training rows (used by the
/// "model examples" variant, which trains on centroids carrying the label
/// queried for the nearest real point).
struct ColdstartResult {
    LabeledPool pool;
    Matrix extra_features;        // 0 rows unless synthetic examples exist
    std::vector<int> extra_labels;
};

/// Unsupervised cold-start baselines. Every mode spends exactly B distinct
/// oracle queries and does no propagation. The distance matrix is required
/// by the medoid/linkage/exemplar methods and must match the pool.
ColdstartResult coldstart_init(ColdStart method, const Dataset& pool, const DistanceMatrix& D,
                               std::size_t budget, Oracle& oracle, std::uint64_t seed);

// Building blocks, exposed for testing.

/// Lloyd k-means with k-means++ seeding; returns the centroids.
Matrix kmeans_centroids(const Matrix& X, std::size_t k, std::uint64_t seed,
                        std::size_t max_iters = 100);

/// PAM (BUILD + SWAP) medoid indices, ties broken deterministically.
std::vector<std::size_t> pam_medoids(const DistanceMatrix& D, std::size_t k);

/// Ward-linkage agglomeration cut at k clusters (Lance-Williams update).
std::vector<std::uint32_t> ward_clusters(const DistanceMatrix& D, std::size_t k);

/// Farthest-first traversal of the pool. When start is empty, the traversal
/// begins at the point nearest the pool centroid.
std::vector<std::size_t> farthest_first(const Matrix& X, std::size_t count,
                                        std::optional<std::size_t> start = std::nullopt);

/// Affinity propagation exemplars at a fixed preference.
std::vector<std::size_t> affinity_propagation(const DistanceMatrix& D, double preference,
                                              std::uint64_t seed, std::size_t max_iters = 200,
                                              double damping = 0.7,
                                              std::vector<std::uint32_t>* assignment = nullptr);

}  // namespace topal

#pragma once

#include <vector>

#include "topal/dataset.hpp"
#include "topal/matrix.hpp"
#include "topal/metric_graph.hpp"

namespace topal {

/// PuritySize: k/n plus the error rate of propagating each region's density
/// argmax label to the whole region. Lies in [0,1]; smaller is better.
double purity_size(const Clustering& regions, const std::vector<int>& oracle_labels,
                   const DensityEstimate& dens);

/// SilSize: macro-averaged silhouette minus lambda * k / n. Silhouette of a
/// singleton cluster is 0; with a single cluster the silhouette term is 0.
double sil_size(const Clustering& clustering, const DistanceMatrix& D, double lambda);

enum class ValidityKind { calinski_harabasz, davies_bouldin, dunn };

/// Cluster validity indices on the dataset's feature space. Requires k >= 2
/// and no empty cluster; throws on degenerate geometry (zero centroid gap
/// for Davies-Bouldin, zero max diameter for Dunn).
double validity_score(ValidityKind kind, const Clustering& clustering, const Dataset& d);

}  // namespace topal

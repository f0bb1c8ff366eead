#pragma once

#include "topal/metric_graph.hpp"
#include "topal/persistence.hpp"

namespace topal {

struct TomatoResult {
    Clustering clustering;
    PersistenceDiagram diagram;
    double tau = 0.0;
};

/// Mode-seeking clustering on a neighborhood graph: density hill climbing
/// plus prominence-threshold merging.
///
/// Vertices are swept in decreasing density (ties by lower index). A vertex
/// with no higher neighbor founds a cluster; otherwise it joins its highest
/// density neighbor's cluster. When a vertex bridges clusters, every bridged
/// cluster whose peak density minus the current level is strictly below tau
/// merges into the bridged cluster with the highest peak. The diagram in the
/// result is the plain elder-rule diagram of the same inputs; merging does
/// not alter persistence pairs.
TomatoResult tomato_cluster(const NeighborGraph& g, const DensityEstimate& dens, double tau);

}  // namespace topal

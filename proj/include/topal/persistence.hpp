#pragma once

#include <limits>
#include <string>
#include <vector>

#include "topal/matrix.hpp"
#include "topal/metric_graph.hpp"

namespace topal {

/// One birth/death pair of the superlevel-set filtration. Time flows from
/// +infinity down, so birth >= death; death is -infinity for the component
/// that survives to the end of the filtration.
struct DiagramPoint {
    double birth = 0.0;
    double death = 0.0;

    bool essential() const { return death == -std::numeric_limits<double>::infinity(); }
};

/// Prominence of a diagram point (infinite for essential points).
inline double prominence(const DiagramPoint& p) { return p.birth - p.death; }

struct PersistenceDiagram {
    std::vector<DiagramPoint> points;

    std::size_t essential_count() const {
        std::size_t c = 0;
        for (const auto& p : points)
            if (p.essential()) ++c;
        return c;
    }
    std::vector<DiagramPoint> finite_points() const {
        std::vector<DiagramPoint> out;
        for (const auto& p : points)
            if (!p.essential()) out.push_back(p);
        return out;
    }
};

/// Appearance levels alpha(i,j): the highest filtration level at which i and
/// j share a connected component; equivalently max over paths of the minimum
/// density along the path. Zero for cross-component pairs; alpha(i,i) is the
/// density of i.
struct AppearanceLevels {
    std::size_t n = 0;
    std::vector<double> values;  // n*n

    double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * n + j]; }
};

/// 0-dimensional persistence of the upper-star filtration of dens over g.
/// Vertices are swept in decreasing density (ties broken by lower index
/// counting as higher); on a merge the component with the younger peak dies
/// at the current level (elder rule). Zero-persistence pairs are dropped.
PersistenceDiagram upper_star_diagram(const NeighborGraph& g, const DensityEstimate& dens);

/// Exact bottleneck distance. Essential points are matched among themselves
/// by birth (infinite distance if the counts differ); finite points may be
/// matched to the diagonal. Feasibility is decided by augmenting-path
/// matching over the exact candidate threshold set.
double bottleneck_distance(const PersistenceDiagram& A, const PersistenceDiagram& B);

AppearanceLevels appearance_levels(const NeighborGraph& g, const DensityEstimate& dens);

/// max |alpha_A(i,j) - alpha_B(i,j)| over all vertex pairs. Throws if the
/// two graphs do not induce the same component partition.
double interleaving_gap(const NeighborGraph& gA, const NeighborGraph& gB,
                        const DensityEstimate& dens);

/// CSV dump, one "birth,death" row per point ("-inf" for essential deaths).
void dump_diagram_csv(const PersistenceDiagram& d, const std::string& path);

}  // namespace topal

#include "topal/tomato.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "topal/union_find.hpp"

namespace topal {

TomatoResult tomato_cluster(const NeighborGraph& g, const DensityEstimate& dens, double tau) {
    if (tau < 0.0) throw std::invalid_argument("tomato_cluster: tau must be >= 0");
    if (dens.raw.size() != g.n)
        throw std::invalid_argument("tomato_cluster: density size mismatch");

    const std::size_t n = g.n;
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (dens.raw[a] != dens.raw[b]) return dens.raw[a] > dens.raw[b];
        return a < b;
    });
    std::vector<std::uint32_t> rank(n);
    for (std::size_t k = 0; k < n; ++k) rank[order[k]] = static_cast<std::uint32_t>(k);

    UnionFind uf(n);
    std::vector<std::uint32_t> peak(n);
    std::iota(peak.begin(), peak.end(), 0);
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> bridged;  // scratch: distinct roots at the current vertex

    for (auto v : order) {
        seen[v] = true;
        // Highest-density processed neighbor; ties to the lowest index.
        std::uint32_t best = UINT32_MAX;
        for (auto u : g.adjacency[v])
            if (seen[u] && (best == UINT32_MAX || rank[u] < rank[best])) best = u;
        if (best == UINT32_MAX) continue;  // founds its own cluster

        const std::size_t root_best = uf.find(best);
        const std::uint32_t cluster_peak = peak[root_best];
        const std::size_t attached = uf.unite(v, root_best);
        peak[attached] = cluster_peak;

        bridged.clear();
        bridged.push_back(uf.find(v));
        for (auto u : g.adjacency[v]) {
            if (!seen[u]) continue;
            const std::size_t r = uf.find(u);
            if (std::find(bridged.begin(), bridged.end(), r) == bridged.end())
                bridged.push_back(r);
        }
        if (bridged.size() < 2) continue;

        // Merge target: the bridged cluster with the highest peak.
        std::size_t target = bridged[0];
        for (std::size_t r : bridged)
            if (rank[peak[r]] < rank[peak[target]]) target = r;
        const double level = dens.raw[v];
        const std::uint32_t target_peak = peak[target];
        for (std::size_t r : bridged) {
            if (r == target) continue;
            if (dens.raw[peak[r]] - level < tau) {
                const std::size_t nr = uf.unite(r, target);
                peak[nr] = target_peak;
                target = nr;
            }
        }
    }

    TomatoResult result;
    result.tau = tau;
    auto& c = result.clustering;
    c.assignment.resize(n);
    std::vector<std::uint32_t> label(n, UINT32_MAX);
    for (std::size_t v = 0; v < n; ++v) {
        const std::size_t r = uf.find(v);
        if (label[r] == UINT32_MAX) {
            label[r] = static_cast<std::uint32_t>(c.k++);
            c.roots.push_back(peak[r]);
        }
        c.assignment[v] = label[r];
    }
    result.diagram = upper_star_diagram(g, dens);
    return result;
}

}  // namespace topal

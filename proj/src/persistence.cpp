#include "topal/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "topal/union_find.hpp"

namespace topal {

namespace {

// Sweep order of the upper-star filtration: decreasing density, ties broken
// by lower vertex index (treated as higher).
std::vector<std::uint32_t> sweep_order(const DensityEstimate& dens, std::size_t n) {
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (dens.raw[a] != dens.raw[b]) return dens.raw[a] > dens.raw[b];
        return a < b;
    });
    return order;
}

}  // namespace

PersistenceDiagram upper_star_diagram(const NeighborGraph& g, const DensityEstimate& dens) {
    const std::size_t n = g.n;
    if (dens.raw.size() != n)
        throw std::invalid_argument("upper_star_diagram: density size mismatch");

    const auto order = sweep_order(dens, n);
    std::vector<std::uint32_t> rank(n);
    for (std::size_t k = 0; k < n; ++k) rank[order[k]] = static_cast<std::uint32_t>(k);

    UnionFind uf(n);
    // peak[root] = the component's oldest vertex (lowest rank).
    std::vector<std::uint32_t> peak(n);
    std::iota(peak.begin(), peak.end(), 0);
    std::vector<bool> seen(n, false);

    PersistenceDiagram diagram;
    for (auto v : order) {
        seen[v] = true;
        const double level = dens.raw[v];
        for (auto u : g.adjacency[v]) {
            if (!seen[u]) continue;
            std::size_t rv = uf.find(v), ru = uf.find(u);
            if (rv == ru) continue;
            std::uint32_t pv = peak[rv], pu = peak[ru];
            // Elder rule: the younger peak's component dies at the current level.
            if (rank[pu] < rank[pv]) std::swap(pv, pu);  // pv = elder
            if (dens.raw[pu] > level)
                diagram.points.push_back({dens.raw[pu], level});
            const std::size_t nr = uf.unite(rv, ru);
            peak[nr] = pv;
        }
    }
    std::vector<bool> root_done(n, false);
    for (std::size_t v = 0; v < n; ++v) {
        const std::size_t r = uf.find(v);
        if (!root_done[r]) {
            root_done[r] = true;
            diagram.points.push_back(
                {dens.raw[peak[r]], -std::numeric_limits<double>::infinity()});
        }
    }
    return diagram;
}

namespace {

double linf(const DiagramPoint& a, const DiagramPoint& b) {
    return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

// Distance from a finite point to its diagonal projection.
double diag_cost(const DiagramPoint& p) { return (p.birth - p.death) / 2.0; }

// Kuhn's augmenting-path bipartite matching on an adjacency oracle.
class BipartiteMatcher {
public:
    BipartiteMatcher(std::size_t left, std::size_t right) : nl_(left), match_r_(right, SIZE_MAX) {}

    template <class EdgeFn>
    bool perfect(EdgeFn&& edge) {
        std::vector<std::size_t> match_l(nl_, SIZE_MAX);
        std::fill(match_r_.begin(), match_r_.end(), SIZE_MAX);
        for (std::size_t u = 0; u < nl_; ++u) {
            std::vector<bool> visited(match_r_.size(), false);
            if (!augment(u, edge, visited, match_l)) return false;
        }
        return true;
    }

private:
    template <class EdgeFn>
    bool augment(std::size_t u, EdgeFn& edge, std::vector<bool>& visited,
                 std::vector<std::size_t>& match_l) {
        for (std::size_t v = 0; v < match_r_.size(); ++v) {
            if (visited[v] || !edge(u, v)) continue;
            visited[v] = true;
            if (match_r_[v] == SIZE_MAX || augment(match_r_[v], edge, visited, match_l)) {
                match_l[u] = v;
                match_r_[v] = u;
                return true;
            }
        }
        return false;
    }

    std::size_t nl_;
    std::vector<std::size_t> match_r_;
};

// Bottleneck over the finite parts: left side is A + diagonal slots for B,
// right side is B + diagonal slots for A; diagonal-to-diagonal is free.
double finite_bottleneck(const std::vector<DiagramPoint>& A, const std::vector<DiagramPoint>& B) {
    const std::size_t na = A.size(), nb = B.size();
    if (na == 0 && nb == 0) return 0.0;

    std::vector<double> candidates{0.0};
    for (const auto& a : A) candidates.push_back(diag_cost(a));
    for (const auto& b : B) candidates.push_back(diag_cost(b));
    for (const auto& a : A)
        for (const auto& b : B) candidates.push_back(linf(a, b));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    const std::size_t total = na + nb;
    auto feasible = [&](double eps) {
        BipartiteMatcher m(total, total);
        // left u: u < na -> A[u], else diagonal slot of B[u - na]
        // right v: v < nb -> B[v], else diagonal slot of A[v - nb]
        return m.perfect([&](std::size_t u, std::size_t v) {
            const bool u_real = u < na, v_real = v < nb;
            if (u_real && v_real) return linf(A[u], B[v]) <= eps;
            if (u_real && !v_real) return u == v - nb && diag_cost(A[u]) <= eps;
            if (!u_real && v_real) return v == u - na && diag_cost(B[v]) <= eps;
            return true;
        });
    };

    std::size_t lo = 0, hi = candidates.size() - 1;
    if (feasible(candidates[lo])) return candidates[lo];
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (feasible(candidates[mid]) ? hi : lo) = mid;
    }
    return candidates[hi];
}

}  // namespace

double bottleneck_distance(const PersistenceDiagram& A, const PersistenceDiagram& B) {
    std::vector<double> births_a, births_b;
    std::vector<DiagramPoint> fin_a, fin_b;
    for (const auto& p : A.points) {
        if (p.essential())
            births_a.push_back(p.birth);
        else
            fin_a.push_back(p);
    }
    for (const auto& p : B.points) {
        if (p.essential())
            births_b.push_back(p.birth);
        else
            fin_b.push_back(p);
    }

    if (births_a.size() != births_b.size())
        return std::numeric_limits<double>::infinity();

    // Essential points pair up in birth order, which minimizes the max gap.
    std::sort(births_a.begin(), births_a.end());
    std::sort(births_b.begin(), births_b.end());
    double essential_part = 0.0;
    for (std::size_t i = 0; i < births_a.size(); ++i)
        essential_part = std::max(essential_part, std::abs(births_a[i] - births_b[i]));

    return std::max(essential_part, finite_bottleneck(fin_a, fin_b));
}

AppearanceLevels appearance_levels(const NeighborGraph& g, const DensityEstimate& dens) {
    const std::size_t n = g.n;
    AppearanceLevels alpha;
    alpha.n = n;
    alpha.values.assign(n * n, 0.0);
    for (std::size_t v = 0; v < n; ++v) alpha.at(v, v) = dens.raw[v];

    const auto order = sweep_order(dens, n);
    std::vector<std::uint32_t> rank(n);
    for (std::size_t k = 0; k < n; ++k) rank[order[k]] = static_cast<std::uint32_t>(k);

    UnionFind uf(n);
    std::vector<std::vector<std::uint32_t>> members(n);
    for (std::size_t v = 0; v < n; ++v) members[v] = {static_cast<std::uint32_t>(v)};
    std::vector<bool> seen(n, false);

    for (auto v : order) {
        seen[v] = true;
        const double level = dens.raw[v];
        for (auto u : g.adjacency[v]) {
            if (!seen[u]) continue;
            std::size_t rv = uf.find(v), ru = uf.find(u);
            if (rv == ru) continue;
            // Every pair joined through v first shares a component at this level.
            for (auto a : members[rv])
                for (auto b : members[ru]) {
                    alpha.at(a, b) = level;
                    alpha.at(b, a) = level;
                }
            if (members[rv].size() < members[ru].size()) std::swap(rv, ru);
            auto moved = std::move(members[ru]);
            members[ru].clear();
            const std::size_t nr = uf.unite(rv, ru);
            if (nr != rv) members[rv].swap(members[nr]);
            auto& dst = members[nr];
            dst.insert(dst.end(), moved.begin(), moved.end());
        }
    }
    return alpha;
}

double interleaving_gap(const NeighborGraph& gA, const NeighborGraph& gB,
                        const DensityEstimate& dens) {
    if (gA.n != gB.n) throw std::invalid_argument("interleaving_gap: vertex sets differ");
    const auto ca = connected_components(gA);
    const auto cb = connected_components(gB);
    // Same partition iff the assignment vectors agree up to relabeling; both
    // use first-seen labeling over the same vertex order, so equality works.
    if (ca.k != cb.k || ca.assignment != cb.assignment)
        throw std::invalid_argument(
            "interleaving_gap: graphs do not share connected components");

    const auto alpha_a = appearance_levels(gA, dens);
    const auto alpha_b = appearance_levels(gB, dens);
    double gap = 0.0;
    for (std::size_t i = 0; i < gA.n; ++i)
        for (std::size_t j = i + 1; j < gA.n; ++j)
            gap = std::max(gap, std::abs(alpha_a(i, j) - alpha_b(i, j)));
    return gap;
}

void dump_diagram_csv(const PersistenceDiagram& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write diagram: " + path);
    out << "birth,death\n";
    for (const auto& p : d.points) {
        out << p.birth << ",";
        if (p.essential())
            out << "-inf\n";
        else
            out << p.death << "\n";
    }
}

}  // namespace topal

#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

namespace topal {

/// Disjoint-set forest with union by size and path compression.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1), groups_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    /// Merges the sets of a and b; returns the surviving root.
    /// The caller may not rely on which side survives.
    std::size_t unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return a;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        --groups_;
        return a;
    }

    bool same(std::size_t a, std::size_t b) { return find(a) == find(b); }
    std::size_t group_count() const { return groups_; }
    std::size_t size_of(std::size_t x) { return size_[find(x)]; }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
    std::size_t groups_;
};

}  // namespace topal

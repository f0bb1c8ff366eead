#pragma once

#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "topal/dataset.hpp"
#include "topal/matrix.hpp"
#include "topal/metric_graph.hpp"
#include "topal/rng.hpp"

namespace fixtures {

struct Blob {
    double cx, cy;
    double sigma;
    std::size_t count;
    int label;
};

/// Isotropic 2-D Gaussian blobs; features are NOT renormalized so geometry
/// stays exactly as specified.
inline topal::Dataset make_blobs(const std::vector<Blob>& blobs, std::uint64_t seed) {
    std::size_t n = 0;
    for (const auto& b : blobs) n += b.count;
    topal::Dataset d;
    d.name = "blobs";
    d.features = topal::Matrix(n, 2);
    d.labels.reserve(n);
    auto rng = topal::make_rng(topal::mix_seed(seed, 0xb10bull));
    std::normal_distribution<double> gauss;
    std::size_t row = 0;
    int max_label = 0;
    for (const auto& b : blobs) {
        for (std::size_t i = 0; i < b.count; ++i, ++row) {
            d.features(row, 0) = b.cx + b.sigma * gauss(rng);
            d.features(row, 1) = b.cy + b.sigma * gauss(rng);
            d.labels.push_back(b.label);
        }
        max_label = std::max(max_label, b.label);
    }
    d.class_count = max_label;
    return d;
}

/// The 240-point two-Gaussian sample: a dense mode and a sparse mode, well
/// separated.
inline topal::Dataset two_gaussians(std::uint64_t seed) {
    return make_blobs({{0.0, 0.0, 0.10, 120, 1}, {1.4, 0.0, 0.32, 120, 2}}, seed);
}

/// Fixture for threshold-rule comparisons: a dense truncated blob next to a
/// filament whose tail spacing (0.3) exceeds the cross gap (~0.22). Any
/// constant threshold either fragments the tail or bridges the classes; an
/// adaptive density-dependent threshold can do both jobs at once.
inline topal::Dataset threshold_fixture(std::uint64_t seed) {
    topal::Dataset d;
    d.name = "threshold_fixture";
    d.class_count = 2;
    auto rng = topal::make_rng(topal::mix_seed(seed, 0xf11aull));
    std::normal_distribution<double> gauss;

    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 140; ++i) {
        double x, y;
        do {
            x = 0.08 * gauss(rng);
            y = 0.08 * gauss(rng);
        } while (x * x + y * y > 2.2 * 2.2 * 0.08 * 0.08);
        pts.emplace_back(x, y);
        d.labels.push_back(1);
    }
    std::normal_distribution<double> jitter(0.0, 0.012);
    double x = 0.42;
    for (int i = 0; i < 45; ++i) {  // tight inner run
        pts.emplace_back(x + jitter(rng), jitter(rng));
        d.labels.push_back(2);
        x += 0.03;
    }
    for (int i = 0; i < 15; ++i) {  // widely spaced tail
        x += 0.30;
        pts.emplace_back(x + jitter(rng), jitter(rng));
        d.labels.push_back(2);
    }
    d.features = topal::Matrix(pts.size(), 2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        d.features(i, 0) = pts[i].first;
        d.features(i, 1) = pts[i].second;
    }
    return d;
}

/// Density over the two-Gaussian fixture at a locality that makes both modes
/// visible (the harness-scale ell rule is deliberately not used here).
inline std::size_t fixture_ell() { return 20; }

inline topal::NeighborGraph random_graph(std::size_t n, double edge_prob, std::mt19937_64& rng) {
    topal::NeighborGraph g;
    g.n = n;
    g.adjacency.resize(n);
    std::bernoulli_distribution coin(edge_prob);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (coin(rng)) {
                g.adjacency[i].push_back(static_cast<std::uint32_t>(j));
                g.adjacency[j].push_back(static_cast<std::uint32_t>(i));
            }
    return g;
}

inline topal::DensityEstimate random_density(std::size_t n, std::mt19937_64& rng) {
    topal::DensityEstimate dens;
    dens.ell = 1;
    dens.raw.resize(n);
    std::uniform_real_distribution<double> uni(0.05, 1.0);
    for (auto& v : dens.raw) v = uni(rng);
    const auto [lo, hi] = std::minmax_element(dens.raw.begin(), dens.raw.end());
    const double range = *hi - *lo;
    dens.normalized.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        dens.normalized[i] = range > 0.0 ? (dens.raw[i] - *lo) / range : 0.0;
    return dens;
}

inline topal::DensityEstimate density_from(std::vector<double> raw) {
    topal::DensityEstimate dens;
    dens.ell = 1;
    dens.raw = std::move(raw);
    const auto [lo, hi] = std::minmax_element(dens.raw.begin(), dens.raw.end());
    const double range = *hi - *lo;
    dens.normalized.resize(dens.raw.size());
    for (std::size_t i = 0; i < dens.raw.size(); ++i)
        dens.normalized[i] = range > 0.0 ? (dens.raw[i] - *lo) / range : 0.0;
    return dens;
}

/// Path graph v0 - v1 - ... - v(n-1).
inline topal::NeighborGraph path_graph(std::size_t n) {
    topal::NeighborGraph g;
    g.n = n;
    g.adjacency.resize(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        g.adjacency[i].push_back(static_cast<std::uint32_t>(i + 1));
        g.adjacency[i + 1].push_back(static_cast<std::uint32_t>(i));
    }
    return g;
}

inline void write_csv(const std::string& path, const topal::Matrix& X,
                      const std::vector<int>& labels) {
    std::ofstream out(path);
    for (std::size_t f = 0; f < X.cols(); ++f) out << "f" << f << ",";
    out << "class\n";
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t f = 0; f < X.cols(); ++f) out << X(i, f) << ",";
        out << labels[i] << "\n";
    }
}

/// 1-D points as a one-feature matrix.
inline topal::Matrix points_1d(const std::vector<double>& xs) {
    topal::Matrix X(xs.size(), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) X(i, 0) = xs[i];
    return X;
}

inline topal::Matrix points_2d(const std::vector<std::pair<double, double>>& ps) {
    topal::Matrix X(ps.size(), 2);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        X(i, 0) = ps[i].first;
        X(i, 1) = ps[i].second;
    }
    return X;
}

}  // namespace fixtures

// Compares the OpenMP kernels against their serial reference
// implementations: same outputs, wall-clock side by side.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "topal/metric_graph.hpp"
#include "topal/objectives.hpp"
#include "topal/reference.hpp"
#include "topal/rng.hpp"

using namespace topal;

namespace {

double ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

template <class Fn>
double time_ms(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return ms(t0);
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t n = 1500;
    if (argc > 1) n = static_cast<std::size_t>(std::atol(argv[1]));
    const std::size_t m = 8;

    auto rng = make_rng(12345);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Matrix X(n, m);
    for (auto& v : X.data()) v = uni(rng);

    std::printf("kernel benchmark, n=%zu m=%zu\n", n, m);
    std::printf("%-22s %12s %12s %10s %8s\n", "kernel", "serial_ms", "parallel_ms", "speedup",
                "match");

    DistanceMatrix D_serial, D;
    const double t_dist_s = time_ms([&] { D_serial = reference::pairwise_distances(X); });
    const double t_dist_p = time_ms([&] { D = pairwise_distances(X); });
    double max_err = 0.0;
    for (std::size_t i = 0; i < n * n; ++i)
        max_err = std::max(max_err, std::abs(D.values[i] - D_serial.values[i]));
    std::printf("%-22s %12.1f %12.1f %9.2fx %8s\n", "pairwise_distances", t_dist_s, t_dist_p,
                t_dist_s / t_dist_p, max_err < 1e-12 ? "yes" : "NO");

    DensityEstimate dens_serial, dens;
    const std::size_t ell = std::min<std::size_t>(n - 1, 64);
    const double t_dens_s = time_ms([&] { dens_serial = reference::estimate_density(D, ell); });
    const double t_dens_p = time_ms([&] { dens = estimate_density(D, ell); });
    max_err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        max_err = std::max(max_err, std::abs(dens.raw[i] - dens_serial.raw[i]));
    std::printf("%-22s %12.1f %12.1f %9.2fx %8s\n", "estimate_density", t_dens_s, t_dens_p,
                t_dens_s / t_dens_p, max_err < 1e-12 ? "yes" : "NO");

    const SigmaParams p{0.25, 1.3, 0.4};
    NeighborGraph g_serial, g;
    const double t_graph_s = time_ms([&] { g_serial = reference::build_sigma_rips(D, dens, p); });
    const double t_graph_p = time_ms([&] { g = build_sigma_rips(D, dens, p); });
    bool same_edges = g.n == g_serial.n;
    for (std::size_t v = 0; same_edges && v < n; ++v)
        same_edges = g.adjacency[v] == g_serial.adjacency[v];
    std::printf("%-22s %12.1f %12.1f %9.2fx %8s\n", "build_sigma_rips", t_graph_s, t_graph_p,
                t_graph_s / t_graph_p, same_edges ? "yes" : "NO");

    const auto clusters = connected_components(g);
    double sil_serial = 0.0, sil_parallel = 0.0;
    const double t_sil_s = time_ms([&] { sil_serial = reference::sil_size(clusters, D, 0.5); });
    const double t_sil_p = time_ms([&] { sil_parallel = sil_size(clusters, D, 0.5); });
    std::printf("%-22s %12.1f %12.1f %9.2fx %8s\n", "sil_size", t_sil_s, t_sil_p,
                t_sil_s / t_sil_p,
                std::abs(sil_serial - sil_parallel) < 1e-9 ? "yes" : "NO");

    return 0;
}

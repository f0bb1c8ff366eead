#include "topal/coldstart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "topal/rng.hpp"

namespace topal {

ColdStart coldstart_from_name(const std::string& name) {
    if (name == "rs") return ColdStart::rs;
    if (name == "km") return ColdStart::km;
    if (name == "km_me") return ColdStart::km_me;
    if (name == "kmedoids") return ColdStart::kmedoids;
    if (name == "ahc") return ColdStart::ahc;
    if (name == "fft") return ColdStart::fft;
    if (name == "apc") return ColdStart::apc;
    if (name == "ptr") return ColdStart::ptr;
    throw std::invalid_argument("unknown cold-start method: " + name);
}

std::string coldstart_name(ColdStart m) {
    switch (m) {
        case ColdStart::rs: return "rs";
        case ColdStart::km: return "km";
        case ColdStart::km_me: return "km_me";
        case ColdStart::kmedoids: return "kmedoids";
        case ColdStart::ahc: return "ahc";
        case ColdStart::fft: return "fft";
        case ColdStart::apc: return "apc";
        case ColdStart::ptr: return "ptr";
    }
    return "?";
}

namespace {

double sq_dist_row(const Matrix& X, std::size_t i, std::span<const double> c) {
    double s = 0.0;
    for (std::size_t f = 0; f < X.cols(); ++f) {
        const double diff = X(i, f) - c[f];
        s += diff * diff;
    }
    return s;
}

// Nearest row to each centroid, skipping rows already taken.
std::vector<std::size_t> nearest_rows(const Matrix& X, const Matrix& centroids) {
    std::vector<bool> used(X.rows(), false);
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
        std::size_t best = SIZE_MAX;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < X.rows(); ++i) {
            if (used[i]) continue;
            const double d = sq_dist_row(X, i, centroids.row(c));
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        used[best] = true;
        out.push_back(best);
    }
    return out;
}

}  // namespace

Matrix kmeans_centroids(const Matrix& X, std::size_t k, std::uint64_t seed,
                        std::size_t max_iters) {
    const std::size_t n = X.rows(), m = X.cols();
    if (k < 1 || k > n) throw std::invalid_argument("kmeans: bad k");
    auto rng = make_rng(mix_seed(seed, 0x6d3a5ull));

    // k-means++ seeding.
    Matrix centroids(k, m);
    std::vector<double> min_sq(n, std::numeric_limits<double>::infinity());
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    std::size_t chosen = first(rng);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t f = 0; f < m; ++f) centroids(c, f) = X(chosen, f);
        if (c + 1 == k) break;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            min_sq[i] = std::min(min_sq[i], sq_dist_row(X, i, centroids.row(c)));
            total += min_sq[i];
        }
        if (total <= 0.0) {
            chosen = first(rng);
            continue;
        }
        std::uniform_real_distribution<double> uni(0.0, total);
        double target = uni(rng), acc = 0.0;
        chosen = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            acc += min_sq[i];
            if (acc >= target) {
                chosen = i;
                break;
            }
        }
    }

    std::vector<std::size_t> assign(n, 0);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double d = sq_dist_row(X, i, centroids.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;
        Matrix sums(k, m);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[assign[i]];
            for (std::size_t f = 0; f < m; ++f) sums(assign[i], f) += X(i, f);
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;  // empty cluster keeps its centroid
            for (std::size_t f = 0; f < m; ++f)
                centroids(c, f) = sums(c, f) / static_cast<double>(counts[c]);
        }
    }
    return centroids;
}

std::vector<std::size_t> pam_medoids(const DistanceMatrix& D, std::size_t k) {
    const std::size_t n = D.n;
    if (k < 1 || k > n) throw std::invalid_argument("pam: bad k");

    // BUILD: greedily add the medoid that most reduces the total distance.
    std::vector<std::size_t> medoids;
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    for (std::size_t step = 0; step < k; ++step) {
        std::size_t best = SIZE_MAX;
        double best_gain = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < n; ++c) {
            if (std::find(medoids.begin(), medoids.end(), c) != medoids.end()) continue;
            double gain = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                gain += std::max(0.0, nearest[i] - D(i, c));
            if (medoids.empty()) {
                gain = 0.0;
                for (std::size_t i = 0; i < n; ++i) gain -= D(i, c);
            }
            if (gain > best_gain) {
                best_gain = gain;
                best = c;
            }
        }
        medoids.push_back(best);
        for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], D(i, best));
    }

    // SWAP passes until no improving exchange is found.
    auto cost_of = [&](const std::vector<std::size_t>& meds) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double nb = std::numeric_limits<double>::infinity();
            for (auto mIdx : meds) nb = std::min(nb, D(i, mIdx));
            total += nb;
        }
        return total;
    };
    double cost = cost_of(medoids);
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t mi = 0; mi < medoids.size(); ++mi) {
            for (std::size_t c = 0; c < n; ++c) {
                if (std::find(medoids.begin(), medoids.end(), c) != medoids.end()) continue;
                auto trial = medoids;
                trial[mi] = c;
                const double trial_cost = cost_of(trial);
                if (trial_cost < cost - 1e-12) {
                    cost = trial_cost;
                    medoids = std::move(trial);
                    improved = true;
                }
            }
        }
    }
    std::sort(medoids.begin(), medoids.end());
    return medoids;
}

std::vector<std::uint32_t> ward_clusters(const DistanceMatrix& D, std::size_t k) {
    const std::size_t n = D.n;
    if (k < 1 || k > n) throw std::invalid_argument("ward: bad k");

    // Lance-Williams on squared distances; each step merges the globally
    // closest active pair.
    std::vector<std::vector<double>> d2(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d2[i][j] = D(i, j) * D(i, j);
    std::vector<bool> active(n, true);
    std::vector<double> size(n, 1.0);
    std::vector<std::uint32_t> label(n);
    std::iota(label.begin(), label.end(), 0);

    for (std::size_t clusters = n; clusters > k; --clusters) {
        std::size_t a = SIZE_MAX, b = SIZE_MAX;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!active[j]) continue;
                if (d2[i][j] < best) {
                    best = d2[i][j];
                    a = i;
                    b = j;
                }
            }
        }
        for (std::size_t o = 0; o < n; ++o) {
            if (!active[o] || o == a || o == b) continue;
            const double sa = size[a], sb = size[b], so = size[o];
            d2[a][o] = d2[o][a] = ((sa + so) * d2[a][o] + (sb + so) * d2[b][o] -
                                   so * d2[a][b]) /
                                  (sa + sb + so);
        }
        size[a] += size[b];
        active[b] = false;
        const auto absorbed = label[b];
        for (std::size_t i = 0; i < n; ++i)
            if (label[i] == absorbed) label[i] = label[a];
    }

    // Compact labels to 0..k-1 in first-seen order.
    std::vector<std::uint32_t> remap(n, UINT32_MAX);
    std::uint32_t next = 0;
    for (auto& l : label) {
        if (remap[l] == UINT32_MAX) remap[l] = next++;
        l = remap[l];
    }
    return label;
}

std::vector<std::size_t> farthest_first(const Matrix& X, std::size_t count,
                                        std::optional<std::size_t> start) {
    const std::size_t n = X.rows();
    if (count < 1 || count > n) throw std::invalid_argument("farthest_first: bad count");

    std::size_t first = 0;
    if (start) {
        first = *start;
    } else {
        std::vector<double> centroid(X.cols(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t f = 0; f < X.cols(); ++f) centroid[f] += X(i, f);
        for (auto& v : centroid) v /= static_cast<double>(n);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const double d = sq_dist_row(X, i, centroid);
            if (d < best) {
                best = d;
                first = i;
            }
        }
    }

    std::vector<std::size_t> chosen{first};
    std::vector<double> min_sq(n, std::numeric_limits<double>::infinity());
    while (chosen.size() < count) {
        const std::size_t last = chosen.back();
        for (std::size_t i = 0; i < n; ++i)
            min_sq[i] = std::min(min_sq[i], sq_dist_row(X, i, X.row(last)));
        std::size_t next = SIZE_MAX;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
            if (min_sq[i] > best) {
                best = min_sq[i];
                next = i;
            }
        }
        chosen.push_back(next);
    }
    return chosen;
}

std::vector<std::size_t> affinity_propagation(const DistanceMatrix& D, double preference,
                                              std::uint64_t seed, std::size_t max_iters,
                                              double damping,
                                              std::vector<std::uint32_t>* assignment) {
    const std::size_t n = D.n;
    // Similarities: negative squared distance, with a deterministic jitter to
    // break symmetric ties.
    Matrix S(n, n);
    auto rng = make_rng(mix_seed(seed, 0xa9cull));
    std::uniform_real_distribution<double> jitter(-1e-10, 1e-10);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            S(i, j) = (i == j) ? preference : -D(i, j) * D(i, j) + jitter(rng);

    Matrix R(n, n), A(n, n);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < n; ++i) {
            // responsibilities
            double top1 = -std::numeric_limits<double>::infinity(), top2 = top1;
            std::size_t arg1 = 0;
            for (std::size_t j = 0; j < n; ++j) {
                const double v = A(i, j) + S(i, j);
                if (v > top1) {
                    top2 = top1;
                    top1 = v;
                    arg1 = j;
                } else if (v > top2) {
                    top2 = v;
                }
            }
            for (std::size_t j = 0; j < n; ++j) {
                const double r = S(i, j) - (j == arg1 ? top2 : top1);
                R(i, j) = damping * R(i, j) + (1.0 - damping) * r;
            }
        }
#pragma omp parallel for schedule(static)
        for (std::size_t j = 0; j < n; ++j) {
            // availabilities
            double pos_sum = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (i != j) pos_sum += std::max(0.0, R(i, j));
            for (std::size_t i = 0; i < n; ++i) {
                double a;
                if (i == j)
                    a = pos_sum;
                else
                    a = std::min(0.0, R(j, j) + pos_sum - std::max(0.0, R(i, j)));
                A(i, j) = damping * A(i, j) + (1.0 - damping) * a;
            }
        }
    }

    std::vector<std::size_t> exemplars;
    for (std::size_t i = 0; i < n; ++i)
        if (R(i, i) + A(i, i) > 0.0) exemplars.push_back(i);
    if (exemplars.empty()) {
        // Fall back to the best-scoring point so callers always get one.
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (R(i, i) + A(i, i) > R(best, best) + A(best, best)) best = i;
        exemplars.push_back(best);
    }

    if (assignment) {
        assignment->assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_s = -std::numeric_limits<double>::infinity();
            for (std::size_t e = 0; e < exemplars.size(); ++e) {
                const double s = (i == exemplars[e])
                                     ? std::numeric_limits<double>::infinity()
                                     : S(i, exemplars[e]);
                if (s > best_s) {
                    best_s = s;
                    best = e;
                }
            }
            (*assignment)[i] = static_cast<std::uint32_t>(best);
        }
    }
    return exemplars;
}

namespace {

ColdstartResult apc_coldstart(const Dataset& pool, const DistanceMatrix& D, std::size_t budget,
                              Oracle& oracle, std::uint64_t seed) {
    const std::size_t n = pool.size();
    // Bisection on the preference: higher preference yields more exemplars.
    double max_sim = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) max_sim = std::max(max_sim, D(i, j) * D(i, j));
    double hi = 0.0;             // preference 0 makes nearly every point an exemplar
    double lo = -1e4 * std::max(max_sim, 1e-12);

    std::vector<std::uint32_t> assign;
    auto run = [&](double pref) { return affinity_propagation(D, pref, seed, 200, 0.7, &assign); };

    auto exemplars = run(hi);
    if (exemplars.size() < budget) {
        // Should not happen at preference 0; keep whatever was found.
    } else {
        for (int it = 0; it < 20; ++it) {
            const double mid = (lo + hi) / 2.0;
            const auto ex = run(mid);
            if (ex.size() >= budget) {
                hi = mid;
                exemplars = ex;
            } else {
                lo = mid;
            }
        }
        exemplars = run(hi);
    }

    // Keep the budget exemplars with the largest clusters (ties to lower id).
    std::vector<std::size_t> cluster_size(exemplars.size(), 0);
    for (auto a : assign) ++cluster_size[a];
    std::vector<std::size_t> order(exemplars.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (cluster_size[a] != cluster_size[b]) return cluster_size[a] > cluster_size[b];
        return exemplars[a] < exemplars[b];
    });

    ColdstartResult result;
    for (std::size_t k = 0; k < order.size() && result.pool.size() < budget; ++k) {
        const std::size_t idx = exemplars[order[k]];
        result.pool[idx] = {oracle.query(idx), Provenance::oracle};
    }
    // Pad deterministically if affinity propagation found too few exemplars.
    for (std::size_t i = 0; i < n && result.pool.size() < budget; ++i)
        if (!result.pool.count(i)) result.pool[i] = {oracle.query(i), Provenance::oracle};
    return result;
}

}  // namespace

ColdstartResult coldstart_init(ColdStart method, const Dataset& pool, const DistanceMatrix& D,
                               std::size_t budget, Oracle& oracle, std::uint64_t seed) {
    const std::size_t n = pool.size();
    if (budget > n) throw std::invalid_argument("coldstart_init: budget exceeds pool size");
    if (method == ColdStart::ptr)
        throw std::invalid_argument("coldstart_init: PTR runs through zero_shot");

    ColdstartResult result;
    switch (method) {
        case ColdStart::rs: {
            std::vector<std::size_t> all(n);
            std::iota(all.begin(), all.end(), 0);
            std::vector<std::size_t> chosen;
            auto rng = make_rng(mix_seed(seed, 0x25ull));
            std::sample(all.begin(), all.end(), std::back_inserter(chosen), budget, rng);
            for (auto i : chosen) result.pool[i] = {oracle.query(i), Provenance::oracle};
            break;
        }
        case ColdStart::km:
        case ColdStart::km_me: {
            const auto centroids = kmeans_centroids(pool.features, budget, seed);
            const auto rows = nearest_rows(pool.features, centroids);
            std::vector<int> labels;
            for (auto i : rows) {
                const int y = oracle.query(i);
                labels.push_back(y);
                result.pool[i] = {y, Provenance::oracle};
            }
            if (method == ColdStart::km_me) {
                result.extra_features = centroids;
                result.extra_labels = labels;
            }
            break;
        }
        case ColdStart::kmedoids: {
            for (auto i : pam_medoids(D, budget))
                result.pool[i] = {oracle.query(i), Provenance::oracle};
            break;
        }
        case ColdStart::ahc: {
            const auto labels = ward_clusters(D, budget);
            Matrix centroids(budget, pool.dim());
            std::vector<std::size_t> counts(budget, 0);
            for (std::size_t i = 0; i < n; ++i) {
                ++counts[labels[i]];
                for (std::size_t f = 0; f < pool.dim(); ++f)
                    centroids(labels[i], f) += pool.features(i, f);
            }
            for (std::size_t q = 0; q < budget; ++q)
                for (std::size_t f = 0; f < pool.dim(); ++f)
                    centroids(q, f) /= static_cast<double>(std::max<std::size_t>(counts[q], 1));
            for (auto i : nearest_rows(pool.features, centroids))
                result.pool[i] = {oracle.query(i), Provenance::oracle};
            break;
        }
        case ColdStart::fft: {
            for (auto i : farthest_first(pool.features, budget))
                result.pool[i] = {oracle.query(i), Provenance::oracle};
            break;
        }
        case ColdStart::apc:
            return apc_coldstart(pool, D, budget, oracle, seed);
        case ColdStart::ptr:
            break;  // unreachable
    }
    return result;
}

}  // namespace topal

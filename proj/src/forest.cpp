#include "topal/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "topal/rng.hpp"

namespace topal {

namespace {

struct TreeBuilder {
    const Matrix& X;
    const std::vector<std::uint32_t>& y_pos;  // label positions in class_ids
    std::size_t n_classes;
    std::size_t mtry;
    std::mt19937_64 rng;
    DecisionTree tree;

    // scratch
    std::vector<std::size_t> feature_pool;
    std::vector<std::pair<double, std::uint32_t>> sorted;  // (value, sample)

    TreeBuilder(const Matrix& x, const std::vector<std::uint32_t>& yp, std::size_t nc,
                std::size_t mt, std::uint64_t seed)
        : X(x), y_pos(yp), n_classes(nc), mtry(mt), rng(make_rng(seed)) {
        feature_pool.resize(X.cols());
        std::iota(feature_pool.begin(), feature_pool.end(), 0);
    }

    static double gini(const std::vector<double>& counts, double total) {
        double s = 1.0;
        for (double c : counts) s -= (c / total) * (c / total);
        return s;
    }

    std::uint32_t build(std::vector<std::uint32_t>& samples) {
        const auto id = static_cast<std::uint32_t>(tree.nodes.size());
        tree.nodes.emplace_back();

        std::vector<double> counts(n_classes, 0.0);
        for (auto s : samples) counts[y_pos[s]] += 1.0;
        const double total = static_cast<double>(samples.size());
        const bool pure =
            std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }) <= 1;

        if (pure || samples.size() < 2) {
            tree.nodes[id].histogram = std::move(counts);
            return id;
        }

        // Draw mtry distinct candidate features (partial Fisher-Yates).
        for (std::size_t k = 0; k < mtry; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, feature_pool.size() - 1);
            std::swap(feature_pool[k], feature_pool[pick(rng)]);
        }

        double best_impurity = gini(counts, total);
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        bool found = false;

        std::vector<double> left_counts(n_classes);
        for (std::size_t k = 0; k < mtry; ++k) {
            const std::size_t f = feature_pool[k];
            sorted.clear();
            for (auto s : samples) sorted.emplace_back(X(s, f), s);
            std::sort(sorted.begin(), sorted.end());
            if (sorted.front().first == sorted.back().first) continue;

            std::fill(left_counts.begin(), left_counts.end(), 0.0);
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                left_counts[y_pos[sorted[i].second]] += 1.0;
                if (sorted[i].first == sorted[i + 1].first) continue;
                const double nl = static_cast<double>(i + 1);
                const double nr = total - nl;
                std::vector<double> right_counts(n_classes);
                for (std::size_t c = 0; c < n_classes; ++c)
                    right_counts[c] = counts[c] - left_counts[c];
                const double impurity =
                    (nl * gini(left_counts, nl) + nr * gini(right_counts, nr)) / total;
                if (impurity < best_impurity - 1e-12) {
                    best_impurity = impurity;
                    best_feature = f;
                    best_threshold = (sorted[i].first + sorted[i + 1].first) / 2.0;
                    found = true;
                }
            }
        }

        if (!found) {
            tree.nodes[id].histogram = std::move(counts);
            return id;
        }

        std::vector<std::uint32_t> left, right;
        for (auto s : samples)
            (X(s, best_feature) <= best_threshold ? left : right).push_back(s);
        samples.clear();
        samples.shrink_to_fit();

        tree.nodes[id].leaf = false;
        tree.nodes[id].feature = best_feature;
        tree.nodes[id].threshold = best_threshold;
        const auto l = build(left);
        tree.nodes[id].left = l;
        const auto r = build(right);
        tree.nodes[id].right = r;
        return id;
    }
};

const TreeNode& leaf_for(const DecisionTree& tree, const Matrix& X, std::size_t row) {
    const TreeNode* node = &tree.nodes[0];
    while (!node->leaf)
        node = &tree.nodes[X(row, node->feature) <= node->threshold ? node->left : node->right];
    return *node;
}

}  // namespace

RandomForestModel fit_forest(const Matrix& X, const std::vector<int>& y, std::uint64_t seed,
                             std::size_t n_trees) {
    if (X.rows() == 0 || X.rows() != y.size())
        throw std::invalid_argument("fit_forest: empty training set or size mismatch");

    RandomForestModel model;
    model.n_features = X.cols();
    model.class_ids = y;
    std::sort(model.class_ids.begin(), model.class_ids.end());
    model.class_ids.erase(std::unique(model.class_ids.begin(), model.class_ids.end()),
                          model.class_ids.end());

    std::vector<std::uint32_t> y_pos(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        y_pos[i] = static_cast<std::uint32_t>(
            std::lower_bound(model.class_ids.begin(), model.class_ids.end(), y[i]) -
            model.class_ids.begin());

    const auto mtry = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(std::max<std::size_t>(X.cols(), 1)))));
    const std::size_t n = X.rows();

    model.trees.resize(n_trees);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t t = 0; t < n_trees; ++t) {
        const std::uint64_t tree_seed = mix_seed(seed, 0xf03e57ull, t);
        auto rng = make_rng(tree_seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<std::uint32_t> samples(n);
        for (auto& s : samples) s = static_cast<std::uint32_t>(pick(rng));

        TreeBuilder builder(X, y_pos, model.class_ids.size(), mtry,
                            mix_seed(tree_seed, 0x67c0ull));
        builder.build(samples);
        model.trees[t] = std::move(builder.tree);
    }
    return model;
}

Matrix predict_proba(const RandomForestModel& model, const Matrix& X) {
    if (X.cols() != model.n_features)
        throw std::invalid_argument("predict_proba: feature dimension mismatch");
    const std::size_t nc = model.class_ids.size();
    Matrix proba(X.rows(), nc, 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < X.rows(); ++i) {
        auto out = proba.row(i);
        for (const auto& tree : model.trees) {
            const auto& leaf = leaf_for(tree, X, i);
            double total = 0.0;
            for (double c : leaf.histogram) total += c;
            for (std::size_t c = 0; c < nc; ++c) out[c] += leaf.histogram[c] / total;
        }
        for (std::size_t c = 0; c < nc; ++c) out[c] /= static_cast<double>(model.trees.size());
    }
    return proba;
}

std::vector<int> predict(const RandomForestModel& model, const Matrix& X) {
    const auto proba = predict_proba(model, X);
    std::vector<int> labels(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < proba.cols(); ++c)
            if (proba(i, c) > proba(i, best)) best = c;
        labels[i] = model.class_ids[best];
    }
    return labels;
}

std::vector<int> Learner::predict_labels(const Matrix& X) const {
    const auto p = proba(X);
    const auto ids = classes();
    std::vector<int> labels(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < p.cols(); ++c)
            if (p(i, c) > p(i, best)) best = c;
        labels[i] = ids[best];
    }
    return labels;
}

}  // namespace topal

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "topal/dataset.hpp"
#include "topal/forest.hpp"
#include "topal/stats.hpp"

#include "support/fixtures.hpp"

using namespace topal;

TEST_CASE("single training point predicts its class with probability 1") {
    Matrix X(1, 3);
    X(0, 0) = 0.2;
    const auto model = fit_forest(X, {4}, 1);
    Matrix q(2, 3);
    q(1, 1) = 0.9;
    const auto p = predict_proba(model, q);
    CHECK(p.cols() == 1);
    CHECK(p(0, 0) == doctest::Approx(1.0));
    CHECK(p(1, 0) == doctest::Approx(1.0));
    CHECK(predict(model, q) == std::vector<int>{4, 4});
}

TEST_CASE("errors on empty input and dimension mismatch") {
    CHECK_THROWS(fit_forest(Matrix(0, 2), {}, 1));
    Matrix X(2, 2);
    X(1, 0) = 1.0;
    const auto model = fit_forest(X, {1, 2}, 1);
    CHECK_THROWS(predict_proba(model, Matrix(1, 3)));
}

TEST_CASE("linearly separable blobs train to perfect accuracy") {
    const auto d = fixtures::make_blobs({{0, 0, 0.3, 100, 1}, {5, 5, 0.3, 100, 2}}, 21);
    const auto model = fit_forest(d.features, d.labels, 7);
    const auto pred = predict(model, d.features);
    CHECK(balanced_accuracy(d.labels, pred) == doctest::Approx(1.0));
}

TEST_CASE("XOR pattern is learned") {
    const auto d = fixtures::make_blobs({{0, 0, 0.25, 100, 1},
                                         {4, 4, 0.25, 100, 1},
                                         {0, 4, 0.25, 100, 2},
                                         {4, 0, 0.25, 100, 2}},
                                        22);
    const auto split = stratified_split(d, 3, 0.7);
    const auto train = subset(d, split.train_indices);
    const auto test = subset(d, split.test_indices);
    const auto model = fit_forest(train.features, train.labels, 9);
    const auto acc = balanced_accuracy(test.labels, predict(model, test.features));
    CHECK(acc >= 0.95);
}

TEST_CASE("probability rows sum to one and duplicates agree") {
    const auto d = fixtures::make_blobs(
        {{0, 0, 0.8, 60, 1}, {2, 0, 0.8, 60, 2}, {1, 2, 0.8, 60, 3}}, 23);
    const auto model = fit_forest(d.features, d.labels, 11);
    Matrix q(4, 2);
    q(0, 0) = 0.4;
    q(0, 1) = 0.9;
    q(1, 0) = 0.4;
    q(1, 1) = 0.9;  // duplicate of row 0
    q(2, 0) = 1.8;
    q(3, 1) = 1.7;
    const auto p = predict_proba(model, q);
    for (std::size_t i = 0; i < p.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < p.cols(); ++c) {
            CHECK(p(i, c) >= 0.0);
            sum += p(i, c);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
    for (std::size_t c = 0; c < p.cols(); ++c) CHECK(p(0, c) == p(1, c));
}

TEST_CASE("argmax of proba equals the majority vote over trees") {
    const auto d = fixtures::make_blobs({{0, 0, 0.5, 80, 1}, {4, 0, 0.5, 80, 2}}, 24);
    const auto model = fit_forest(d.features, d.labels, 13);

    auto rng = make_rng(99);
    std::uniform_real_distribution<double> ux(-1.0, 5.0), uy(-1.5, 1.5);
    Matrix q(100, 2);
    for (std::size_t i = 0; i < 100; ++i) {
        q(i, 0) = ux(rng);
        q(i, 1) = uy(rng);
    }
    const auto p = predict_proba(model, q);

    // vote-counting oracle: walk each tree by hand
    for (std::size_t i = 0; i < q.rows(); ++i) {
        std::vector<int> votes(model.class_ids.size(), 0);
        for (const auto& tree : model.trees) {
            const TreeNode* node = &tree.nodes[0];
            while (!node->leaf)
                node = &tree.nodes[q(i, node->feature) <= node->threshold ? node->left
                                                                          : node->right];
            std::size_t best = 0;
            for (std::size_t c = 1; c < node->histogram.size(); ++c)
                if (node->histogram[c] > node->histogram[best]) best = c;
            ++votes[best];
        }
        const auto vote_winner =
            std::distance(votes.begin(), std::max_element(votes.begin(), votes.end()));
        std::size_t proba_winner = 0;
        for (std::size_t c = 1; c < p.cols(); ++c)
            if (p(i, c) > p(i, proba_winner)) proba_winner = c;
        CHECK(static_cast<std::size_t>(vote_winner) == proba_winner);
    }
}

TEST_CASE("fit and predict are deterministic per seed") {
    // overlapping blobs so that probabilities are sensitive to the resamples
    const auto d = fixtures::make_blobs({{0, 0, 1.2, 50, 1}, {1, 0, 1.2, 50, 2}}, 25);
    const auto m1 = fit_forest(d.features, d.labels, 31);
    const auto m2 = fit_forest(d.features, d.labels, 31);
    const auto p1 = predict_proba(m1, d.features);
    const auto p2 = predict_proba(m2, d.features);
    CHECK(p1 == p2);

    const auto m3 = fit_forest(d.features, d.labels, 32);
    CHECK(predict_proba(m3, d.features) != p1);
}

TEST_CASE("leaf histograms sum to the leaf sample counts") {
    const auto d = fixtures::make_blobs({{0, 0, 0.6, 40, 1}, {3, 0, 0.6, 40, 2}}, 26);
    const auto model = fit_forest(d.features, d.labels, 33, 10);
    for (const auto& tree : model.trees) {
        double total = 0.0;
        for (const auto& node : tree.nodes) {
            if (!node.leaf) continue;
            for (double c : node.histogram) total += c;
        }
        // every bootstrap sample lands in exactly one leaf
        CHECK(total == doctest::Approx(static_cast<double>(d.size())));
    }
}

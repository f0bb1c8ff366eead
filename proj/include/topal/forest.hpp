#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "topal/matrix.hpp"

namespace topal {

/// Axis-aligned decision tree node. Leaves carry a class-count histogram
/// over the forest's class id list.
struct TreeNode {
    bool leaf = true;
    std::size_t feature = 0;
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::vector<double> histogram;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
};

/// Random forest: bootstrap resamples, Gini splits over ceil(sqrt(m)) random
/// features, grown until pure or below 2 samples. Thresholds are midpoints
/// between consecutive sorted feature values.
struct RandomForestModel {
    std::vector<int> class_ids;  // sorted distinct training labels
    std::vector<DecisionTree> trees;
    std::size_t n_features = 0;
};

RandomForestModel fit_forest(const Matrix& X, const std::vector<int>& y, std::uint64_t seed,
                             std::size_t n_trees = 100);

/// Per-sample class distribution: mean of normalized leaf histograms over
/// the trees. Columns follow model.class_ids; rows sum to 1.
Matrix predict_proba(const RandomForestModel& model, const Matrix& X);

/// Argmax class (ties to the lower class id).
std::vector<int> predict(const RandomForestModel& model, const Matrix& X);

/// Classifier contract used by the active-learning loops.
class Learner {
public:
    virtual ~Learner() = default;
    virtual void fit(const Matrix& X, const std::vector<int>& y, std::uint64_t seed) = 0;
    virtual Matrix proba(const Matrix& X) const = 0;
    virtual std::vector<int> classes() const = 0;

    std::vector<int> predict_labels(const Matrix& X) const;
};

class RandomForestLearner final : public Learner {
public:
    explicit RandomForestLearner(std::size_t n_trees = 100) : n_trees_(n_trees) {}
    void fit(const Matrix& X, const std::vector<int>& y, std::uint64_t seed) override {
        model_ = fit_forest(X, y, seed, n_trees_);
    }
    Matrix proba(const Matrix& X) const override { return predict_proba(model_, X); }
    std::vector<int> classes() const override { return model_.class_ids; }

private:
    std::size_t n_trees_;
    RandomForestModel model_;
};

}  // namespace topal

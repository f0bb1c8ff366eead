#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "topal/matrix.hpp"

namespace topal {

/// A preprocessed dataset: deduplicated, rows with missing values dropped,
/// every feature column min-max normalized to [0,1] (constant columns map
/// to all zeros), class ids remapped to {1..c}.
struct Dataset {
    std::string name;
    Matrix features;          // n x m, values in [0,1]
    std::vector<int> labels;  // class ids in {1..c}
    int class_count = 0;

    std::size_t size() const { return features.rows(); }
    std::size_t dim() const { return features.cols(); }
};

/// Stratified train/test partition of a dataset's row indices.
struct Split {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::uint64_t seed = 0;
};

/// Simulated labeling oracle. Answers are deterministic; the budget counter
/// counts distinct indices queried (re-queries are free).
class Oracle {
public:
    explicit Oracle(std::vector<int> hidden_labels)
        : hidden_(std::move(hidden_labels)) {}

    int query(std::size_t index) {
        asked_.insert(index);
        return hidden_.at(index);
    }

    std::size_t query_count() const { return asked_.size(); }
    std::size_t pool_size() const { return hidden_.size(); }

private:
    std::vector<int> hidden_;
    std::set<std::size_t> asked_;
};

/// Loads a CSV file (header row, comma-delimited) and preprocesses it.
/// Rows containing missing cells are dropped, exact duplicate rows are
/// collapsed, features are min-max normalized, labels remapped to {1..c}.
/// Throws on missing file, non-numeric feature cells, or a single class.
Dataset load_dataset(const std::string& path, const std::string& label_column);

/// Builds a Dataset from in-memory values (same preprocessing pipeline).
Dataset make_dataset(std::string name, Matrix raw_features, std::vector<std::string> raw_labels);

/// In-place min-max normalization of every column to [0,1]; constant
/// columns become all zeros. Idempotent.
void normalize_columns(Matrix& features);

/// Deterministic stratified split: per-class train counts are within one
/// sample of train_frac * class size and sum to floor(train_frac * n).
/// Throws if any class has fewer than 2 samples.
Split stratified_split(const Dataset& d, std::uint64_t seed, double train_frac);

/// Row/label subset of a dataset (indices into d). Keeps normalization and
/// class ids as-is; class_count is inherited.
Dataset subset(const Dataset& d, const std::vector<std::size_t>& indices);

}  // namespace topal

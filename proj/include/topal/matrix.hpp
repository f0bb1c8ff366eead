#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace topal {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    double operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    std::span<const double> row(std::size_t i) const {
        assert(i < rows_);
        return {data_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) {
        assert(i < rows_);
        return {data_.data() + i * cols_, cols_};
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Symmetric pairwise-distance matrix with zero diagonal.
struct DistanceMatrix {
    std::size_t n = 0;
    std::vector<double> values;  // n*n, row-major

    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n_) : n(n_), values(n_ * n_, 0.0) {}

    double operator()(std::size_t i, std::size_t j) const {
        assert(i < n && j < n);
        return values[i * n + j];
    }
    double& at(std::size_t i, std::size_t j) {
        assert(i < n && j < n);
        return values[i * n + j];
    }

    double max_value() const {
        double m = 0.0;
        for (double v : values)
            if (v > m) m = v;
        return m;
    }
};

}  // namespace topal

#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace finlstm::nn {

using Vector = std::vector<double>;

// Dense row-major matrix. Sized for desk-scale models (m <= a few dozen),
// so all kernels are plain loops.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::span<double> flat() { return data_; }
    std::span<const double> flat() const { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// y += M * x
inline void matvec_accumulate(const Matrix& m, std::span<const double> x, std::span<double> y) {
    if (x.size() != m.cols() || y.size() != m.rows()) {
        throw std::invalid_argument("matvec_accumulate: dimension mismatch");
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double* row = m.data() + r * m.cols();
        double acc = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) acc += row[c] * x[c];
        y[r] += acc;
    }
}

// y += M^T * x  (x has rows() entries, y has cols() entries)
inline void matvec_transposed_accumulate(const Matrix& m, std::span<const double> x,
                                         std::span<double> y) {
    if (x.size() != m.rows() || y.size() != m.cols()) {
        throw std::invalid_argument("matvec_transposed_accumulate: dimension mismatch");
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double* out = y.data();
        const double* row = m.data() + r * m.cols();
        const double xr = x[r];
        for (std::size_t c = 0; c < m.cols(); ++c) out[c] += xr * row[c];
    }
}

// M += a * b^T (outer product accumulate)
inline void outer_accumulate(Matrix& m, std::span<const double> a, std::span<const double> b) {
    if (a.size() != m.rows() || b.size() != m.cols()) {
        throw std::invalid_argument("outer_accumulate: dimension mismatch");
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double* row = m.data() + r * m.cols();
        const double ar = a[r];
        for (std::size_t c = 0; c < m.cols(); ++c) row[c] += ar * b[c];
    }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

} // namespace finlstm::nn

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "newsaudit/core/error.hpp"

namespace newsaudit::numeric {

// Dense row-major matrix sized for small fixed-effect designs (p <= ~10).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

// Cholesky factor (lower) of a symmetric positive-definite matrix.
// Throws NumericalError on a non-positive pivot, which doubles as the
// rank check for X'X style matrices.
class Cholesky {
public:
    explicit Cholesky(const Matrix& a) : n_(a.rows()), l_(a.rows(), a.rows()) {
        if (a.rows() != a.cols()) throw ParameterError("cholesky: matrix not square");
        double scale = 0.0;
        for (std::size_t i = 0; i < n_; ++i) scale = std::max(scale, std::fabs(a(i, i)));
        const double eps = 1e-12 * std::max(scale, 1.0);
        for (std::size_t j = 0; j < n_; ++j) {
            double d = a(j, j);
            for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
            if (d <= eps) throw NumericalError("matrix not positive definite (rank deficient?)");
            l_(j, j) = std::sqrt(d);
            for (std::size_t i = j + 1; i < n_; ++i) {
                double s = a(i, j);
                for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
                l_(i, j) = s / l_(j, j);
            }
        }
    }

    std::vector<double> solve(std::vector<double> b) const {
        // forward then backward substitution
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t k = 0; k < i; ++k) b[i] -= l_(i, k) * b[k];
            b[i] /= l_(i, i);
        }
        for (std::size_t ii = n_; ii-- > 0;) {
            for (std::size_t k = ii + 1; k < n_; ++k) b[ii] -= l_(k, ii) * b[k];
            b[ii] /= l_(ii, ii);
        }
        return b;
    }

    Matrix inverse() const {
        Matrix inv(n_, n_);
        for (std::size_t j = 0; j < n_; ++j) {
            std::vector<double> e(n_, 0.0);
            e[j] = 1.0;
            auto col = solve(std::move(e));
            for (std::size_t i = 0; i < n_; ++i) inv(i, j) = col[i];
        }
        return inv;
    }

    double log_det() const {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) s += std::log(l_(i, i));
        return 2.0 * s;
    }

private:
    std::size_t n_;
    Matrix l_;
};

} // namespace newsaudit::numeric

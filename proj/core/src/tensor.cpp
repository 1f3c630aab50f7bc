// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#include "synstrip/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "synstrip/errors.hpp"

namespace synstrip {

namespace {

void require_same_shape(const char* op, const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                         b.shape_string());
    }
}

// c += a * b over a row block. Every c(i, j) receives its k terms in
// increasing k order, so blocking over i and j never changes rounding.
constexpr std::size_t kRowBlock = 4;
constexpr std::size_t kColBlock = 512;

void gemm_accumulate(const Matrix& a, const Matrix& b, Matrix& c) {
    const std::size_t n = a.rows();
    const std::size_t inner = a.cols();
    const std::size_t m = b.cols();
    for (std::size_t j0 = 0; j0 < m; j0 += kColBlock) {
        const std::size_t j1 = std::min(m, j0 + kColBlock);
        std::size_t i = 0;
        for (; i + kRowBlock <= n; i += kRowBlock) {
            double* c0 = c.row(i).data();
            double* c1 = c.row(i + 1).data();
            double* c2 = c.row(i + 2).data();
            double* c3 = c.row(i + 3).data();
            for (std::size_t k = 0; k < inner; ++k) {
                const double a0 = a(i, k);
                const double a1 = a(i + 1, k);
                const double a2 = a(i + 2, k);
                const double a3 = a(i + 3, k);
                const double* bk = b.row(k).data();
                for (std::size_t j = j0; j < j1; ++j) {
                    const double bv = bk[j];
                    c0[j] += a0 * bv;
                    c1[j] += a1 * bv;
                    c2[j] += a2 * bv;
                    c3[j] += a3 * bv;
                }
            }
        }
        for (; i < n; ++i) {
            double* ci = c.row(i).data();
            for (std::size_t k = 0; k < inner; ++k) {
                const double av = a(i, k);
                const double* bk = b.row(k).data();
                for (std::size_t j = j0; j < j1; ++j) ci[j] += av * bk[j];
            }
        }
    }
}

} // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw ShapeError("Matrix: " + std::to_string(data_.size()) + " values for shape " +
                         shape_string());
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ShapeError("Matrix: ragged initializer rows");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::string Matrix::shape_string() const {
    return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: shape mismatch " + a.shape_string() + " x " + b.shape_string());
    }
    Matrix c(a.rows(), b.cols());
    gemm_accumulate(a, b, c);
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw ShapeError("matmul_tn: shape mismatch " + a.shape_string() + "^T x " +
                         b.shape_string());
    }
    Matrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* bk = b.row(k).data();
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double av = a(k, i);
            double* ci = c.row(i).data();
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += av * bk[j];
        }
    }
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw ShapeError("matmul_nt: shape mismatch " + a.shape_string() + " x " +
                         b.shape_string() + "^T");
    }
    return matmul(a, transpose(b));
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape("hadamard", a, b);
    Matrix c(a.rows(), a.cols());
    auto out = c.data();
    auto x = a.data();
    auto y = b.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix add(const Matrix& a, const Matrix& b) {
    require_same_shape("add", a, b);
    Matrix c = a;
    auto out = c.data();
    auto y = b.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += y[i];
    return c;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    require_same_shape("sub", a, b);
    Matrix c = a;
    auto out = c.data();
    auto y = b.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= y[i];
    return c;
}

Matrix scale(const Matrix& a, double factor) {
    Matrix c = a;
    for (double& v : c.data()) v *= factor;
    return c;
}

Matrix row_sum(const Matrix& a) {
    Matrix s(a.rows(), 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (double v : a.row(i)) acc += v;
        s(i, 0) = acc;
    }
    return s;
}

std::vector<double> col_sum(const Matrix& a) {
    std::vector<double> s(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto r = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) s[j] += r[j];
    }
    return s;
}

std::vector<std::size_t> argmax_rows(const Matrix& a) {
    std::vector<std::size_t> out(a.rows(), 0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto r = a.row(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < r.size(); ++j)
            if (r[j] > r[best]) best = j;
        out[i] = best;
    }
    return out;
}

Matrix gather_rows(const Matrix& a, std::span<const std::size_t> indices) {
    Matrix out(indices.size(), a.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= a.rows()) {
            throw ShapeError("gather_rows: row " + std::to_string(indices[i]) + " out of range for " +
                             a.shape_string());
        }
        std::ranges::copy(a.row(indices[i]), out.row(i).begin());
    }
    return out;
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
    if (top.empty()) return bottom;
    if (bottom.empty()) return top;
    if (top.cols() != bottom.cols()) {
        throw ShapeError("vstack: column mismatch " + top.shape_string() + " vs " +
                         bottom.shape_string());
    }
    std::vector<double> data(top.data().begin(), top.data().end());
    data.insert(data.end(), bottom.data().begin(), bottom.data().end());
    return Matrix(top.rows() + bottom.rows(), top.cols(), std::move(data));
}

bool all_finite(const Matrix& a) noexcept {
    return std::ranges::all_of(a.data(), [](double v) { return std::isfinite(v); });
}

} // namespace synstrip

// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace synstrip {

/// Dense row-major matrix of doubles.
///
/// All kernels below use a fixed summation order (increasing inner index), so
/// identical inputs always produce bit-identical outputs. There is no
/// broadcasting; mismatched shapes raise ShapeError.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    /// "RxC", used in error messages.
    std::string shape_string() const;

    bool same_shape(const Matrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
/// transpose(a) * b without materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a * transpose(b).
Matrix matmul_nt(const Matrix& a, const Matrix& b);

Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double factor);

/// Sum of each row, as a column vector (rows x 1).
Matrix row_sum(const Matrix& a);
/// Sum of each column, accumulated top to bottom.
std::vector<double> col_sum(const Matrix& a);

/// Column index of the largest entry per row; ties go to the lowest index.
std::vector<std::size_t> argmax_rows(const Matrix& a);

/// Copies the listed rows, in order, into a new matrix.
Matrix gather_rows(const Matrix& a, std::span<const std::size_t> indices);

/// Vertical concatenation; column counts must agree.
Matrix vstack(const Matrix& top, const Matrix& bottom);

bool all_finite(const Matrix& a) noexcept;

} // namespace synstrip

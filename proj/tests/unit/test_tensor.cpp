// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <string>

#include "../support/oracles.hpp"
#include "synstrip/errors.hpp"
#include "synstrip/tensor.hpp"

using namespace synstrip;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
    return d;
}

// max-norm relative error
double max_rel_diff(const Matrix& a, const Matrix& b) {
    double scale = 0.0;
    for (double v : b.data()) scale = std::max(scale, std::abs(v));
    return max_abs_diff(a, b) / std::max(scale, 1e-300);
}

} // namespace

TEST_CASE("matmul identity and hand-checked products") {
    const Matrix a{{1, 2}, {3, 4}};
    CHECK(matmul(Matrix::identity(2), a) == a);
    CHECK(matmul(Matrix{{1, 2}}, Matrix{{3}, {4}}) == Matrix{{11}});
}

TEST_CASE("matmul matches the naive triple loop") {
    Rng rng(11);
    // sizes straddle the 4-row blocking
    for (auto [n, k, m] : {std::tuple{5, 4, 3}, std::tuple{9, 7, 13}, std::tuple{1, 1, 1}, std::tuple{4, 16, 2}}) {
        const Matrix a = oracle::random_matrix(rng, n, k);
        const Matrix b = oracle::random_matrix(rng, k, m);
        const Matrix c = matmul(a, b);
        const auto ref = oracle::naive_matmul(a, b);
        REQUIRE(c.rows() == static_cast<std::size_t>(n));
        REQUIRE(c.cols() == static_cast<std::size_t>(m));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) CHECK(std::abs(c(i, j) - ref[i][j]) <= 1e-12);
    }
}

TEST_CASE("matmul_tn and matmul_nt agree with explicit transposes") {
    Rng rng(3);
    const Matrix a = oracle::random_matrix(rng, 6, 5);
    const Matrix b = oracle::random_matrix(rng, 6, 4);
    CHECK(max_abs_diff(matmul_tn(a, b), matmul(transpose(a), b)) <= 1e-12);
    const Matrix c = oracle::random_matrix(rng, 3, 5);
    CHECK(max_abs_diff(matmul_nt(a, c), matmul(a, transpose(c))) <= 1e-12);
}

TEST_CASE("matmul shape errors name both shapes") {
    try {
        (void)matmul(Matrix(2, 3), Matrix(4, 5));
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("(2x3)") != std::string::npos);
        CHECK(msg.find("(4x5)") != std::string::npos);
    }
    CHECK_THROWS_AS((void)matmul_tn(Matrix(2, 3), Matrix(3, 3)), ShapeError);
    CHECK_THROWS_AS((void)matmul_nt(Matrix(2, 3), Matrix(3, 2)), ShapeError);
}

TEST_CASE("hadamard") {
    CHECK(hadamard(Matrix{{1, 2}}, Matrix{{0, 1}}) == Matrix{{0, 2}});
    Rng rng(5);
    const Matrix a = oracle::random_matrix(rng, 3, 4);
    CHECK(hadamard(a, Matrix(3, 4, 1.0)) == a);
    CHECK(hadamard(a, Matrix(3, 4, 0.0)) == Matrix(3, 4, 0.0));
    CHECK_THROWS_AS((void)hadamard(a, Matrix(4, 3)), ShapeError);
}

TEST_CASE("transpose, elementwise helpers and reductions") {
    const Matrix a{{1, 2}, {3, 4}};
    CHECK(transpose(a) == Matrix{{1, 3}, {2, 4}});
    CHECK(transpose(transpose(a)) == a);
    CHECK(add(a, a) == Matrix{{2, 4}, {6, 8}});
    CHECK(sub(a, a) == Matrix(2, 2, 0.0));
    CHECK(scale(a, 0.5) == Matrix{{0.5, 1}, {1.5, 2}});
    CHECK(row_sum(a) == Matrix{{3}, {7}});
    CHECK(col_sum(a) == std::vector<double>{4, 6});
    CHECK_THROWS_AS((void)add(a, Matrix(1, 2)), ShapeError);
    CHECK_THROWS_AS((void)sub(a, Matrix(2, 1)), ShapeError);
}

TEST_CASE("argmax_rows breaks ties toward the lowest index") {
    CHECK(argmax_rows(Matrix{{0.2, 0.5, 0.3}}) == std::vector<std::size_t>{1});
    CHECK(argmax_rows(Matrix{{0.5, 0.5, 0.1}, {0, 0, 0}}) == std::vector<std::size_t>{0, 0});
}

TEST_CASE("gather_rows and vstack") {
    const Matrix a{{1, 2}, {3, 4}, {5, 6}};
    const std::vector<std::size_t> rows{2, 0};
    CHECK(gather_rows(a, rows) == Matrix{{5, 6}, {1, 2}});
    CHECK(vstack(Matrix{{1, 2}}, Matrix{{3, 4}}) == Matrix{{1, 2}, {3, 4}});
    const std::vector<std::size_t> bad{3};
    CHECK_THROWS_AS((void)gather_rows(a, bad), ShapeError);
}

TEST_CASE("matmul algebraic properties hold on random conforming triples") {
    Rng rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        const auto n = 1 + rng.below(7), k = 1 + rng.below(7), m = 1 + rng.below(7), p = 1 + rng.below(7);
        const Matrix a = oracle::random_matrix(rng, n, k);
        const Matrix b = oracle::random_matrix(rng, k, m);
        const Matrix c = oracle::random_matrix(rng, m, p);
        CHECK(max_rel_diff(matmul(matmul(a, b), c), matmul(a, matmul(b, c))) <= 1e-9);
        CHECK(max_abs_diff(transpose(matmul(a, b)), matmul(transpose(b), transpose(a))) <= 1e-12);
    }
}

TEST_CASE("kernels are deterministic") {
    Rng rng(99);
    const Matrix a = oracle::random_matrix(rng, 37, 29);
    const Matrix b = oracle::random_matrix(rng, 29, 41);
    const Matrix first = matmul(a, b);
    for (int i = 0; i < 3; ++i) CHECK(matmul(a, b) == first);
}

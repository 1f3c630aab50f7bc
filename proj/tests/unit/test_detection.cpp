// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "../support/oracles.hpp"
#include "synstrip/detection.hpp"
#include "synstrip/errors.hpp"

using namespace synstrip;

namespace {

ForwardTrace single_layer_trace(const Matrix& post) {
    ForwardTrace t;
    t.input = Matrix(post.rows(), 1);
    t.pre = {post, Matrix(post.rows(), 1)};
    t.post = {post, Matrix(post.rows(), 1)};
    return t;
}

ActivationLedger ledger_with_sums(std::vector<double> sums, Activation act = Activation::relu()) {
    ActivationLedger ledger;
    ledger.sums = {std::move(sums)};
    ledger.activations = {act};
    ledger.samples_seen = 10;
    return ledger;
}

} // namespace

TEST_CASE("accumulate adds each neuron's batch total") {
    ActivationLedger ledger;
    ledger.sums = {{0.0, 0.0}};
    ledger.activations = {Activation::relu()};
    accumulate(ledger, single_layer_trace(Matrix{{0.5, 0.0}, {0.0, 0.0}, {1.5, 0.0}}));
    CHECK(ledger.sums[0][0] == 2.0);
    CHECK(ledger.sums[0][1] == 0.0);
    CHECK(ledger.samples_seen == 3);
}

TEST_CASE("accumulate rejects width mismatches") {
    ActivationLedger ledger;
    ledger.sums = {{0.0, 0.0, 0.0}};
    ledger.activations = {Activation::relu()};
    CHECK_THROWS_AS(accumulate(ledger, single_layer_trace(Matrix(2, 2))), ShapeError);
}

TEST_CASE("empty evaluation set leaves the ledger empty") {
    const std::vector<std::size_t> widths{3, 4, 2};
    const DenseNetwork net = init_network(widths, Activation::relu(), 1);
    const ActivationLedger ledger = scan_activations(net, Matrix(0, 3), 8);
    CHECK(ledger.samples_seen == 0);
    CHECK(ledger.sums[0] == std::vector<double>(4, 0.0));
    CHECK_THROWS_AS(find_dead(ledger), UsageError);
}

TEST_CASE("threshold rule") {
    CHECK(find_dead(ledger_with_sums({0.0})).layers[0] == std::vector<std::size_t>{0});
    CHECK(find_dead(ledger_with_sums({1e-9})).layers[0].empty());
    CHECK(find_dead(ledger_with_sums({1e-9}), 1e-6).layers[0] == std::vector<std::size_t>{0});
    CHECK(find_dead(ledger_with_sums({0.0}, Activation::gelu())).layers[0].empty());
    CHECK_THROWS_AS(find_dead(ledger_with_sums({0.0}), -1.0), ConfigError);
}

TEST_CASE("dead sets grow monotonically with the threshold") {
    Rng rng(3);
    std::vector<double> sums(200);
    for (double& s : sums) s = rng.uniform() < 0.3 ? 0.0 : rng.uniform() * 1e-3;
    const auto ledger = ledger_with_sums(sums);
    std::vector<std::size_t> prev;
    for (double t : {0.0, 1e-7, 1e-5, 1e-4, 5e-4, 1e-3}) {
        const auto now = find_dead(ledger, t).layers[0];
        CHECK(std::ranges::includes(now, prev));
        CHECK(std::ranges::is_sorted(now));
        prev = now;
    }
}

TEST_CASE("streaming, single-pass and per-sample sums agree") {
    Rng rng(19);
    const std::vector<std::size_t> widths{6, 12, 9, 3};
    DenseNetwork net = init_network(widths, Activation::relu(), 4);
    for (std::size_t i = 0; i < 6; ++i) net.layers[0].weights(i, 5) = -0.5; // a dead unit
    const Matrix data = oracle::random_matrix(rng, 70, 6, 0.0, 1.0);

    const auto streamed = scan_activations(net, data, 10); // 7 batches
    const auto single = scan_activations(net, data, 70);
    std::vector<std::vector<double>> per_sample{std::vector<double>(12, 0.0), std::vector<double>(9, 0.0)};
    for (std::size_t r = 0; r < data.rows(); ++r) {
        const auto outs = oracle::sample_forward(net, data.row(r));
        for (std::size_t l = 0; l < 2; ++l)
            for (std::size_t j = 0; j < outs[l].size(); ++j) per_sample[l][j] += outs[l][j];
    }
    CHECK(streamed.samples_seen == 70);
    for (std::size_t l = 0; l < 2; ++l)
        for (std::size_t j = 0; j < streamed.sums[l].size(); ++j) {
            CHECK(std::abs(streamed.sums[l][j] - single.sums[l][j]) <= 1e-12);
            CHECK(std::abs(streamed.sums[l][j] - per_sample[l][j]) <= 1e-12);
        }
    const DeadSet dead = find_dead(streamed);
    CHECK(dead.contains(0, 5));
    // dead at threshold 0 <=> zero output on every sample
    for (std::size_t j = 0; j < 12; ++j) {
        bool all_zero = true;
        for (std::size_t r = 0; r < data.rows(); ++r) all_zero = all_zero && oracle::sample_forward(net, data.row(r))[0][j] == 0.0;
        CHECK(dead.contains(0, j) == all_zero);
    }
}

TEST_CASE("dead set is invariant to sample order") {
    Rng rng(23);
    const std::vector<std::size_t> widths{5, 16, 3};
    DenseNetwork net = init_network(widths, Activation::relu(), 8);
    for (std::size_t j : {1u, 7u})
        for (std::size_t i = 0; i < 5; ++i) net.layers[0].weights(i, j) = -rng.uniform(0.1, 1.0);
    const Matrix data = oracle::random_matrix(rng, 40, 5, 0.0, 1.0);
    const DeadSet reference = find_dead(scan_activations(net, data, 8));
    CHECK(reference.total() >= 2);
    std::vector<std::size_t> order(40);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (int trial = 0; trial < 10; ++trial) {
        rng.shuffle(order);
        const DeadSet shuffled = find_dead(scan_activations(net, gather_rows(data, order), 1 + trial));
        CHECK(shuffled.layers == reference.layers);
    }
}

TEST_CASE("dead set helpers") {
    const std::vector<std::size_t> widths{3, 4, 4, 2};
    const DenseNetwork net = init_network(widths, Activation::relu(), 1);
    DeadSet none = DeadSet::none(net);
    CHECK(none.layers.size() == 2);
    CHECK(none.total() == 0);
    none.layers[1] = {0, 3};
    CHECK(none.total() == 2);
    CHECK(none.contains(1, 3));
    CHECK_FALSE(none.contains(0, 3));
    CHECK_FALSE(none.contains(7, 0));
    CHECK(parse_detection_source("training") == DetectionSource::Training);
    CHECK_THROWS_AS(parse_detection_source("test"), ConfigError);
}

// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "../support/oracles.hpp"
#include "synstrip/capacity.hpp"
#include "synstrip/stripping.hpp"

using namespace synstrip;

TEST_CASE("no dead neurons, no masks: everything is active") {
    const std::vector<std::size_t> widths{10, 7, 5, 3};
    const DenseNetwork net = init_network(widths, Activation::relu(), 1);
    const CapacityReport r = active_parameters(net, DeadSet::none(net));
    // weights 70 + 35 + 15, hidden biases 7 + 5
    CHECK(r.total_params == 132);
    CHECK(r.active_params == 132);
    CHECK(r.active_pct == 100.0);
    CHECK(r.pruned_params == 0);
    CHECK(r.dead_attached_params == 0);
}

TEST_CASE("one dead neuron in the first hidden layer removes d + 1 + h2") {
    const std::vector<std::size_t> widths{10, 7, 5, 3};
    const DenseNetwork net = init_network(widths, Activation::relu(), 1);
    DeadSet dead = DeadSet::none(net);
    dead.layers[0] = {4};
    const CapacityReport r = active_parameters(net, dead);
    CHECK(r.dead_attached_params == 10 + 1 + 5);
    CHECK(r.active_params == 132 - 16);
    CHECK(r.dead_neurons == 1);
    CHECK(r.active_pct == doctest::Approx(100.0 * 116.0 / 132.0));
}

TEST_CASE("a weight between two dead neurons is counted once") {
    const std::vector<std::size_t> widths{4, 3, 3, 2};
    DenseNetwork net = init_network(widths, Activation::relu(), 1);
    net.layers[0].mask(2, 1) = 0.0; // masked fan-in of a dead neuron stays "pruned"
    DeadSet dead = DeadSet::none(net);
    dead.layers[0] = {1};
    dead.layers[1] = {0};
    const CapacityReport r = active_parameters(net, dead);
    // neuron (0,1): fan-in 4 (one masked) + bias + fan-out 3
    // neuron (1,0): fan-in 3 (one shared with the above) + bias + fan-out 2
    CHECK(r.pruned_params == 1);
    CHECK(r.dead_attached_params == 3 + 1 + 3 + 2 + 1 + 2);
    const auto oracle = oracle::brute_force_capacity(net, dead);
    CHECK(r.active_params == oracle.active);
}

TEST_CASE("matches the brute-force count on random networks") {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::size_t> widths{1 + rng.below(8)};
        const std::size_t depth = 1 + rng.below(4);
        for (std::size_t d = 0; d < depth; ++d) widths.push_back(1 + rng.below(9));
        widths.push_back(1 + rng.below(5));
        DenseNetwork net = init_network(widths, Activation::relu(), rng.next_u64());
        for (auto& layer : net.layers)
            for (double& m : layer.mask.data())
                if (rng.uniform() < 0.3) m = 0.0;
        enforce_masks(net);
        DeadSet dead = DeadSet::none(net);
        for (std::size_t l = 0; l < dead.layers.size(); ++l)
            for (std::size_t j = 0; j < net.layers[l].fan_out(); ++j)
                if (rng.uniform() < 0.3) dead.layers[l].push_back(j);

        const CapacityReport r = active_parameters(net, dead);
        const auto o = oracle::brute_force_capacity(net, dead);
        CHECK(r.total_params == o.total);
        CHECK(r.pruned_params == o.pruned);
        CHECK(r.dead_attached_params == o.dead_attached);
        CHECK(r.active_params == o.active);
        CHECK(r.active_params + r.pruned_params + r.dead_attached_params == r.total_params);
        CHECK(r.dead_neurons == dead.total());

        // adding a dead neuron never raises the active count
        DeadSet more = dead;
        const std::size_t l = rng.below(more.layers.size());
        const std::size_t j = rng.below(net.layers[l].fan_out());
        if (!more.contains(l, j)) {
            more.layers[l].push_back(j);
            std::ranges::sort(more.layers[l]);
            CHECK(active_parameters(net, more).active_params <= r.active_params);
        }
    }
}

TEST_CASE("inactive parameters are functionally null on the detection set") {
    Rng rng(8);
    for (int trial = 0; trial < 25; ++trial) {
        const std::vector<std::size_t> widths{6, 10, 8, 3};
        DenseNetwork net = init_network(widths, Activation::relu(), rng.next_u64());
        for (std::size_t l = 0; l < 2; ++l)
            for (std::size_t k = 0; k < 3; ++k) net.layers[l].bias[rng.below(net.layers[l].fan_out())] = -3.0;
        const Matrix data = oracle::random_matrix(rng, 40, 6, -1.0, 1.0);
        const DeadSet dead = find_dead(scan_activations(net, data, 40));

        // zero every parameter the accounting calls inactive
        DenseNetwork zeroed = net;
        for (std::size_t l = 0; l < zeroed.layers.size(); ++l) {
            Layer& layer = zeroed.layers[l];
            for (std::size_t i = 0; i < layer.fan_in(); ++i)
                for (std::size_t j = 0; j < layer.fan_out(); ++j) {
                    const bool src_dead = l > 0 && dead.contains(l - 1, i);
                    const bool dst_dead = l < dead.layers.size() && dead.contains(l, j);
                    if (src_dead || dst_dead) layer.weights(i, j) = 0.0;
                }
            if (l < dead.layers.size())
                for (std::size_t j : dead.layers[l]) layer.bias[j] = 0.0;
        }
        CHECK(forward(zeroed, data).logits() == forward(net, data).logits());
    }
}

TEST_CASE("stripping moves parameters from dead-attached to pruned") {
    const std::vector<std::size_t> widths{10, 4, 3};
    DenseNetwork net = init_network(widths, Activation::relu(), 5);
    DeadSet dead = DeadSet::none(net);
    dead.layers[0] = {2};
    const CapacityReport before = active_parameters(net, dead);
    strip(net, dead, StrippingPolicy{0.3, 1, 1});
    const CapacityReport after = active_parameters(net, dead);
    CHECK(after.active_params == before.active_params);
    CHECK(after.pruned_params == 3);
    CHECK(after.dead_attached_params == before.dead_attached_params - 3);
}

// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#include "synstrip/stripping.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "synstrip/errors.hpp"

namespace synstrip {

void StrippingPolicy::validate() const {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ConfigError("stripping fraction must lie in (0, 1], got " + std::to_string(fraction));
    }
    if (cadence == 0) throw ConfigError("stripping cadence must be at least 1");
}

std::size_t prune_quota(const StrippingPolicy& policy, std::size_t remaining) noexcept {
    if (remaining <= policy.min_remaining) return 0;
    // 0.1 * 30 evaluates to 3.0000000000000004; the slack keeps ceil honest.
    const double raw = policy.fraction * static_cast<double>(remaining);
    auto quota = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    quota = std::max<std::size_t>(quota, 1);
    return std::min(quota, remaining - policy.min_remaining);
}

StrippingReport strip(DenseNetwork& net, const DeadSet& dead, const StrippingPolicy& policy,
                      AdamState* adam, std::size_t epoch) {
    policy.validate();
    const std::size_t hidden = net.hidden_layer_count();
    if (dead.layers.size() > hidden) {
        throw UsageError("strip: dead set has " + std::to_string(dead.layers.size()) +
                         " layers, network has " + std::to_string(hidden) + " hidden layers");
    }
    for (std::size_t l = 0; l < dead.layers.size(); ++l) {
        for (std::size_t j : dead.layers[l]) {
            if (j >= net.layers[l].fan_out()) {
                throw UsageError("strip: dead neuron " + std::to_string(j) + " out of range in layer " +
                                 std::to_string(l));
            }
        }
        if (!dead.layers[l].empty() && !net.layers[l].activation.admits_dead_neurons()) {
            throw UsageError("strip: layer " + std::to_string(l) + " does not use ReLU");
        }
    }

    StrippingReport report;
    report.epoch = epoch;
    report.layers.resize(hidden);
    std::vector<std::pair<double, std::size_t>> live; // (weight, input index)
    for (std::size_t l = 0; l < hidden; ++l) {
        Layer& layer = net.layers[l];
        LayerStripping& out = report.layers[l];
        if (l < dead.layers.size()) out.dead = dead.layers[l];
        for (std::size_t j : out.dead) {
            live.clear();
            for (std::size_t i = 0; i < layer.fan_in(); ++i)
                if (layer.mask(i, j) != 0.0) live.emplace_back(layer.weights(i, j), i);
            const std::size_t quota = prune_quota(policy, live.size());
            if (quota == 0) continue;
            // Pairs order by weight, then by index, so the selected set is the
            // quota most negative weights with ties going to lower indices.
            std::ranges::nth_element(live, live.begin() + static_cast<std::ptrdiff_t>(quota - 1));
            for (std::size_t k = 0; k < quota; ++k) {
                const std::size_t i = live[k].second;
                layer.mask(i, j) = 0.0;
                layer.weights(i, j) = 0.0;
                if (adam != nullptr) adam->reset_weight(l, i, j);
            }
            out.pruned += quota;
        }
        out.cumulative = layer.pruned_count();
        report.pruned_total += out.pruned;
        report.cumulative_total += out.cumulative;
        report.dead_total += out.dead.size();
    }
    return report;
}

} // namespace synstrip

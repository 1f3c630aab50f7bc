// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#include "synstrip/capacity.hpp"

#include <string>
#include <vector>

#include "synstrip/errors.hpp"

namespace synstrip {

CapacityReport active_parameters(const DenseNetwork& net, const DeadSet& dead) {
    const std::size_t hidden = net.hidden_layer_count();
    if (dead.layers.size() > hidden) throw UsageError("active_parameters: dead set deeper than network");

    // dead_flags[l][j]: hidden neuron j of layer l is dead
    std::vector<std::vector<char>> dead_flags(hidden);
    for (std::size_t l = 0; l < hidden; ++l) {
        dead_flags[l].assign(net.layers[l].fan_out(), 0);
        if (l >= dead.layers.size()) continue;
        for (std::size_t j : dead.layers[l]) {
            if (j >= dead_flags[l].size()) {
                throw UsageError("active_parameters: dead neuron " + std::to_string(j) +
                                 " out of range in layer " + std::to_string(l));
            }
            dead_flags[l][j] = 1;
        }
    }

    CapacityReport report;
    report.dead_neurons = dead.total();
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        const bool has_dead_inputs = l > 0;
        const bool has_dead_outputs = l < hidden;
        for (std::size_t i = 0; i < layer.fan_in(); ++i) {
            const bool source_dead = has_dead_inputs && dead_flags[l - 1][i] != 0;
            for (std::size_t j = 0; j < layer.fan_out(); ++j) {
                ++report.total_params;
                if (layer.mask(i, j) == 0.0) {
                    ++report.pruned_params;
                } else if (source_dead || (has_dead_outputs && dead_flags[l][j] != 0)) {
                    ++report.dead_attached_params;
                }
            }
        }
        if (has_dead_outputs) {
            for (std::size_t j = 0; j < layer.fan_out(); ++j) {
                ++report.total_params;
                if (dead_flags[l][j] != 0) ++report.dead_attached_params;
            }
        }
    }
    report.active_params = report.total_params - report.pruned_params - report.dead_attached_params;
    report.active_pct = report.total_params == 0
                            ? 100.0
                            : 100.0 * static_cast<double>(report.active_params) /
                                  static_cast<double>(report.total_params);
    return report;
}

} // namespace synstrip

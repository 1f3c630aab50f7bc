// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "synstrip/detection.hpp"
#include "synstrip/network.hpp"

namespace synstrip {

/// Parameter accounting over the hidden part of the network: every weight
/// (input->hidden, hidden->hidden, hidden->output) and every hidden bias.
/// Output biases are outside the scope. Each parameter in scope lands in
/// exactly one of active / pruned / dead_attached.
struct CapacityReport {
    std::size_t total_params = 0;
    std::size_t pruned_params = 0;        ///< masked weights
    std::size_t dead_attached_params = 0; ///< unmasked weights touching a dead neuron, dead biases
    std::size_t active_params = 0;
    double active_pct = 100.0;
    std::size_t dead_neurons = 0;
};

/// A weight from unit i to unit j is inactive when it is masked or when
/// either end is a dead hidden neuron; a dead neuron's bias is inactive.
CapacityReport active_parameters(const DenseNetwork& net, const DeadSet& dead);

} // namespace synstrip

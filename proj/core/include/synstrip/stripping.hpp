// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "synstrip/detection.hpp"
#include "synstrip/network.hpp"
#include "synstrip/optimizer.hpp"

namespace synstrip {

struct StrippingPolicy {
    double fraction = 0.10;        ///< share of the remaining fan-in pruned per pass, in (0, 1]
    std::size_t min_remaining = 1; ///< never prune a neuron below this many live inputs
    std::size_t cadence = 1;       ///< epochs between passes

    /// Throws ConfigError on an out-of-range field.
    void validate() const;
    bool due(std::size_t epoch) const noexcept { return (epoch + 1) % cadence == 0; }
};

struct LayerStripping {
    std::vector<std::size_t> dead;
    std::size_t pruned = 0;     ///< connections pruned by this pass
    std::size_t cumulative = 0; ///< masked connections in the layer after the pass
};

struct StrippingReport {
    std::size_t epoch = 0;
    std::vector<LayerStripping> layers; ///< one entry per hidden layer
    std::size_t pruned_total = 0;
    std::size_t cumulative_total = 0;
    std::size_t dead_total = 0;
};

/// Number of connections one pass removes from a neuron with `remaining` live
/// inputs: ceil(fraction * remaining), capped so that at least min_remaining
/// survive.
std::size_t prune_quota(const StrippingPolicy& policy, std::size_t remaining) noexcept;

/// For every dead neuron, masks out the quota of its most negative live
/// incoming weights (ties go to the lower input index), zeroing the weights
/// and, when `adam` is given, their moments. Neurons outside `dead` and all
/// biases are untouched.
StrippingReport strip(DenseNetwork& net, const DeadSet& dead, const StrippingPolicy& policy,
                      AdamState* adam = nullptr, std::size_t epoch = 0);

} // namespace synstrip

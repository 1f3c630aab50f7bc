// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "synstrip/network.hpp"

namespace synstrip {

enum class DetectionSource { Validation, Training };

std::string to_string(DetectionSource source);
DetectionSource parse_detection_source(std::string_view name);

/// Running sum of every hidden neuron's post-activation output over an
/// evaluation pass. Samples are added one row at a time in batch order, so
/// streaming a dataset in any partition into batches gives the same sums as
/// a single pass, provided the row order is the same.
struct ActivationLedger {
    std::vector<std::vector<double>> sums; ///< [hidden layer][neuron]
    std::vector<Activation> activations;   ///< activation of each hidden layer
    std::size_t samples_seen = 0;

    static ActivationLedger for_network(const DenseNetwork& net);
};

void accumulate(ActivationLedger& ledger, const ForwardTrace& trace);

/// Ordered dead neuron indices for every hidden layer.
struct DeadSet {
    std::vector<std::vector<std::size_t>> layers;
    double threshold = 0.0;
    DetectionSource source = DetectionSource::Validation;

    std::size_t total() const noexcept;
    bool contains(std::size_t layer, std::size_t neuron) const;

    /// An empty dead set shaped for `net`.
    static DeadSet none(const DenseNetwork& net);
};

/// A neuron in a ReLU layer is dead when its activation sum is <= threshold.
/// Other activations never yield dead neurons. Throws UsageError when the
/// ledger has seen no samples.
DeadSet find_dead(const ActivationLedger& ledger, double threshold = 0.0,
                  DetectionSource source = DetectionSource::Validation);

/// Forward pass over `features` in consecutive batches of `batch_size` rows,
/// accumulating a fresh ledger.
ActivationLedger scan_activations(const DenseNetwork& net, const Matrix& features,
                                  std::size_t batch_size);

} // namespace synstrip

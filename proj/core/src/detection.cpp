// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#include "synstrip/detection.hpp"

#include <algorithm>
#include <numeric>

#include "synstrip/errors.hpp"

namespace synstrip {

std::string to_string(DetectionSource source) {
    return source == DetectionSource::Training ? "training" : "validation";
}

DetectionSource parse_detection_source(std::string_view name) {
    if (name == "validation") return DetectionSource::Validation;
    if (name == "training") return DetectionSource::Training;
    throw ConfigError("unknown detection source '" + std::string(name) + "'");
}

ActivationLedger ActivationLedger::for_network(const DenseNetwork& net) {
    ActivationLedger ledger;
    for (std::size_t l = 0; l < net.hidden_layer_count(); ++l) {
        ledger.sums.emplace_back(net.layers[l].fan_out(), 0.0);
        ledger.activations.push_back(net.layers[l].activation);
    }
    return ledger;
}

void accumulate(ActivationLedger& ledger, const ForwardTrace& trace) {
    if (trace.post.size() < ledger.sums.size()) {
        throw ShapeError("accumulate: trace has " + std::to_string(trace.post.size()) +
                         " layers, ledger expects at least " + std::to_string(ledger.sums.size()));
    }
    for (std::size_t l = 0; l < ledger.sums.size(); ++l) {
        if (trace.post[l].cols() != ledger.sums[l].size()) {
            throw ShapeError("accumulate: layer " + std::to_string(l) + " width " +
                             std::to_string(trace.post[l].cols()) + " vs ledger " +
                             std::to_string(ledger.sums[l].size()));
        }
    }
    for (std::size_t l = 0; l < ledger.sums.size(); ++l) {
        auto& sums = ledger.sums[l];
        const Matrix& post = trace.post[l];
        for (std::size_t r = 0; r < post.rows(); ++r) {
            auto row = post.row(r);
            for (std::size_t j = 0; j < sums.size(); ++j) sums[j] += row[j];
        }
    }
    ledger.samples_seen += trace.batch_size();
}

std::size_t DeadSet::total() const noexcept {
    return std::accumulate(layers.begin(), layers.end(), std::size_t{0},
                           [](std::size_t acc, const auto& l) { return acc + l.size(); });
}

bool DeadSet::contains(std::size_t layer, std::size_t neuron) const {
    if (layer >= layers.size()) return false;
    return std::ranges::binary_search(layers[layer], neuron);
}

DeadSet DeadSet::none(const DenseNetwork& net) {
    DeadSet set;
    set.layers.resize(net.hidden_layer_count());
    return set;
}

DeadSet find_dead(const ActivationLedger& ledger, double threshold, DetectionSource source) {
    if (ledger.samples_seen == 0) throw UsageError("find_dead: ledger has not seen any samples");
    if (!(threshold >= 0.0)) throw ConfigError("find_dead: threshold must be non-negative");
    DeadSet dead;
    dead.threshold = threshold;
    dead.source = source;
    dead.layers.resize(ledger.sums.size());
    for (std::size_t l = 0; l < ledger.sums.size(); ++l) {
        if (!ledger.activations[l].admits_dead_neurons()) continue;
        const auto& sums = ledger.sums[l];
        for (std::size_t j = 0; j < sums.size(); ++j)
            if (sums[j] <= threshold) dead.layers[l].push_back(j);
    }
    return dead;
}

ActivationLedger scan_activations(const DenseNetwork& net, const Matrix& features,
                                  std::size_t batch_size) {
    if (batch_size == 0) throw ConfigError("scan_activations: batch_size must be positive");
    ActivationLedger ledger = ActivationLedger::for_network(net);
    std::vector<std::size_t> rows;
    for (std::size_t start = 0; start < features.rows(); start += batch_size) {
        const std::size_t stop = std::min(features.rows(), start + batch_size);
        rows.resize(stop - start);
        std::iota(rows.begin(), rows.end(), start);
        accumulate(ledger, forward(net, gather_rows(features, rows)));
    }
    return ledger;
}

} // namespace synstrip

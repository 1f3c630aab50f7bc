// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "synstrip/network.hpp"

namespace synstrip {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.0;
};

/// First and second moment estimates, shaped like the network's parameters.
/// At masked weight positions both moments are kept at exactly zero.
struct AdamState {
    struct LayerMoments {
        Matrix m_weights;
        Matrix v_weights;
        std::vector<double> m_bias;
        std::vector<double> v_bias;
    };

    AdamConfig config;
    std::vector<LayerMoments> layers;
    std::uint64_t step_count = 0;

    static AdamState for_network(const DenseNetwork& net, const AdamConfig& config = {});

    /// Zeroes both moments of one weight; used when a connection is pruned.
    void reset_weight(std::size_t layer, std::size_t row, std::size_t col) noexcept;
};

/// One Adam step with bias correction and decoupled weight decay:
///   theta <- theta - lr * wd * theta
///   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)
/// Masked weights and their moments are forced back to zero afterwards.
/// Throws NumericError on a non-finite gradient, leaving net and state as they were.
void adam_step(DenseNetwork& net, const Gradients& grads, AdamState& state, double lr);

enum class ScheduleKind { Constant, Cosine, WarmupCosine };

struct ScheduleSpec {
    ScheduleKind kind = ScheduleKind::Constant;
    double lr_max = 1e-3;
    double lr_min = 1e-5;
    std::size_t warmup_epochs = 0;
    std::size_t total_epochs = 1;
};

/// Throws ConfigError when lr_min > lr_max, warmup >= total, or the
/// warmup/kind combination is inconsistent.
void validate(const ScheduleSpec& schedule);

/// Learning rate for a 0-based epoch. Warmup epochs ramp linearly up to lr_max
/// (epoch e gets lr_max * (e + 1) / warmup); the remaining epochs follow a half
/// cosine from lr_max at the first decay epoch to lr_min at the last.
double lr_at(const ScheduleSpec& schedule, std::size_t epoch);

std::string to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view name);

} // namespace synstrip

// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace synstrip {

enum class ActivationKind : std::uint8_t {
    Identity = 0,
    ReLU = 1,
    LeakyReLU = 2,
    GELU = 3,
};

/// Activation function plus its parameter (the negative slope, LeakyReLU only).
struct Activation {
    ActivationKind kind = ActivationKind::ReLU;
    double slope = 0.0;

    static Activation relu() { return {ActivationKind::ReLU, 0.0}; }
    static Activation identity() { return {ActivationKind::Identity, 0.0}; }
    static Activation gelu() { return {ActivationKind::GELU, 0.0}; }
    /// Throws ConfigError unless 0 < slope < 1.
    static Activation leaky_relu(double slope);

    /// Only ReLU has an exact-zero plateau, so only ReLU neurons can be dead.
    bool admits_dead_neurons() const noexcept { return kind == ActivationKind::ReLU; }

    friend bool operator==(const Activation&, const Activation&) = default;
};

double apply(const Activation& act, double x) noexcept;

/// ReLU and LeakyReLU use the left derivative at exactly zero (0 and slope).
double derivative(const Activation& act, double x) noexcept;

std::string to_string(const Activation& act);
/// Accepts "relu", "identity", "gelu", "leaky_relu"; slope applies to leaky_relu.
Activation parse_activation(std::string_view name, double slope = 0.01);

} // namespace synstrip

// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#include "synstrip/activations.hpp"

#include <cmath>
#include <numbers>

#include "synstrip/errors.hpp"

namespace synstrip {

namespace {

double normal_cdf(double x) noexcept { return 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double normal_pdf(double x) noexcept {
    return std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

} // namespace

Activation Activation::leaky_relu(double slope) {
    if (!(slope > 0.0 && slope < 1.0)) {
        throw ConfigError("leaky_relu slope must lie in (0, 1), got " + std::to_string(slope));
    }
    return {ActivationKind::LeakyReLU, slope};
}

double apply(const Activation& act, double x) noexcept {
    switch (act.kind) {
    case ActivationKind::ReLU: return x > 0.0 ? x : 0.0;
    case ActivationKind::LeakyReLU: return x > 0.0 ? x : act.slope * x;
    case ActivationKind::GELU: return x * normal_cdf(x);
    case ActivationKind::Identity: break;
    }
    return x;
}

double derivative(const Activation& act, double x) noexcept {
    switch (act.kind) {
    case ActivationKind::ReLU: return x > 0.0 ? 1.0 : 0.0;
    case ActivationKind::LeakyReLU: return x > 0.0 ? 1.0 : act.slope;
    case ActivationKind::GELU: return normal_cdf(x) + x * normal_pdf(x);
    case ActivationKind::Identity: break;
    }
    return 1.0;
}

std::string to_string(const Activation& act) {
    switch (act.kind) {
    case ActivationKind::ReLU: return "relu";
    case ActivationKind::LeakyReLU: return "leaky_relu";
    case ActivationKind::GELU: return "gelu";
    case ActivationKind::Identity: break;
    }
    return "identity";
}

Activation parse_activation(std::string_view name, double slope) {
    if (name == "relu") return Activation::relu();
    if (name == "gelu") return Activation::gelu();
    if (name == "identity") return Activation::identity();
    if (name == "leaky_relu") return Activation::leaky_relu(slope);
    throw ConfigError("unknown activation '" + std::string(name) + "'");
}

} // namespace synstrip

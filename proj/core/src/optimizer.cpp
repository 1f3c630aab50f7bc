// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#include "synstrip/optimizer.hpp"

#include <cmath>
#include <numbers>

#include "synstrip/errors.hpp"

namespace synstrip {

namespace {

bool finite(std::span<const double> values) {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

struct AdamCoefficients {
    double beta1, beta2, epsilon, lr, decay, correction1, correction2;

    void update(double& theta, double& m, double& v, double g) const noexcept {
        theta -= decay * theta;
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g * g;
        const double m_hat = m / correction1;
        const double v_hat = v / correction2;
        theta -= lr * m_hat / (std::sqrt(v_hat) + epsilon);
    }
};

} // namespace

AdamState AdamState::for_network(const DenseNetwork& net, const AdamConfig& config) {
    AdamState state;
    state.config = config;
    for (const Layer& layer : net.layers) {
        state.layers.push_back({Matrix(layer.fan_in(), layer.fan_out()),
                                Matrix(layer.fan_in(), layer.fan_out()),
                                std::vector<double>(layer.fan_out(), 0.0),
                                std::vector<double>(layer.fan_out(), 0.0)});
    }
    return state;
}

void AdamState::reset_weight(std::size_t layer, std::size_t row, std::size_t col) noexcept {
    layers[layer].m_weights(row, col) = 0.0;
    layers[layer].v_weights(row, col) = 0.0;
}

void adam_step(DenseNetwork& net, const Gradients& grads, AdamState& state, double lr) {
    if (!(lr >= 0.0) || !std::isfinite(lr)) {
        throw ConfigError("adam_step: learning rate must be finite and non-negative");
    }
    if (grads.layers.size() != net.layers.size() || state.layers.size() != net.layers.size()) {
        throw ShapeError("adam_step: gradients/state do not match the network depth");
    }
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        const LayerGradients& g = grads.layers[l];
        if (!g.weights.same_shape(layer.weights) || g.bias.size() != layer.bias.size() ||
            !state.layers[l].m_weights.same_shape(layer.weights)) {
            throw ShapeError("adam_step: layer " + std::to_string(l) + " shape mismatch");
        }
        if (!finite(g.weights.data()) || !finite(g.bias)) {
            throw NumericError("adam_step: non-finite gradient in layer " + std::to_string(l));
        }
    }

    state.step_count += 1;
    const auto t = static_cast<double>(state.step_count);
    const AdamConfig& cfg = state.config;
    const AdamCoefficients coeff{cfg.beta1,
                                 cfg.beta2,
                                 cfg.epsilon,
                                 lr,
                                 lr * cfg.weight_decay,
                                 1.0 - std::pow(cfg.beta1, t),
                                 1.0 - std::pow(cfg.beta2, t)};

    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Layer& layer = net.layers[l];
        AdamState::LayerMoments& mom = state.layers[l];
        auto w = layer.weights.data();
        auto mask = layer.mask.data();
        auto gw = grads.layers[l].weights.data();
        auto mw = mom.m_weights.data();
        auto vw = mom.v_weights.data();
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (mask[i] == 0.0) {
                w[i] = 0.0;
                mw[i] = 0.0;
                vw[i] = 0.0;
                continue;
            }
            coeff.update(w[i], mw[i], vw[i], gw[i]);
        }
        for (std::size_t j = 0; j < layer.bias.size(); ++j) {
            coeff.update(layer.bias[j], mom.m_bias[j], mom.v_bias[j], grads.layers[l].bias[j]);
        }
    }
}

void validate(const ScheduleSpec& s) {
    if (!(s.lr_max > 0.0) || !(s.lr_min >= 0.0) || s.lr_min > s.lr_max) {
        throw ConfigError("schedule: need 0 <= lr_min <= lr_max and lr_max > 0");
    }
    if (s.total_epochs == 0) throw ConfigError("schedule: total_epochs must be positive");
    if (s.warmup_epochs >= s.total_epochs) {
        throw ConfigError("schedule: warmup_epochs must be smaller than total_epochs");
    }
    if (s.kind == ScheduleKind::WarmupCosine && s.warmup_epochs == 0) {
        throw ConfigError("schedule: warmup_cosine needs warmup_epochs >= 1");
    }
    if (s.kind != ScheduleKind::WarmupCosine && s.warmup_epochs != 0) {
        throw ConfigError("schedule: warmup_epochs is only valid with warmup_cosine");
    }
}

double lr_at(const ScheduleSpec& s, std::size_t epoch) {
    validate(s);
    if (epoch >= s.total_epochs) {
        throw ConfigError("lr_at: epoch " + std::to_string(epoch) + " outside schedule of " +
                          std::to_string(s.total_epochs) + " epochs");
    }
    if (s.kind == ScheduleKind::Constant) return s.lr_max;
    if (epoch < s.warmup_epochs) {
        return s.lr_max * (static_cast<double>(epoch + 1) / static_cast<double>(s.warmup_epochs));
    }
    const std::size_t span = s.total_epochs - s.warmup_epochs - 1;
    // A single decay epoch has nowhere to anneal to.
    if (span == 0) return s.lr_max;
    const double progress =
        static_cast<double>(epoch - s.warmup_epochs) / static_cast<double>(span);
    // Weighted form so both ends land exactly on lr_max and lr_min.
    const double w = 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
    return w * s.lr_max + (1.0 - w) * s.lr_min;
}

std::string to_string(ScheduleKind kind) {
    switch (kind) {
    case ScheduleKind::Cosine: return "cosine";
    case ScheduleKind::WarmupCosine: return "warmup_cosine";
    case ScheduleKind::Constant: break;
    }
    return "constant";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
    if (name == "constant") return ScheduleKind::Constant;
    if (name == "cosine") return ScheduleKind::Cosine;
    if (name == "warmup_cosine") return ScheduleKind::WarmupCosine;
    throw ConfigError("unknown schedule kind '" + std::string(name) + "'");
}

} // namespace synstrip

// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "synstrip/activations.hpp"
#include "synstrip/tensor.hpp"

namespace synstrip {

/// One fully connected layer. Weights are fan_in x fan_out, so column j holds
/// the fan-in of output neuron j. Mask entries are 0 or 1; a 0 marks a pruned
/// connection whose weight is held at exactly zero and never comes back.
struct Layer {
    Matrix weights;
    std::vector<double> bias;
    Matrix mask;
    Activation activation;

    std::size_t fan_in() const noexcept { return weights.rows(); }
    std::size_t fan_out() const noexcept { return weights.cols(); }
    std::size_t pruned_count() const noexcept;

    friend bool operator==(const Layer&, const Layer&) = default;
};

enum class InitScheme {
    KaimingUniform, ///< U(-b, b), b = sqrt(6 / fan_in)
    XavierUniform,  ///< U(-b, b), b = sqrt(6 / (fan_in + fan_out))
};

/// Multilayer perceptron. Every layer but the last is hidden; the last layer
/// is Identity and produces logits (softmax lives in the loss).
struct DenseNetwork {
    std::vector<Layer> layers;
    std::uint64_t seed = 0;

    std::size_t input_width() const noexcept { return layers.empty() ? 0 : layers.front().fan_in(); }
    std::size_t output_width() const noexcept { return layers.empty() ? 0 : layers.back().fan_out(); }
    std::size_t hidden_layer_count() const noexcept { return layers.empty() ? 0 : layers.size() - 1; }
    std::vector<std::size_t> widths() const;

    friend bool operator==(const DenseNetwork&, const DenseNetwork&) = default;
};

/// Everything the backward pass and dead-neuron detection need from a forward
/// pass. pre[l] and post[l] are batch x fan_out(l); post.back() are the logits.
struct ForwardTrace {
    Matrix input;
    std::vector<Matrix> pre;
    std::vector<Matrix> post;

    const Matrix& logits() const { return post.back(); }
    std::size_t batch_size() const noexcept { return input.rows(); }
};

struct LayerGradients {
    Matrix weights;
    std::vector<double> bias;
};

struct Gradients {
    std::vector<LayerGradients> layers;
};

struct LossAccuracy {
    double loss = 0.0;
    double accuracy = 0.0;
};

/// Builds a network with the given widths (input, hidden..., classes). Hidden
/// layers use `activation`, the output layer Identity. Biases start at zero,
/// masks at one. Deterministic in `seed`.
DenseNetwork init_network(std::span<const std::size_t> widths, const Activation& activation,
                          std::uint64_t seed, InitScheme scheme = InitScheme::KaimingUniform);

/// Checks widths chain, mask values, masked weights being zero and the output
/// layer being Identity. Throws ShapeError/ConfigError.
void validate(const DenseNetwork& net);

/// Masked weights (weights ⊙ mask) of a layer.
Matrix effective_weights(const Layer& layer);

ForwardTrace forward(const DenseNetwork& net, const Matrix& batch);

/// Gradients of the mean softmax cross-entropy. Weight gradients are masked,
/// so pruned positions come back exactly zero.
Gradients backward(const DenseNetwork& net, const ForwardTrace& trace,
                   std::span<const std::size_t> labels);

/// Mean negative log-likelihood and accuracy for precomputed logits.
LossAccuracy loss_and_accuracy(const Matrix& logits, std::span<const std::size_t> labels);
LossAccuracy loss_and_accuracy(const DenseNetwork& net, const Matrix& batch,
                               std::span<const std::size_t> labels);

/// Sets masked weights to exactly zero.
void enforce_masks(DenseNetwork& net) noexcept;

} // namespace synstrip

// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#include "synstrip/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "synstrip/errors.hpp"
#include "synstrip/random.hpp"

namespace synstrip {

namespace {

void check_labels(std::span<const std::size_t> labels, std::size_t rows, std::size_t classes) {
    if (labels.size() != rows) {
        throw ShapeError("labels: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(rows) + " rows");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= classes) {
            throw DataError("label " + std::to_string(labels[i]) + " at row " + std::to_string(i) +
                            " outside [0, " + std::to_string(classes) + ")");
        }
    }
}

double log_sum_exp(std::span<const double> row) {
    const double peak = *std::ranges::max_element(row);
    double acc = 0.0;
    for (double z : row) acc += std::exp(z - peak);
    return peak + std::log(acc);
}

} // namespace

std::size_t Layer::pruned_count() const noexcept {
    return static_cast<std::size_t>(std::ranges::count(mask.data(), 0.0));
}

std::vector<std::size_t> DenseNetwork::widths() const {
    std::vector<std::size_t> w;
    if (layers.empty()) return w;
    w.push_back(layers.front().fan_in());
    for (const auto& layer : layers) w.push_back(layer.fan_out());
    return w;
}

DenseNetwork init_network(std::span<const std::size_t> widths, const Activation& activation,
                          std::uint64_t seed, InitScheme scheme) {
    if (widths.size() < 2) throw ConfigError("init_network: need at least two layer widths");
    if (std::ranges::any_of(widths, [](std::size_t w) { return w == 0; })) {
        throw ConfigError("init_network: layer widths must be positive");
    }
    Rng rng(seed);
    DenseNetwork net;
    net.seed = seed;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const std::size_t fan_in = widths[l];
        const std::size_t fan_out = widths[l + 1];
        const double bound = scheme == InitScheme::KaimingUniform
                                 ? std::sqrt(6.0 / static_cast<double>(fan_in))
                                 : std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Layer layer;
        layer.weights = Matrix(fan_in, fan_out);
        for (double& w : layer.weights.data()) w = rng.uniform(-bound, bound);
        layer.bias.assign(fan_out, 0.0);
        layer.mask = Matrix(fan_in, fan_out, 1.0);
        layer.activation = l + 2 == widths.size() ? Activation::identity() : activation;
        net.layers.push_back(std::move(layer));
    }
    return net;
}

void validate(const DenseNetwork& net) {
    if (net.layers.empty()) throw ConfigError("network has no layers");
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        const std::string where = "layer " + std::to_string(l);
        if (!layer.mask.same_shape(layer.weights)) {
            throw ShapeError(where + ": mask " + layer.mask.shape_string() + " vs weights " +
                             layer.weights.shape_string());
        }
        if (layer.bias.size() != layer.fan_out()) throw ShapeError(where + ": bias length mismatch");
        if (l > 0 && net.layers[l - 1].fan_out() != layer.fan_in()) {
            throw ShapeError(where + ": fan_in does not match previous fan_out");
        }
        auto m = layer.mask.data();
        auto w = layer.weights.data();
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] != 0.0 && m[i] != 1.0) throw ConfigError(where + ": mask entries must be 0 or 1");
            if (m[i] == 0.0 && w[i] != 0.0) throw ConfigError(where + ": masked weight is nonzero");
        }
    }
    if (net.layers.back().activation.kind != ActivationKind::Identity) {
        throw ConfigError("output layer must use the identity activation");
    }
}

Matrix effective_weights(const Layer& layer) { return hadamard(layer.weights, layer.mask); }

ForwardTrace forward(const DenseNetwork& net, const Matrix& batch) {
    if (net.layers.empty()) throw ConfigError("forward: network has no layers");
    if (batch.cols() != net.input_width()) {
        throw ShapeError("forward: batch " + batch.shape_string() + " does not match input width " +
                         std::to_string(net.input_width()));
    }
    ForwardTrace trace;
    trace.input = batch;
    trace.pre.reserve(net.layers.size());
    trace.post.reserve(net.layers.size());
    const Matrix* x = &trace.input;
    for (const Layer& layer : net.layers) {
        Matrix pre = matmul(*x, effective_weights(layer));
        for (std::size_t r = 0; r < pre.rows(); ++r) {
            auto row = pre.row(r);
            for (std::size_t j = 0; j < row.size(); ++j) row[j] += layer.bias[j];
        }
        Matrix post = pre;
        for (double& v : post.data()) v = apply(layer.activation, v);
        trace.pre.push_back(std::move(pre));
        trace.post.push_back(std::move(post));
        x = &trace.post.back();
    }
    return trace;
}

Gradients backward(const DenseNetwork& net, const ForwardTrace& trace,
                   std::span<const std::size_t> labels) {
    const std::size_t depth = net.layers.size();
    if (trace.pre.size() != depth || trace.post.size() != depth) {
        throw UsageError("backward: trace was not produced by this network");
    }
    const Matrix& logits = trace.logits();
    check_labels(labels, logits.rows(), logits.cols());
    const std::size_t batch = logits.rows();
    const double inv_batch = 1.0 / static_cast<double>(batch);

    // d(mean CE)/d(logits) = (softmax - onehot) / batch
    Matrix delta(batch, logits.cols());
    for (std::size_t r = 0; r < batch; ++r) {
        auto z = logits.row(r);
        const double lse = log_sum_exp(z);
        auto d = delta.row(r);
        for (std::size_t j = 0; j < z.size(); ++j) d[j] = std::exp(z[j] - lse) * inv_batch;
        d[labels[r]] -= inv_batch;
    }

    Gradients grads;
    grads.layers.resize(depth);
    for (std::size_t l = depth; l-- > 0;) {
        const Layer& layer = net.layers[l];
        // delta currently holds dL/d(post[l]); fold in the activation derivative.
        if (layer.activation.kind != ActivationKind::Identity) {
            auto d = delta.data();
            auto p = trace.pre[l].data();
            for (std::size_t i = 0; i < d.size(); ++i) d[i] *= derivative(layer.activation, p[i]);
        }
        const Matrix& x = l == 0 ? trace.input : trace.post[l - 1];
        LayerGradients& g = grads.layers[l];
        g.weights = hadamard(matmul_tn(x, delta), layer.mask);
        g.bias = col_sum(delta);
        if (l > 0) delta = matmul_nt(delta, effective_weights(layer));
    }
    return grads;
}

LossAccuracy loss_and_accuracy(const Matrix& logits, std::span<const std::size_t> labels) {
    check_labels(labels, logits.rows(), logits.cols());
    if (logits.rows() == 0) return {};
    double total = 0.0;
    std::size_t correct = 0;
    const auto predicted = argmax_rows(logits);
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        auto z = logits.row(r);
        total += log_sum_exp(z) - z[labels[r]];
        if (predicted[r] == labels[r]) ++correct;
    }
    const auto n = static_cast<double>(logits.rows());
    return {total / n, static_cast<double>(correct) / n};
}

LossAccuracy loss_and_accuracy(const DenseNetwork& net, const Matrix& batch,
                               std::span<const std::size_t> labels) {
    return loss_and_accuracy(forward(net, batch).logits(), labels);
}

void enforce_masks(DenseNetwork& net) noexcept {
    for (Layer& layer : net.layers) {
        auto m = layer.mask.data();
        auto w = layer.weights.data();
        for (std::size_t i = 0; i < m.size(); ++i)
            if (m[i] == 0.0) w[i] = 0.0;
    }
}

} // namespace synstrip

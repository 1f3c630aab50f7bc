// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "synstrip/capacity.hpp"
#include "synstrip/detection.hpp"
#include "synstrip/network.hpp"
#include "synstrip/optimizer.hpp"
#include "synstrip/random.hpp"
#include "synstrip/stripping.hpp"

using namespace synstrip;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.uniform(-1.0, 1.0);
    return m;
}

std::vector<std::size_t> random_labels(std::size_t n, std::size_t classes, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::size_t> y(n);
    for (auto& v : y) v = rng.below(classes);
    return y;
}

// CIFAR-shaped MLP: 3072 inputs, `depth` x `width` hidden, 10 classes.
DenseNetwork cifar_mlp(std::size_t width, std::size_t depth) {
    std::vector<std::size_t> widths{3072};
    for (std::size_t d = 0; d < depth; ++d) widths.push_back(width);
    widths.push_back(10);
    return init_network(widths, Activation::relu(), 1);
}

void BM_Matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = random_matrix(64, 3072, 1);
    const Matrix b = random_matrix(3072, n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(64 * 3072 * n));
}
BENCHMARK(BM_Matmul)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
    DenseNetwork net = cifar_mlp(static_cast<std::size_t>(state.range(0)), 2);
    AdamState adam = AdamState::for_network(net);
    const Matrix x = random_matrix(64, 3072, 3);
    const auto y = random_labels(64, 10, 4);
    for (auto _ : state) adam_step(net, backward(net, forward(net, x), y), adam, 1e-3);
    state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_TrainStep)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_DetectionScan(benchmark::State& state) {
    const DenseNetwork net = cifar_mlp(256, 2);
    const Matrix x = random_matrix(static_cast<std::size_t>(state.range(0)), 3072, 5);
    for (auto _ : state) benchmark::DoNotOptimize(find_dead(scan_activations(net, x, 1000)));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DetectionScan)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Strip(benchmark::State& state) {
    const DenseNetwork fresh = cifar_mlp(256, 2);
    DeadSet dead = DeadSet::none(fresh);
    for (std::size_t j = 0; j < static_cast<std::size_t>(state.range(0)); ++j) dead.layers[0].push_back(j);
    for (auto _ : state) {
        state.PauseTiming();
        DenseNetwork net = fresh;
        state.ResumeTiming();
        benchmark::DoNotOptimize(strip(net, dead, StrippingPolicy{}));
    }
}
BENCHMARK(BM_Strip)->Arg(16)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_ActiveParameters(benchmark::State& state) {
    const DenseNetwork net = cifar_mlp(512, 4);
    DeadSet dead = DeadSet::none(net);
    for (auto& layer : dead.layers)
        for (std::size_t j = 0; j < 512; j += 7) layer.push_back(j);
    for (auto _ : state) benchmark::DoNotOptimize(active_parameters(net, dead));
}
BENCHMARK(BM_ActiveParameters)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();

// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synstrip/activations.hpp"
#include "synstrip/data.hpp"
#include "synstrip/detection.hpp"
#include "synstrip/network.hpp"
#include "synstrip/optimizer.hpp"
#include "synstrip/stripping.hpp"

namespace synstrip {

enum class DataKind { Synthetic, Cifar10, Cifar100, Idx };

struct DataSpec {
    DataKind kind = DataKind::Synthetic;
    std::filesystem::path path;   ///< CIFAR directory
    std::filesystem::path images; ///< IDX images
    std::filesystem::path labels; ///< IDX labels
    std::size_t classes = 3;      ///< synthetic only
    std::size_t samples_per_class = 100;
    std::size_t dim = 8;
    std::uint64_t seed = 0;       ///< synthetic generator seed
    /// Keep only the first N rows of the training partition.
    std::optional<std::size_t> max_samples;
    SplitSpec split;
};

struct DetectionSpec {
    DetectionSource source = DetectionSource::Validation;
    double threshold = 0.0;
    std::size_t batch_size = 1000;
};

struct TrackedNeuron {
    std::size_t layer = 0;
    std::size_t neuron = 0;
};

struct OutputSpec {
    std::filesystem::path dir; ///< empty: nothing is written
    bool record_wall_time = false;
    bool checkpoint = true;
    std::size_t histogram_bins = 20;
    std::vector<TrackedNeuron> histograms;
};

struct ExperimentConfig {
    std::vector<std::size_t> layer_widths; ///< input, hidden..., classes
    Activation activation = Activation::relu();
    InitScheme init = InitScheme::KaimingUniform;
    std::uint64_t seed = 0;
    std::size_t epochs = 50;
    std::size_t batch_size = 64;
    double lr = 1e-3;
    AdamConfig adam;
    ScheduleKind schedule = ScheduleKind::Constant;
    double lr_min = 1e-5;
    std::size_t warmup_epochs = 0;
    std::optional<StrippingPolicy> stripping = StrippingPolicy{};
    DetectionSpec detection;
    DataSpec data;
    OutputSpec output;

    ScheduleSpec schedule_spec() const;
    /// Field-level checks that do not need the dataset. Throws ConfigError.
    void validate() const;
};

/// Parses the JSON config format. Every key is optional (defaults above) but
/// unknown keys are rejected with their dotted path.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config; parse_config(dump_config(c)) reproduces c.
std::string dump_config(const ExperimentConfig& cfg);

std::string to_string(DataKind kind);

} // namespace synstrip

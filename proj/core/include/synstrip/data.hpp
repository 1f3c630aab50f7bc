// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synstrip/tensor.hpp"

namespace synstrip {

/// Flattened samples with integer class labels.
struct Dataset {
    Matrix features; ///< samples x feature_dim
    std::vector<std::size_t> labels;
    std::size_t class_count = 0;
    std::string name;
    /// First row of the official held-out partition, when the source has one
    /// (CIFAR test batch). Rows before it form the official training partition.
    std::optional<std::size_t> holdout_begin;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t feature_dim() const noexcept { return features.cols(); }

    /// Rows in the given order; the holdout marker is dropped.
    Dataset subset(std::span<const std::size_t> rows) const;

    /// Throws DataError unless labels fit class_count and row counts agree.
    void validate() const;
};

struct SplitSpec {
    double train_frac = 0.8;
    double val_frac = 0.1;
    double test_frac = 0.1;
    std::uint64_t seed = 0;
};

struct Splits {
    Dataset train;
    Dataset val;
    Dataset test;
};

/// Seeded permutation followed by a contiguous partition. Validation and test
/// get floor(frac * n) rows each, training gets the remainder.
Splits split(const Dataset& ds, const SplitSpec& spec);
/// Same, over the first `prefix_rows` rows only (no intermediate copy).
Splits split(const Dataset& ds, const SplitSpec& spec, std::size_t prefix_rows);

enum class CifarVariant { Cifar10, Cifar100 };

struct ChannelStats {
    std::array<double, 3> mean;
    std::array<double, 3> stddev;
};

ChannelStats cifar_normalization(CifarVariant variant) noexcept;

/// Parses one CIFAR binary batch file (label byte(s) + 3072 channel-major
/// pixel bytes per record). Pixels are scaled to [0, 1] and channel
/// normalized. CIFAR-100 records carry coarse then fine label; fine is used.
Dataset load_cifar_batch(const std::filesystem::path& file, CifarVariant variant);

/// Loads the full dataset from the extracted binary distribution directory
/// (either the directory holding the .bin files or its parent). Training
/// batches come first; holdout_begin marks the start of the test batch.
Dataset load_cifar(const std::filesystem::path& dir, CifarVariant variant);

/// IDX container: unsigned-byte images (magic 0x000008NN with 2..4 dims) and
/// labels (magic 0x00000801). Pixels are scaled to [0, 1].
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

/// Isotropic Gaussian blobs (sigma 0.5) around seeded random unit-norm means.
Dataset synthetic_gaussian(std::size_t classes, std::size_t samples_per_class, std::size_t dim,
                           std::uint64_t seed);

} // namespace synstrip

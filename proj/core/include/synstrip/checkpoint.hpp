// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "synstrip/network.hpp"

namespace synstrip {

/// Binary checkpoint, all integers and reals little-endian:
///
///   "SYNS"  u32 version  u32 layer_count
///   per layer:
///     u32 fan_in  u32 fan_out  u8 activation tag
///     [f64 slope]                 only for LeakyReLU (tag 2)
///     f64 weights[fan_in*fan_out] row-major
///     f64 bias[fan_out]
///     mask bits, row-major, LSB first, ceil(fan_in*fan_out / 8) bytes
///
/// Tags: 0 identity, 1 relu, 2 leaky_relu, 3 gelu.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const DenseNetwork& net);
DenseNetwork decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const DenseNetwork& net, const std::filesystem::path& path);
DenseNetwork load_checkpoint(const std::filesystem::path& path);

} // namespace synstrip

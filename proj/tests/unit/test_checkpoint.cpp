// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstring>

#include "../support/oracles.hpp"
#include "synstrip/checkpoint.hpp"
#include "synstrip/errors.hpp"

using namespace synstrip;

namespace {

std::uint32_t le32(const std::vector<std::uint8_t>& b, std::size_t at) {
    return std::uint32_t{b[at]} | (std::uint32_t{b[at + 1]} << 8) | (std::uint32_t{b[at + 2]} << 16) |
           (std::uint32_t{b[at + 3]} << 24);
}

double le64f(const std::vector<std::uint8_t>& b, std::size_t at) {
    std::uint64_t u = 0;
    for (int k = 7; k >= 0; --k) u = (u << 8) | b[at + static_cast<std::size_t>(k)];
    double d;
    std::memcpy(&d, &u, sizeof d);
    return d;
}

} // namespace

TEST_CASE("round trip preserves the forward pass bit for bit") {
    Rng rng(12);
    for (const Activation act : {Activation::relu(), Activation::gelu(), Activation::leaky_relu(0.1)}) {
        const std::vector<std::size_t> widths{7, 9, 5, 3};
        DenseNetwork net = init_network(widths, act, 4);
        for (auto& layer : net.layers) {
            for (double& m : layer.mask.data())
                if (rng.uniform() < 0.25) m = 0.0;
            for (double& b : layer.bias) b = rng.uniform(-1, 1);
        }
        enforce_masks(net);
        const DenseNetwork back = decode_checkpoint(encode_checkpoint(net));
        CHECK(back.layers.size() == net.layers.size());
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            CHECK(back.layers[l].weights == net.layers[l].weights);
            CHECK(back.layers[l].mask == net.layers[l].mask);
            CHECK(back.layers[l].bias == net.layers[l].bias);
            CHECK(back.layers[l].activation.kind == net.layers[l].activation.kind);
            CHECK(back.layers[l].activation.slope == net.layers[l].activation.slope);
        }
        const Matrix x = oracle::random_matrix(rng, 11, 7, -2, 2);
        CHECK(forward(back, x).logits() == forward(net, x).logits());
    }
}

TEST_CASE("byte layout") {
    const std::vector<std::size_t> widths{3, 2, 2};
    DenseNetwork net = init_network(widths, Activation::relu(), 1);
    net.layers[0].weights = Matrix{{1.5, -2.0}, {0.25, 3.0}, {-1.0, 0.5}};
    net.layers[0].mask = Matrix{{1, 0}, {1, 1}, {0, 1}};
    net.layers[0].bias = {0.125, -0.5};
    enforce_masks(net);
    const auto b = encode_checkpoint(net);

    CHECK(std::memcmp(b.data(), "SYNS", 4) == 0);
    CHECK(le32(b, 4) == 1);
    CHECK(le32(b, 8) == 2);
    CHECK(le32(b, 12) == 3);
    CHECK(le32(b, 16) == 2);
    CHECK(b[20] == 1); // relu
    CHECK(le64f(b, 21) == 1.5);
    CHECK(le64f(b, 29) == 0.0); // masked weights are stored as zero
    CHECK(le64f(b, 21 + 8 * 5) == 0.5);
    CHECK(le64f(b, 21 + 8 * 6) == 0.125);
    CHECK(le64f(b, 21 + 8 * 7) == -0.5);
    // mask bits row-major LSB first: 1 0 1 1 0 1 -> 0b101101
    CHECK(b[21 + 8 * 8] == 0x2D);
    const std::size_t second = 21 + 8 * 8 + 1;
    CHECK(le32(b, second) == 2);
    CHECK(le32(b, second + 4) == 2);
    CHECK(b[second + 8] == 0); // identity output layer
    CHECK(b.size() == second + 9 + 8 * 4 + 8 * 2 + 1);
}

TEST_CASE("leaky relu stores its slope") {
    const std::vector<std::size_t> widths{2, 2, 2};
    const DenseNetwork net = init_network(widths, Activation::leaky_relu(0.2), 1);
    const auto b = encode_checkpoint(net);
    CHECK(b[20] == 2);
    CHECK(le64f(b, 21) == 0.2);
}

TEST_CASE("malformed input") {
    const std::vector<std::size_t> widths{3, 4, 2};
    const auto good = encode_checkpoint(init_network(widths, Activation::relu(), 1));

    auto bad_magic = good;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(decode_checkpoint(bad_magic), FormatError);

    auto bad_version = good;
    bad_version[4] = 7;
    CHECK_THROWS_AS(decode_checkpoint(bad_version), FormatError);

    auto bad_tag = good;
    bad_tag[20] = 9;
    CHECK_THROWS_AS(decode_checkpoint(bad_tag), FormatError);

    auto trailing = good;
    trailing.push_back(0);
    CHECK_THROWS_AS(decode_checkpoint(trailing), FormatError);

    for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{10}, good.size() / 2, good.size() - 1}) {
        const std::vector<std::uint8_t> part(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(cut));
        CHECK_THROWS_AS(decode_checkpoint(part), FormatError);
    }
    try {
        decode_checkpoint(std::vector<std::uint8_t>(good.begin(), good.begin() + 30));
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
    }
}

TEST_CASE("file round trip") {
    const auto path = std::filesystem::temp_directory_path() / "synstrip_ckpt_test.ckpt";
    const std::vector<std::size_t> widths{4, 3, 2};
    const DenseNetwork net = init_network(widths, Activation::relu(), 9);
    save_checkpoint(net, path);
    const DenseNetwork back = load_checkpoint(path);
    CHECK(back.layers[0].weights == net.layers[0].weights);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_checkpoint(path), FormatError);
}

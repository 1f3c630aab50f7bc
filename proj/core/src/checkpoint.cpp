// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#include "synstrip/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "synstrip/errors.hpp"

namespace synstrip {

namespace {

constexpr char kMagic[4] = {'S', 'Y', 'N', 'S'};

class Writer {
public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        out_.insert(out_.end(), p, p + n);
    }
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    void need(std::size_t n, const char* what) const {
        if (pos_ + n > in_.size()) {
            throw FormatError(std::string("checkpoint: truncated ") + what + " at byte offset " +
                              std::to_string(pos_));
        }
    }
    std::uint8_t u8(const char* what) {
        need(1, what);
        return in_[pos_++];
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t{in_[pos_++]} << (8 * i);
        return v;
    }
    double f64(const char* what) {
        need(8, what);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= std::uint64_t{in_[pos_++]} << (8 * i);
        return std::bit_cast<double>(bits);
    }
    std::size_t position() const noexcept { return pos_; }
    bool at_end() const noexcept { return pos_ == in_.size(); }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<std::uint8_t> encode_checkpoint(const DenseNetwork& net) {
    validate(net);
    Writer w;
    w.bytes(kMagic, sizeof kMagic);
    w.u32(kCheckpointVersion);
    w.u32(static_cast<std::uint32_t>(net.layers.size()));
    for (const Layer& layer : net.layers) {
        w.u32(static_cast<std::uint32_t>(layer.fan_in()));
        w.u32(static_cast<std::uint32_t>(layer.fan_out()));
        w.u8(static_cast<std::uint8_t>(layer.activation.kind));
        if (layer.activation.kind == ActivationKind::LeakyReLU) w.f64(layer.activation.slope);
        for (double v : layer.weights.data()) w.f64(v);
        for (double v : layer.bias) w.f64(v);
        const auto mask = layer.mask.data();
        for (std::size_t base = 0; base < mask.size(); base += 8) {
            std::uint8_t packed = 0;
            for (std::size_t b = 0; b < 8 && base + b < mask.size(); ++b)
                if (mask[base + b] != 0.0) packed |= static_cast<std::uint8_t>(1u << b);
            w.u8(packed);
        }
    }
    return w.take();
}

DenseNetwork decode_checkpoint(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    r.need(4, "magic");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("checkpoint: bad magic");
    for (int i = 0; i < 4; ++i) r.u8("magic");
    const std::uint32_t version = r.u32("version");
    if (version != kCheckpointVersion) {
        throw FormatError("checkpoint: unsupported version " + std::to_string(version));
    }
    const std::uint32_t count = r.u32("layer count");
    if (count == 0) throw FormatError("checkpoint: no layers");
    DenseNetwork net;
    for (std::uint32_t l = 0; l < count; ++l) {
        const std::size_t fan_in = r.u32("fan_in");
        const std::size_t fan_out = r.u32("fan_out");
        const std::size_t tag_offset = r.position();
        const std::uint8_t tag = r.u8("activation tag");
        Layer layer;
        switch (tag) {
        case 0: layer.activation = Activation::identity(); break;
        case 1: layer.activation = Activation::relu(); break;
        case 2: layer.activation = Activation::leaky_relu(r.f64("slope")); break;
        case 3: layer.activation = Activation::gelu(); break;
        default:
            throw FormatError("checkpoint: unknown activation tag " + std::to_string(tag) +
                              " at byte offset " + std::to_string(tag_offset));
        }
        const std::size_t n = fan_in * fan_out;
        r.need(8 * (n + fan_out) + (n + 7) / 8, "layer payload");
        layer.weights = Matrix(fan_in, fan_out);
        for (double& v : layer.weights.data()) v = r.f64("weights");
        layer.bias.resize(fan_out);
        for (double& v : layer.bias) v = r.f64("bias");
        layer.mask = Matrix(fan_in, fan_out);
        auto mask = layer.mask.data();
        for (std::size_t base = 0; base < n; base += 8) {
            const std::uint8_t packed = r.u8("mask");
            for (std::size_t b = 0; b < 8 && base + b < n; ++b)
                mask[base + b] = (packed >> b) & 1u ? 1.0 : 0.0;
        }
        net.layers.push_back(std::move(layer));
    }
    if (!r.at_end()) {
        throw FormatError("checkpoint: trailing bytes at byte offset " + std::to_string(r.position()));
    }
    try {
        validate(net);
    } catch (const Error& e) {
        throw FormatError(std::string("checkpoint: ") + e.what());
    }
    return net;
}

void save_checkpoint(const DenseNetwork& net, const std::filesystem::path& path) {
    const auto bytes = encode_checkpoint(net);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("short write to '" + path.string() + "'");
}

DenseNetwork load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                          std::istreambuf_iterator<char>()};
    return decode_checkpoint(bytes);
}

} // namespace synstrip

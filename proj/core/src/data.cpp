// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#include "synstrip/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numeric>

#include "synstrip/errors.hpp"
#include "synstrip/random.hpp"

namespace synstrip {

namespace {

constexpr std::size_t kCifarPixels = 3072;
constexpr std::size_t kCifarPlane = 1024;

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset,
                        const std::filesystem::path& path) {
    if (offset + 4 > bytes.size()) {
        throw FormatError("'" + path.string() + "': truncated header at byte offset " +
                          std::to_string(offset));
    }
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

std::string hex32(std::uint32_t value) {
    char buf[11];
    std::snprintf(buf, sizeof buf, "0x%08X", value);
    return buf;
}

} // namespace

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.features = gather_rows(features, rows);
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) out.labels.push_back(labels[r]);
    out.class_count = class_count;
    out.name = name;
    return out;
}

void Dataset::validate() const {
    if (features.rows() != labels.size()) {
        throw DataError(name + ": " + std::to_string(features.rows()) + " feature rows vs " +
                        std::to_string(labels.size()) + " labels");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= class_count) {
            throw DataError(name + ": label " + std::to_string(labels[i]) + " at row " +
                            std::to_string(i) + " outside [0, " + std::to_string(class_count) + ")");
        }
    }
}

Splits split(const Dataset& ds, const SplitSpec& spec) { return split(ds, spec, ds.size()); }

Splits split(const Dataset& ds, const SplitSpec& spec, std::size_t prefix_rows) {
    const double fracs[] = {spec.train_frac, spec.val_frac, spec.test_frac};
    if (std::ranges::any_of(fracs, [](double f) { return !(f > 0.0); })) {
        throw ConfigError("split: fractions must be positive");
    }
    if (std::abs(spec.train_frac + spec.val_frac + spec.test_frac - 1.0) > 1e-12) {
        throw ConfigError("split: fractions must sum to 1");
    }
    if (prefix_rows > ds.size()) {
        throw DataError("split: prefix of " + std::to_string(prefix_rows) + " rows exceeds " +
                        std::to_string(ds.size()));
    }
    const std::size_t n = prefix_rows;
    const auto n_val = static_cast<std::size_t>(std::floor(spec.val_frac * static_cast<double>(n)));
    const auto n_test = static_cast<std::size_t>(std::floor(spec.test_frac * static_cast<double>(n)));
    if (n_val == 0 || n_test == 0 || n_val + n_test >= n) {
        throw ConfigError("split: " + std::to_string(n) + " samples leave an empty partition");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(spec.seed);
    rng.shuffle(order);
    const std::size_t n_train = n - n_val - n_test;
    std::span<const std::size_t> all(order);
    return {ds.subset(all.subspan(0, n_train)), ds.subset(all.subspan(n_train, n_val)),
            ds.subset(all.subspan(n_train + n_val, n_test))};
}

ChannelStats cifar_normalization(CifarVariant variant) noexcept {
    if (variant == CifarVariant::Cifar100) {
        return {{0.5071, 0.4867, 0.4408}, {0.2675, 0.2565, 0.2761}};
    }
    return {{0.4914, 0.4822, 0.4465}, {0.2023, 0.1994, 0.2010}};
}

Dataset load_cifar_batch(const std::filesystem::path& file, CifarVariant variant) {
    const auto bytes = read_file(file);
    const std::size_t label_bytes = variant == CifarVariant::Cifar100 ? 2 : 1;
    const std::size_t record = label_bytes + kCifarPixels;
    if (bytes.empty()) throw FormatError("'" + file.string() + "': empty file at byte offset 0");
    if (bytes.size() % record != 0) {
        throw FormatError("'" + file.string() + "': truncated record at byte offset " +
                          std::to_string(bytes.size() - bytes.size() % record));
    }
    const std::size_t n = bytes.size() / record;
    const ChannelStats stats = cifar_normalization(variant);
    Dataset ds;
    ds.name = variant == CifarVariant::Cifar100 ? "cifar100" : "cifar10";
    ds.class_count = variant == CifarVariant::Cifar100 ? 100 : 10;
    ds.features = Matrix(n, kCifarPixels);
    ds.labels.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t base = r * record;
        const std::size_t label = bytes[base + label_bytes - 1];
        if (label >= ds.class_count) {
            throw FormatError("'" + file.string() + "': label " + std::to_string(label) +
                              " out of range at byte offset " + std::to_string(base + label_bytes - 1));
        }
        ds.labels[r] = label;
        auto row = ds.features.row(r);
        for (std::size_t p = 0; p < kCifarPixels; ++p) {
            const std::size_t channel = p / kCifarPlane;
            const double scaled = static_cast<double>(bytes[base + label_bytes + p]) / 255.0;
            row[p] = (scaled - stats.mean[channel]) / stats.stddev[channel];
        }
    }
    return ds;
}

Dataset load_cifar(const std::filesystem::path& dir, CifarVariant variant) {
    std::vector<std::string> train_files;
    std::string test_file;
    std::filesystem::path root = dir;
    if (variant == CifarVariant::Cifar10) {
        for (int i = 1; i <= 5; ++i) train_files.push_back("data_batch_" + std::to_string(i) + ".bin");
        test_file = "test_batch.bin";
        if (!std::filesystem::exists(root / test_file) &&
            std::filesystem::exists(root / "cifar-10-batches-bin" / test_file)) {
            root /= "cifar-10-batches-bin";
        }
    } else {
        train_files.push_back("train.bin");
        test_file = "test.bin";
        if (!std::filesystem::exists(root / test_file) &&
            std::filesystem::exists(root / "cifar-100-binary" / test_file)) {
            root /= "cifar-100-binary";
        }
    }
    std::vector<Dataset> parts;
    for (const auto& f : train_files) parts.push_back(load_cifar_batch(root / f, variant));
    parts.push_back(load_cifar_batch(root / test_file, variant));

    std::size_t rows = 0;
    for (const auto& p : parts) rows += p.size();
    Dataset all;
    all.name = parts.front().name;
    all.class_count = parts.front().class_count;
    std::vector<double> features;
    features.reserve(rows * kCifarPixels);
    all.labels.reserve(rows);
    for (auto& p : parts) {
        if (&p == &parts.back()) all.holdout_begin = all.labels.size();
        features.insert(features.end(), p.features.data().begin(), p.features.data().end());
        all.labels.insert(all.labels.end(), p.labels.begin(), p.labels.end());
        p = Dataset{};
    }
    all.features = Matrix(rows, kCifarPixels, std::move(features));
    return all;
}

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
    const auto img = read_file(images);
    const auto lab = read_file(labels);

    const std::uint32_t img_magic = read_be32(img, 0, images);
    const std::uint32_t dims = img_magic & 0xFFu;
    if ((img_magic >> 8) != 0x08u || dims < 2 || dims > 4) {
        throw FormatError("'" + images.string() + "': bad IDX image magic " + hex32(img_magic));
    }
    if (read_be32(lab, 0, labels) != 0x00000801u) {
        throw FormatError("'" + labels.string() + "': bad IDX label magic");
    }
    const std::size_t n = read_be32(img, 4, images);
    std::size_t feature_dim = 1;
    for (std::uint32_t d = 1; d < dims; ++d) feature_dim *= read_be32(img, 4 + 4 * d, images);
    const std::size_t img_header = 4 + 4 * dims;
    const std::size_t n_labels = read_be32(lab, 4, labels);
    if (n != n_labels) {
        throw DataError("IDX: " + std::to_string(n) + " images but " + std::to_string(n_labels) +
                        " labels");
    }
    if (img.size() < img_header + n * feature_dim) {
        throw FormatError("'" + images.string() + "': truncated pixel data at byte offset " +
                          std::to_string(img.size()));
    }
    if (lab.size() < 8 + n) {
        throw FormatError("'" + labels.string() + "': truncated label data at byte offset " +
                          std::to_string(lab.size()));
    }
    Dataset ds;
    ds.name = images.stem().string();
    ds.features = Matrix(n, feature_dim);
    auto out = ds.features.data();
    for (std::size_t i = 0; i < n * feature_dim; ++i) {
        out[i] = static_cast<double>(img[img_header + i]) / 255.0;
    }
    ds.labels.resize(n);
    std::size_t max_label = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ds.labels[i] = lab[8 + i];
        max_label = std::max(max_label, ds.labels[i]);
    }
    ds.class_count = n == 0 ? 0 : max_label + 1;
    return ds;
}

Dataset synthetic_gaussian(std::size_t classes, std::size_t samples_per_class, std::size_t dim,
                           std::uint64_t seed) {
    if (classes == 0 || samples_per_class == 0 || dim == 0) {
        throw ConfigError("synthetic_gaussian: counts must be positive");
    }
    constexpr double kSigma = 0.5;
    Rng rng(seed);
    Matrix means(classes, dim);
    for (std::size_t c = 0; c < classes; ++c) {
        auto mu = means.row(c);
        double norm = 0.0;
        while (norm == 0.0) {
            norm = 0.0;
            for (double& v : mu) {
                v = rng.normal();
                norm += v * v;
            }
        }
        norm = std::sqrt(norm);
        for (double& v : mu) v /= norm;
    }
    Dataset ds;
    ds.name = "synthetic";
    ds.class_count = classes;
    ds.features = Matrix(classes * samples_per_class, dim);
    ds.labels.resize(classes * samples_per_class);
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t s = 0; s < samples_per_class; ++s) {
            const std::size_t r = c * samples_per_class + s;
            ds.labels[r] = c;
            auto row = ds.features.row(r);
            auto mu = means.row(c);
            for (std::size_t k = 0; k < dim; ++k) row[k] = mu[k] + kSigma * rng.normal();
        }
    }
    return ds;
}

} // namespace synstrip

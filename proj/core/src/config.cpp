// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#include "synstrip/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "synstrip/errors.hpp"

namespace synstrip {

namespace {

using json = nlohmann::json;

// Reads keys from one JSON object and remembers which were consumed, so that
// anything left over can be reported as unknown.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(display() + " must be an object");
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    template <class T>
    void read(const std::string& key, T& target) {
        seen_.insert(key);
        if (!node_.contains(key)) return;
        const json& value = node_.at(key);
        if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
            if (!value.is_number_unsigned()) throw ConfigError(where(key) + ": expected a non-negative integer");
        }
        if constexpr (std::is_same_v<T, std::vector<std::size_t>>) {
            if (!value.is_array()) throw ConfigError(where(key) + ": expected an array");
            for (const json& item : value)
                if (!item.is_number_unsigned()) throw ConfigError(where(key) + ": expected non-negative integers");
        }
        try {
            target = value.get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(where(key) + ": " + e.what());
        }
    }

    template <class T>
    void read(const std::string& key, std::optional<T>& target) {
        seen_.insert(key);
        if (!node_.contains(key) || node_.at(key).is_null()) return;
        T value{};
        read(key, value);
        target = value;
    }

    Section child(const std::string& key) {
        seen_.insert(key);
        static const json empty = json::object();
        return Section(node_.contains(key) ? node_.at(key) : empty, where(key));
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return node_.at(key);
    }

    std::string where(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    void finish() const {
        for (const auto& [key, value] : node_.items()) {
            if (!seen_.contains(key)) throw ConfigError("unknown config key '" + where(key) + "'");
        }
    }

private:
    std::string display() const { return path_.empty() ? "config" : "'" + path_ + "'"; }

    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

DataKind parse_data_kind(const std::string& name) {
    if (name == "synthetic") return DataKind::Synthetic;
    if (name == "cifar10") return DataKind::Cifar10;
    if (name == "cifar100") return DataKind::Cifar100;
    if (name == "idx") return DataKind::Idx;
    throw ConfigError("unknown data kind '" + name + "'");
}

InitScheme parse_init(const std::string& name) {
    if (name == "kaiming_uniform") return InitScheme::KaimingUniform;
    if (name == "xavier_uniform") return InitScheme::XavierUniform;
    throw ConfigError("unknown init scheme '" + name + "'");
}

std::string init_name(InitScheme scheme) {
    return scheme == InitScheme::XavierUniform ? "xavier_uniform" : "kaiming_uniform";
}

} // namespace

std::string to_string(DataKind kind) {
    switch (kind) {
    case DataKind::Cifar10: return "cifar10";
    case DataKind::Cifar100: return "cifar100";
    case DataKind::Idx: return "idx";
    case DataKind::Synthetic: break;
    }
    return "synthetic";
}

ScheduleSpec ExperimentConfig::schedule_spec() const {
    return {schedule, lr, lr_min, warmup_epochs, epochs};
}

void ExperimentConfig::validate() const {
    if (layer_widths.size() < 2) throw ConfigError("model.layer_widths needs at least two entries");
    for (std::size_t w : layer_widths)
        if (w == 0) throw ConfigError("model.layer_widths entries must be positive");
    if (epochs == 0) throw ConfigError("epochs must be at least 1");
    if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
        throw ConfigError("optimizer betas must lie in [0, 1)");
    }
    if (!(adam.epsilon > 0.0)) throw ConfigError("optimizer.epsilon must be positive");
    if (!(adam.weight_decay >= 0.0)) throw ConfigError("optimizer.weight_decay must be non-negative");
    synstrip::validate(schedule_spec());
    if (stripping) stripping->validate();
    if (!(detection.threshold >= 0.0)) throw ConfigError("detection.threshold must be non-negative");
    if (detection.batch_size == 0) throw ConfigError("detection.batch_size must be at least 1");
    if (output.histogram_bins == 0) throw ConfigError("output.histogram_bins must be at least 1");
    for (const auto& t : output.histograms) {
        if (t.layer + 2 >= layer_widths.size() || t.neuron >= layer_widths[t.layer + 1]) {
            throw ConfigError("output.histograms: no hidden neuron " + std::to_string(t.neuron) +
                              " in layer " + std::to_string(t.layer));
        }
    }
}

ExperimentConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig cfg;
    Section top(doc, "");
    top.read("seed", cfg.seed);
    top.read("epochs", cfg.epochs);
    top.read("batch_size", cfg.batch_size);

    {
        Section model = top.child("model");
        model.read("layer_widths", cfg.layer_widths);
        std::string activation = to_string(cfg.activation);
        double slope = 0.01;
        std::string init = init_name(cfg.init);
        model.read("activation", activation);
        model.read("leaky_slope", slope);
        model.read("init", init);
        cfg.activation = parse_activation(activation, slope);
        cfg.init = parse_init(init);
        model.finish();
    }
    {
        Section opt = top.child("optimizer");
        opt.read("lr", cfg.lr);
        opt.read("beta1", cfg.adam.beta1);
        opt.read("beta2", cfg.adam.beta2);
        opt.read("epsilon", cfg.adam.epsilon);
        opt.read("weight_decay", cfg.adam.weight_decay);
        opt.finish();
    }
    {
        Section sched = top.child("schedule");
        std::string kind = to_string(cfg.schedule);
        sched.read("kind", kind);
        cfg.schedule = parse_schedule_kind(kind);
        sched.read("lr_min", cfg.lr_min);
        sched.read("warmup_epochs", cfg.warmup_epochs);
        sched.finish();
    }
    {
        Section strip = top.child("stripping");
        bool enabled = true;
        StrippingPolicy policy;
        strip.read("enabled", enabled);
        strip.read("fraction", policy.fraction);
        strip.read("min_remaining", policy.min_remaining);
        strip.read("cadence", policy.cadence);
        strip.finish();
        cfg.stripping = enabled ? std::optional<StrippingPolicy>(policy) : std::nullopt;
    }
    {
        Section det = top.child("detection");
        std::string source = to_string(cfg.detection.source);
        det.read("source", source);
        cfg.detection.source = parse_detection_source(source);
        det.read("threshold", cfg.detection.threshold);
        det.read("batch_size", cfg.detection.batch_size);
        det.finish();
    }
    {
        Section data = top.child("data");
        std::string kind = to_string(cfg.data.kind);
        std::string path, images, labels;
        data.read("kind", kind);
        cfg.data.kind = parse_data_kind(kind);
        data.read("path", path);
        data.read("images", images);
        data.read("labels", labels);
        cfg.data.path = path;
        cfg.data.images = images;
        cfg.data.labels = labels;
        data.read("classes", cfg.data.classes);
        data.read("samples_per_class", cfg.data.samples_per_class);
        data.read("dim", cfg.data.dim);
        data.read("seed", cfg.data.seed);
        data.read("max_samples", cfg.data.max_samples);
        Section sp = data.child("split");
        sp.read("train", cfg.data.split.train_frac);
        sp.read("val", cfg.data.split.val_frac);
        sp.read("test", cfg.data.split.test_frac);
        sp.read("seed", cfg.data.split.seed);
        sp.finish();
        data.finish();
    }
    {
        Section out = top.child("output");
        std::string dir;
        out.read("dir", dir);
        cfg.output.dir = dir;
        out.read("record_wall_time", cfg.output.record_wall_time);
        out.read("checkpoint", cfg.output.checkpoint);
        out.read("histogram_bins", cfg.output.histogram_bins);
        if (out.has("histograms")) {
            const json& list = out.raw("histograms");
            if (!list.is_array()) throw ConfigError("output.histograms must be an array");
            for (std::size_t i = 0; i < list.size(); ++i) {
                Section item(list[i], "output.histograms[" + std::to_string(i) + "]");
                TrackedNeuron t;
                if (!item.has("layer") || !item.has("neuron")) {
                    throw ConfigError("output.histograms[" + std::to_string(i) +
                                      "] needs layer and neuron");
                }
                item.read("layer", t.layer);
                item.read("neuron", t.neuron);
                item.finish();
                cfg.output.histograms.push_back(t);
            }
        }
        out.finish();
    }
    top.finish();
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
    json doc;
    doc["seed"] = cfg.seed;
    doc["epochs"] = cfg.epochs;
    doc["batch_size"] = cfg.batch_size;
    doc["model"] = {{"layer_widths", cfg.layer_widths},
                    {"activation", to_string(cfg.activation)},
                    {"init", init_name(cfg.init)}};
    if (cfg.activation.kind == ActivationKind::LeakyReLU) doc["model"]["leaky_slope"] = cfg.activation.slope;
    doc["optimizer"] = {{"lr", cfg.lr},
                        {"beta1", cfg.adam.beta1},
                        {"beta2", cfg.adam.beta2},
                        {"epsilon", cfg.adam.epsilon},
                        {"weight_decay", cfg.adam.weight_decay}};
    doc["schedule"] = {{"kind", to_string(cfg.schedule)},
                       {"lr_min", cfg.lr_min},
                       {"warmup_epochs", cfg.warmup_epochs}};
    const StrippingPolicy policy = cfg.stripping.value_or(StrippingPolicy{});
    doc["stripping"] = {{"enabled", cfg.stripping.has_value()},
                        {"fraction", policy.fraction},
                        {"min_remaining", policy.min_remaining},
                        {"cadence", policy.cadence}};
    doc["detection"] = {{"source", to_string(cfg.detection.source)},
                        {"threshold", cfg.detection.threshold},
                        {"batch_size", cfg.detection.batch_size}};
    json data = {{"kind", to_string(cfg.data.kind)},
                 {"path", cfg.data.path.string()},
                 {"images", cfg.data.images.string()},
                 {"labels", cfg.data.labels.string()},
                 {"classes", cfg.data.classes},
                 {"samples_per_class", cfg.data.samples_per_class},
                 {"dim", cfg.data.dim},
                 {"seed", cfg.data.seed},
                 {"split",
                  {{"train", cfg.data.split.train_frac},
                   {"val", cfg.data.split.val_frac},
                   {"test", cfg.data.split.test_frac},
                   {"seed", cfg.data.split.seed}}}};
    data["max_samples"] = cfg.data.max_samples ? json(*cfg.data.max_samples) : json(nullptr);
    doc["data"] = data;
    json hist = json::array();
    for (const auto& t : cfg.output.histograms) hist.push_back({{"layer", t.layer}, {"neuron", t.neuron}});
    doc["output"] = {{"dir", cfg.output.dir.string()},
                     {"record_wall_time", cfg.output.record_wall_time},
                     {"checkpoint", cfg.output.checkpoint},
                     {"histogram_bins", cfg.output.histogram_bins},
                     {"histograms", hist}};
    return doc.dump(2) + "\n";
}

} // namespace synstrip

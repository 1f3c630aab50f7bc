// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#include "synstrip/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "synstrip/checkpoint.hpp"
#include "synstrip/errors.hpp"
#include "synstrip/optimizer.hpp"
#include "synstrip/random.hpp"

namespace synstrip {

namespace {

constexpr std::uint64_t kShuffleStream = 0x9E3779B97F4A7C15ULL;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot write '" + path.string() + "'");
    return out;
}

std::vector<std::size_t> iota_rows(std::size_t begin, std::size_t end) {
    std::vector<std::size_t> rows(end - begin);
    std::iota(rows.begin(), rows.end(), begin);
    return rows;
}

class HistogramSink {
public:
    HistogramSink(const std::filesystem::path& dir, const TrackedNeuron& t, std::size_t bins)
        : tracked_(t), bins_(bins) {
        out_ = open_output(dir / ("hist_l" + std::to_string(t.layer) + "_n" + std::to_string(t.neuron) +
                                  ".csv"));
        out_ << "epoch,bin_lo,bin_hi,count,pruned\n";
    }

    void record(const DenseNetwork& net, std::size_t epoch) {
        const NeuronHistogram h = dump_neuron_histogram(net, tracked_.layer, tracked_.neuron, bins_);
        const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            const double lo = h.lo + width * static_cast<double>(b);
            const double hi = b + 1 == h.counts.size() ? h.hi : lo + width;
            out_ << epoch << ',' << fmt(lo) << ',' << fmt(hi) << ',' << h.counts[b] << ',' << h.pruned
                 << '\n';
        }
        out_.flush();
    }

private:
    TrackedNeuron tracked_;
    std::size_t bins_;
    std::ofstream out_;
};

void write_summary(const std::filesystem::path& path, const ExperimentResult& result) {
    nlohmann::json doc;
    const RunSummary& s = result.summary;
    doc["status"] = result.ok() ? "ok" : "diverged";
    if (result.error) doc["error"] = *result.error;
    doc["epochs_completed"] = s.epochs_completed;
    doc["peak_val_acc"] = s.peak_val_acc;
    doc["final_val_acc"] = s.final_val_acc;
    doc["final_test_acc"] = s.final_test_acc;
    doc["holdout_acc"] = s.holdout_acc ? nlohmann::json(*s.holdout_acc) : nlohmann::json(nullptr);
    doc["dead_count"] = s.dead_count;
    doc["active_pct"] = s.active_pct;
    doc["pruned_total"] = s.pruned_total;
    doc["capacity"] = {{"total_params", result.capacity.total_params},
                       {"pruned_params", result.capacity.pruned_params},
                       {"dead_attached_params", result.capacity.dead_attached_params},
                       {"active_params", result.capacity.active_params}};
    doc["dead_neurons"] = result.dead.layers;
    open_output(path) << doc.dump(2) << '\n';
}

std::size_t total_pruned(const DenseNetwork& net) {
    std::size_t n = 0;
    for (const Layer& layer : net.layers) n += layer.pruned_count();
    return n;
}

} // namespace

NeuronHistogram dump_neuron_histogram(const DenseNetwork& net, std::size_t layer, std::size_t neuron,
                                      std::size_t bins) {
    if (bins == 0) throw UsageError("dump_neuron_histogram: bins must be positive");
    if (layer >= net.hidden_layer_count() || neuron >= net.layers[layer].fan_out()) {
        throw UsageError("dump_neuron_histogram: no hidden neuron " + std::to_string(neuron) +
                         " in layer " + std::to_string(layer));
    }
    const Layer& l = net.layers[layer];
    std::vector<double> live;
    NeuronHistogram h;
    for (std::size_t i = 0; i < l.fan_in(); ++i) {
        if (l.mask(i, neuron) == 0.0) {
            ++h.pruned;
        } else {
            live.push_back(l.weights(i, neuron));
        }
    }
    h.counts.assign(bins, 0);
    if (live.empty()) return h;
    const auto [lo, hi] = std::ranges::minmax_element(live);
    h.lo = *lo;
    h.hi = *hi;
    const double width = (h.hi - h.lo) / static_cast<double>(bins);
    double sum = 0.0;
    for (double w : live) {
        sum += w;
        std::size_t b = width > 0.0 ? static_cast<std::size_t>((w - h.lo) / width) : 0;
        h.counts[std::min(b, bins - 1)] += 1;
    }
    h.mean = sum / static_cast<double>(live.size());
    return h;
}

PreparedData prepare_data(const DataSpec& spec) {
    Dataset full;
    switch (spec.kind) {
    case DataKind::Synthetic:
        full = synthetic_gaussian(spec.classes, spec.samples_per_class, spec.dim, spec.seed);
        break;
    case DataKind::Cifar10: full = load_cifar(spec.path, CifarVariant::Cifar10); break;
    case DataKind::Cifar100: full = load_cifar(spec.path, CifarVariant::Cifar100); break;
    case DataKind::Idx: full = load_idx(spec.images, spec.labels); break;
    }
    full.validate();

    PreparedData out;
    std::size_t train_end = full.size();
    if (full.holdout_begin) {
        train_end = *full.holdout_begin;
        const auto rows = iota_rows(train_end, full.size());
        out.holdout = full.subset(rows);
    }
    if (spec.max_samples) train_end = std::min(train_end, *spec.max_samples);
    out.splits = split(full, spec.split, train_end);
    return out;
}

LossAccuracy evaluate(const DenseNetwork& net, const Dataset& ds, std::size_t batch_size,
                      ActivationLedger* ledger) {
    if (batch_size == 0) throw ConfigError("evaluate: batch_size must be positive");
    if (ds.size() == 0) return {};
    double loss = 0.0;
    double correct = 0.0;
    for (std::size_t start = 0; start < ds.size(); start += batch_size) {
        const std::size_t stop = std::min(ds.size(), start + batch_size);
        const auto rows = iota_rows(start, stop);
        const ForwardTrace trace = forward(net, gather_rows(ds.features, rows));
        const std::span<const std::size_t> labels(ds.labels.data() + start, stop - start);
        const LossAccuracy la = loss_and_accuracy(trace.logits(), labels);
        const auto n = static_cast<double>(stop - start);
        loss += la.loss * n;
        correct += la.accuracy * n;
        if (ledger != nullptr) accumulate(*ledger, trace);
    }
    const auto n = static_cast<double>(ds.size());
    return {loss / n, correct / n};
}

std::string format_metrics_row(const EpochMetrics& m, bool with_wall_time) {
    std::string row;
    row += std::to_string(m.epoch) + ',' + fmt(m.lr) + ',' + fmt(m.train_loss) + ',' + fmt(m.val_loss) +
           ',' + fmt(m.val_acc) + ',' + fmt(m.test_acc) + ',' + std::to_string(m.dead_count) + ',' +
           std::to_string(m.pruned_epoch) + ',' + std::to_string(m.pruned_total) + ',' +
           fmt(m.active_pct) + ',' + (with_wall_time ? fmt(m.wall_ms) : std::string("0"));
    return row;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    return run_experiment(cfg, prepare_data(cfg.data));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const PreparedData& data,
                                const EpochCallback& on_epoch) {
    cfg.validate();
    const Dataset& train = data.splits.train;
    const Dataset& val = data.splits.val;
    const Dataset& test = data.splits.test;
    if (cfg.layer_widths.front() != train.feature_dim()) {
        throw ConfigError("model.layer_widths starts with " + std::to_string(cfg.layer_widths.front()) +
                          " but the data has " + std::to_string(train.feature_dim()) + " features");
    }
    if (cfg.layer_widths.back() != train.class_count) {
        throw ConfigError("model.layer_widths ends with " + std::to_string(cfg.layer_widths.back()) +
                          " but the data has " + std::to_string(train.class_count) + " classes");
    }

    const ScheduleSpec schedule = cfg.schedule_spec();
    ExperimentResult result;
    result.net = init_network(cfg.layer_widths, cfg.activation, cfg.seed, cfg.init);
    DenseNetwork& net = result.net;
    AdamState adam = AdamState::for_network(net, cfg.adam);
    Rng shuffle_rng(cfg.seed ^ kShuffleStream);
    std::vector<std::size_t> order = iota_rows(0, train.size());

    const bool writing = !cfg.output.dir.empty();
    std::ofstream metrics_out;
    std::vector<HistogramSink> histograms;
    if (writing) {
        std::filesystem::create_directories(cfg.output.dir);
        open_output(cfg.output.dir / "config.json") << dump_config(cfg);
        metrics_out = open_output(cfg.output.dir / "metrics.csv");
        metrics_out << kMetricsHeader << '\n';
        for (const auto& t : cfg.output.histograms)
            histograms.emplace_back(cfg.output.dir, t, cfg.output.histogram_bins);
    }

    RunSummary& summary = result.summary;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        EpochMetrics m;
        m.epoch = epoch;
        m.lr = lr_at(schedule, epoch);

        DenseNetwork last_good = net;
        double loss_sum = 0.0;
        try {
            shuffle_rng.shuffle(order);
            for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
                const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
                const std::span<const std::size_t> rows(order.data() + start, stop - start);
                std::vector<std::size_t> labels(rows.size());
                for (std::size_t i = 0; i < rows.size(); ++i) labels[i] = train.labels[rows[i]];
                const ForwardTrace trace = forward(net, gather_rows(train.features, rows));
                const double loss = loss_and_accuracy(trace.logits(), labels).loss;
                if (!std::isfinite(loss)) {
                    throw NumericError("non-finite training loss at epoch " + std::to_string(epoch));
                }
                loss_sum += loss * static_cast<double>(rows.size());
                adam_step(net, backward(net, trace, labels), adam, m.lr);
            }
        } catch (const NumericError& e) {
            net = std::move(last_good);
            result.error = e.what();
            const double nan = std::numeric_limits<double>::quiet_NaN();
            m.train_loss = m.val_loss = m.val_acc = m.test_acc = m.active_pct = nan;
            m.pruned_total = total_pruned(net);
            m.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
                            .count();
            result.metrics.push_back(m);
            if (writing) metrics_out << format_metrics_row(m, cfg.output.record_wall_time) << '\n';
            if (on_epoch) on_epoch(m);
            break;
        }
        m.train_loss = train.size() == 0 ? 0.0 : loss_sum / static_cast<double>(train.size());

        // detection on the configured split; the validation pass doubles as evaluation
        ActivationLedger ledger = ActivationLedger::for_network(net);
        const bool on_val = cfg.detection.source == DetectionSource::Validation;
        const LossAccuracy val_eval = evaluate(net, val, cfg.detection.batch_size, on_val ? &ledger : nullptr);
        if (!on_val) evaluate(net, train, cfg.detection.batch_size, &ledger);
        result.dead = find_dead(ledger, cfg.detection.threshold, cfg.detection.source);

        if (cfg.stripping && cfg.stripping->due(epoch)) {
            StrippingReport report = strip(net, result.dead, *cfg.stripping, &adam, epoch);
            m.pruned_epoch = report.pruned_total;
            result.stripping.push_back(std::move(report));
        }
        m.pruned_total = total_pruned(net);
        result.capacity = active_parameters(net, result.dead);

        m.val_loss = val_eval.loss;
        m.val_acc = val_eval.accuracy;
        m.test_acc = evaluate(net, test, cfg.detection.batch_size).accuracy;
        m.dead_count = result.dead.total();
        m.active_pct = result.capacity.active_pct;
        m.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        result.metrics.push_back(m);

        summary.epochs_completed = epoch + 1;
        summary.peak_val_acc = std::max(summary.peak_val_acc, m.val_acc);
        summary.final_val_acc = m.val_acc;
        summary.final_test_acc = m.test_acc;
        summary.dead_count = m.dead_count;
        summary.active_pct = m.active_pct;
        summary.pruned_total = m.pruned_total;

        if (writing) {
            metrics_out << format_metrics_row(m, cfg.output.record_wall_time) << '\n';
            metrics_out.flush();
            for (auto& h : histograms) h.record(net, epoch);
        }
        if (on_epoch) on_epoch(m);
    }

    if (data.holdout) summary.holdout_acc = evaluate(net, *data.holdout, cfg.detection.batch_size).accuracy;
    if (writing) {
        if (cfg.output.checkpoint) save_checkpoint(net, cfg.output.dir / "model.ckpt");
        write_summary(cfg.output.dir / "summary.json", result);
    }
    return result;
}

std::string to_string(GridMode mode) { return mode == GridMode::Stripping ? "stripping" : "baseline"; }

GridMode parse_grid_mode(std::string_view name) {
    if (name == "baseline") return GridMode::Baseline;
    if (name == "stripping") return GridMode::Stripping;
    throw ConfigError("unknown grid mode '" + std::string(name) + "'");
}

ExperimentConfig grid_cell_config(const ExperimentConfig& base, std::size_t depth, std::size_t width,
                                  GridMode mode, std::uint64_t seed) {
    if (depth == 0 || width == 0) throw ConfigError("grid: depth and width must be positive");
    if (base.layer_widths.size() < 2) throw ConfigError("grid: base config needs layer_widths");
    ExperimentConfig cfg = base;
    cfg.layer_widths.assign(1, base.layer_widths.front());
    cfg.layer_widths.insert(cfg.layer_widths.end(), depth, width);
    cfg.layer_widths.push_back(base.layer_widths.back());
    cfg.seed = seed;
    if (mode == GridMode::Baseline) {
        cfg.stripping.reset();
    } else if (!cfg.stripping) {
        cfg.stripping = StrippingPolicy{};
    }
    cfg.output.histograms.clear();
    if (!base.output.dir.empty()) {
        cfg.output.dir = base.output.dir / ("L" + std::to_string(depth) + "_N" + std::to_string(width) +
                                            "_" + to_string(mode) + "_s" + std::to_string(seed));
    }
    return cfg;
}

std::vector<GridRow> run_grid(const ExperimentConfig& base, const GridSpec& spec) {
    return run_grid(base, spec, prepare_data(base.data));
}

std::vector<GridRow> run_grid(const ExperimentConfig& base, const GridSpec& spec,
                              const PreparedData& data) {
    if (spec.widths.empty() || spec.depths.empty() || spec.modes.empty()) {
        throw ConfigError("grid: widths, depths and modes must be non-empty");
    }
    const std::vector<std::uint64_t> seeds = spec.seeds.empty() ? std::vector{base.seed} : spec.seeds;
    std::vector<GridRow> rows;
    for (std::size_t depth : spec.depths)
        for (std::size_t width : spec.widths)
            for (GridMode mode : spec.modes)
                for (std::uint64_t seed : seeds) rows.push_back({depth, width, mode, seed, {}, ""});

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            GridRow& row = rows[i];
            try {
                const ExperimentResult r =
                    run_experiment(grid_cell_config(base, row.depth, row.width, row.mode, row.seed), data);
                row.summary = r.summary;
                row.status = r.ok() ? "ok" : "diverged: " + *r.error;
            } catch (const std::exception& e) {
                row.status = std::string("failed: ") + e.what();
            }
        }
    };
    const std::size_t jobs = std::clamp<std::size_t>(spec.jobs, 1, rows.size());
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }

    if (!base.output.dir.empty()) {
        std::filesystem::create_directories(base.output.dir);
        std::ofstream out = open_output(base.output.dir / "grid_summary.csv");
        out << kGridHeader << '\n';
        for (const GridRow& r : rows) {
            std::string status = r.status;
            std::ranges::replace(status, ',', ';');
            std::ranges::replace(status, '\n', ' ');
            out << r.depth << ',' << r.width << ',' << to_string(r.mode) << ',' << r.seed << ','
                << fmt(r.summary.peak_val_acc) << ',' << r.summary.dead_count << ','
                << fmt(r.summary.active_pct) << ',' << r.summary.pruned_total << ','
                << fmt(r.summary.final_test_acc) << ',' << status << '\n';
        }
    }
    return rows;
}

InspectReport inspect(const DenseNetwork& net, const ExperimentConfig& cfg, const PreparedData& data) {
    validate(net);
    const Dataset& ds =
        cfg.detection.source == DetectionSource::Training ? data.splits.train : data.splits.val;
    if (ds.feature_dim() != net.input_width()) {
        throw ConfigError("inspect: checkpoint expects " + std::to_string(net.input_width()) +
                          " features, data has " + std::to_string(ds.feature_dim()));
    }
    InspectReport report;
    ActivationLedger ledger = ActivationLedger::for_network(net);
    report.evaluation = evaluate(net, ds, cfg.detection.batch_size, &ledger);
    report.samples = ledger.samples_seen;
    report.dead = find_dead(ledger, cfg.detection.threshold, cfg.detection.source);
    report.capacity = active_parameters(net, report.dead);
    return report;
}

} // namespace synstrip

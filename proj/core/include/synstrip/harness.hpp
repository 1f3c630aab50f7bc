// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synstrip/capacity.hpp"
#include "synstrip/config.hpp"
#include "synstrip/data.hpp"
#include "synstrip/detection.hpp"
#include "synstrip/network.hpp"
#include "synstrip/stripping.hpp"

namespace synstrip {

/// One row of metrics.csv.
struct EpochMetrics {
    std::size_t epoch = 0;
    double lr = 0.0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_acc = 0.0;
    double test_acc = 0.0;
    std::size_t dead_count = 0;
    std::size_t pruned_epoch = 0;
    std::size_t pruned_total = 0;
    double active_pct = 100.0;
    double wall_ms = 0.0;
};

inline constexpr std::string_view kMetricsHeader =
    "epoch,lr,train_loss,val_loss,val_acc,test_acc,dead_count,pruned_epoch,pruned_total,active_pct,wall_ms";

/// Fan-in weight histogram of one hidden neuron.
struct NeuronHistogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::size_t> counts; ///< equal-width bins over [lo, hi] of live weights
    std::size_t pruned = 0;
    double mean = 0.0;               ///< mean of the live weights
};

/// Throws UsageError for an out-of-range layer/neuron or zero bins.
NeuronHistogram dump_neuron_histogram(const DenseNetwork& net, std::size_t layer,
                                      std::size_t neuron, std::size_t bins);

/// Train/validation/test splits plus the official holdout partition, if the
/// dataset has one.
struct PreparedData {
    Splits splits;
    std::optional<Dataset> holdout;
};

PreparedData prepare_data(const DataSpec& spec);

struct RunSummary {
    double peak_val_acc = 0.0;
    double final_val_acc = 0.0;
    double final_test_acc = 0.0;
    std::optional<double> holdout_acc;
    std::size_t dead_count = 0;
    double active_pct = 100.0;
    std::size_t pruned_total = 0;
    std::size_t epochs_completed = 0;
};

struct ExperimentResult {
    DenseNetwork net;
    std::vector<EpochMetrics> metrics;
    std::vector<StrippingReport> stripping;
    DeadSet dead;
    CapacityReport capacity;
    RunSummary summary;
    /// Set when training diverged; `net` is then the last good network.
    std::optional<std::string> error;

    bool ok() const noexcept { return !error.has_value(); }
};

/// Called after each metrics row is recorded (including an error row).
using EpochCallback = std::function<void(const EpochMetrics&)>;

/// Train -> detect -> strip loop. Each epoch runs the minibatch Adam steps at
/// lr_at(epoch), then one detection pass on the configured split, then (when
/// stripping is enabled and due) a stripping pass, then records metrics.
/// Deterministic in cfg.seed. When cfg.output.dir is set, writes metrics.csv,
/// summary.json, config.json, model.ckpt and any requested histograms there.
ExperimentResult run_experiment(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg, const PreparedData& data,
                                const EpochCallback& on_epoch = {});

/// Forward pass over a dataset in fixed batches; optionally accumulates the
/// ledger from the same traces.
LossAccuracy evaluate(const DenseNetwork& net, const Dataset& ds, std::size_t batch_size,
                      ActivationLedger* ledger = nullptr);

std::string format_metrics_row(const EpochMetrics& m, bool with_wall_time);

enum class GridMode { Baseline, Stripping };

std::string to_string(GridMode mode);
GridMode parse_grid_mode(std::string_view name);

struct GridSpec {
    std::vector<std::size_t> widths;
    std::vector<std::size_t> depths;
    std::vector<GridMode> modes{GridMode::Baseline, GridMode::Stripping};
    std::vector<std::uint64_t> seeds; ///< empty: the base config's seed
    std::size_t jobs = 1;
};

struct GridRow {
    std::size_t depth = 0;
    std::size_t width = 0;
    GridMode mode = GridMode::Baseline;
    std::uint64_t seed = 0;
    RunSummary summary;
    std::string status; ///< "ok" or the failure message
};

inline constexpr std::string_view kGridHeader =
    "depth,width,mode,seed,peak_val_acc,dead_count,active_pct,pruned_total,test_acc,status";

/// Config for one grid cell: hidden widths replaced by depth x width, stripping
/// toggled by mode, outputs under base.output.dir/L<depth>_N<width>_<mode>_s<seed>.
ExperimentConfig grid_cell_config(const ExperimentConfig& base, std::size_t depth,
                                  std::size_t width, GridMode mode, std::uint64_t seed);

/// Runs every (depth, width, mode, seed) cell, up to spec.jobs at a time.
/// A failing cell is recorded in its row and the grid carries on. Rows come
/// back in a fixed order regardless of scheduling; grid_summary.csv is
/// written to base.output.dir when set.
std::vector<GridRow> run_grid(const ExperimentConfig& base, const GridSpec& spec);
std::vector<GridRow> run_grid(const ExperimentConfig& base, const GridSpec& spec,
                              const PreparedData& data);

struct InspectReport {
    CapacityReport capacity;
    DeadSet dead;
    LossAccuracy evaluation;
    std::size_t samples = 0;
};

/// Detection and capacity accounting for a stored network on the split named
/// by cfg.detection.
InspectReport inspect(const DenseNetwork& net, const ExperimentConfig& cfg, const PreparedData& data);

} // namespace synstrip

// Copyright 2026 The synstrip Authors
// SPDX-License-Identifier: Apache-2.0

// synstrip: run / grid / inspect front end.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "synstrip/checkpoint.hpp"
#include "synstrip/errors.hpp"
#include "synstrip/harness.hpp"

using namespace synstrip;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool no_strip = false;
    std::optional<double> threshold;

    void attach(CLI::App* cmd, bool require_config) {
        auto* opt = cmd->add_option("--config", config, "experiment config (JSON)")->check(CLI::ExistingFile);
        if (require_config) opt->required();
        cmd->add_option("--seed", seed, "override the run seed");
        cmd->add_option("--out", out, "override the output directory");
        cmd->add_flag("--no-strip", no_strip, "disable stripping (baseline run)");
        cmd->add_option("--threshold", threshold, "dead-neuron threshold on the activation sum");
    }

    ExperimentConfig load() const {
        ExperimentConfig cfg = load_config(config);
        if (seed) cfg.seed = *seed;
        if (!out.empty()) cfg.output.dir = out;
        if (no_strip) cfg.stripping.reset();
        if (threshold) cfg.detection.threshold = *threshold;
        cfg.validate();
        return cfg;
    }
};

void print_dead(const DeadSet& dead) {
    for (std::size_t l = 0; l < dead.layers.size(); ++l) {
        std::printf("  hidden layer %zu: %zu dead", l, dead.layers[l].size());
        for (std::size_t k = 0; k < dead.layers[l].size(); ++k)
            std::printf("%s%zu", k == 0 ? " [" : ",", dead.layers[l][k]);
        std::printf("%s\n", dead.layers[l].empty() ? "" : "]");
    }
}

int cmd_run(const Overrides& o, bool quiet) {
    const ExperimentConfig cfg = o.load();
    const PreparedData data = prepare_data(cfg.data);
    std::fprintf(stderr, "data: %zu train / %zu val / %zu test, %zu features, %zu classes\n",
                 data.splits.train.size(), data.splits.val.size(), data.splits.test.size(),
                 data.splits.train.feature_dim(), data.splits.train.class_count);
    const auto progress = [&](const EpochMetrics& m) {
        if (quiet) return;
        std::fprintf(stderr, "epoch %3zu  lr %.3g  loss %.4f  val %.4f  dead %zu  pruned %zu  active %.2f%%\n",
                     m.epoch, m.lr, m.train_loss, m.val_acc, m.dead_count, m.pruned_total, m.active_pct);
    };
    const ExperimentResult r = run_experiment(cfg, data, progress);
    const RunSummary& s = r.summary;
    std::printf("epochs %zu  peak_val_acc %.4f  final_test_acc %.4f  dead %zu  active %.2f%%  pruned %zu\n",
                s.epochs_completed, s.peak_val_acc, s.final_test_acc, s.dead_count, s.active_pct, s.pruned_total);
    if (s.holdout_acc) std::printf("holdout_acc %.4f\n", *s.holdout_acc);
    if (!cfg.output.dir.empty()) std::printf("outputs in %s\n", cfg.output.dir.string().c_str());
    if (!r.ok()) {
        std::fprintf(stderr, "error: %s\n", r.error->c_str());
        return 3;
    }
    return 0;
}

int cmd_grid(const Overrides& o, GridSpec spec, const std::vector<std::string>& modes) {
    const ExperimentConfig base = o.load();
    if (!modes.empty()) {
        spec.modes.clear();
        for (const auto& m : modes) spec.modes.push_back(parse_grid_mode(m));
    }
    if (spec.widths.empty() || spec.depths.empty()) throw UsageError("grid needs --widths and --depths");
    const auto rows = run_grid(base, spec);
    std::printf("%s\n", std::string(kGridHeader).c_str());
    int failures = 0;
    for (const GridRow& row : rows) {
        std::printf("%zu,%zu,%s,%llu,%.4f,%zu,%.2f,%zu,%.4f,%s\n", row.depth, row.width, to_string(row.mode).c_str(),
                    static_cast<unsigned long long>(row.seed), row.summary.peak_val_acc, row.summary.dead_count,
                    row.summary.active_pct, row.summary.pruned_total, row.summary.final_test_acc, row.status.c_str());
        failures += row.status != "ok";
    }
    return failures ? 3 : 0;
}

int cmd_inspect(const Overrides& o, const std::string& checkpoint) {
    const DenseNetwork net = load_checkpoint(checkpoint);
    std::printf("network:");
    for (std::size_t w : net.widths()) std::printf(" %zu", w);
    std::size_t pruned = 0;
    for (const Layer& l : net.layers) pruned += l.pruned_count();
    std::printf("  (%zu pruned weights)\n", pruned);
    if (o.config.empty()) {
        std::printf("no --config given: dead-neuron detection skipped\n");
        return 0;
    }
    const ExperimentConfig cfg = o.load();
    const InspectReport rep = inspect(net, cfg, prepare_data(cfg.data));
    std::printf("detection on %s split (%zu samples, threshold %g): loss %.4f  acc %.4f\n",
                to_string(cfg.detection.source).c_str(), rep.samples, cfg.detection.threshold,
                rep.evaluation.loss, rep.evaluation.accuracy);
    print_dead(rep.dead);
    const CapacityReport& c = rep.capacity;
    std::printf("parameters: %zu total, %zu active (%.2f%%), %zu pruned, %zu attached to dead neurons\n",
                c.total_params, c.active_params, c.active_pct, c.pruned_params, c.dead_attached_params);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synaptic stripping for dense ReLU networks"};
    app.require_subcommand(1);

    Overrides run_o, grid_o, inspect_o;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "train one configuration");
    run_o.attach(run, true);
    run->add_flag("-q,--quiet", quiet, "no per-epoch progress");

    GridSpec spec;
    std::vector<std::string> modes;
    auto* grid = app.add_subcommand("grid", "width x depth x mode x seed sweep");
    grid_o.attach(grid, true);
    grid->add_option("--widths", spec.widths, "hidden widths")->delimiter(',')->required();
    grid->add_option("--depths", spec.depths, "hidden layer counts")->delimiter(',')->required();
    grid->add_option("--modes", modes, "baseline,stripping (default both)")
        ->delimiter(',')
        ->check(CLI::IsMember({"baseline", "stripping"}));
    grid->add_option("--seeds", spec.seeds, "seeds (default: the config seed)")->delimiter(',');
    grid->add_option("--jobs", spec.jobs, "cells run concurrently")->check(CLI::PositiveNumber);

    std::string checkpoint;
    auto* insp = app.add_subcommand("inspect", "dead neurons and active parameters of a checkpoint");
    inspect_o.attach(insp, false);
    insp->add_option("--checkpoint", checkpoint, "model.ckpt")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2; // --help is not an error
    }
    try {
        if (*run) return cmd_run(run_o, quiet);
        if (*grid) return cmd_grid(grid_o, spec, modes);
        return cmd_inspect(inspect_o, checkpoint);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line entry point.  Subcommands:
//   stats     build reference statistics from a SMILES corpus
//   pretrain  train the prior language model on a corpus
//   run       execute a benchmark manifest (tasks × optimizers × replicates)
//   grid      sigma/K sweep of AHC over a manifest's first optimizer entry
//   report    aggregate run outputs into rank/diagnostic/plot CSVs
//
// Exit codes: 0 success, 2 validation error (bad input), 1 runtime failure.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "molopt/harness/harness.hpp"

namespace {

int dispatch(int argc, char** argv) {
  CLI::App app{"molopt: sample-efficient molecular optimization benchmark"};
  app.require_subcommand(1);

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Build reference statistics from a corpus");
  molopt::harness::StatsOptions stats_opts;
  stats_cmd->add_option("corpus", stats_opts.corpus, "SMILES corpus, one molecule per line")
      ->required();
  stats_cmd->add_option("-o,--out", stats_opts.out, "output stats JSON")->required();
  stats_cmd->add_option("--fp-radius", stats_opts.fp_radius, "fingerprint radius")
      ->check(CLI::PositiveNumber);
  stats_cmd->add_option("--fp-width", stats_opts.fp_width, "fingerprint width in bits")
      ->check(CLI::PositiveNumber);

  // pretrain
  auto* pre_cmd = app.add_subcommand("pretrain", "Train the prior language model");
  molopt::harness::PretrainOptions pre_opts;
  pre_cmd->add_option("corpus", pre_opts.corpus, "SMILES corpus, one molecule per line")
      ->required();
  pre_cmd->add_option("-o,--out", pre_opts.out, "output checkpoint path")->required();
  pre_cmd->add_option("--profile", pre_opts.profile, "model size: desk or paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  pre_cmd->add_option("--epochs", pre_opts.epochs, "training epochs (0 = save the initialization)")
      ->check(CLI::NonNegativeNumber);
  pre_cmd->add_option("--batch", pre_opts.batch_size, "minibatch size")
      ->check(CLI::PositiveNumber);
  pre_cmd->add_option("--lr", pre_opts.lr, "Adam learning rate");
  pre_cmd->add_option("--seed", pre_opts.seed, "init/shuffle seed");

  // run
  auto* run_cmd = app.add_subcommand("run", "Execute a benchmark manifest");
  std::string run_manifest;
  molopt::harness::BenchmarkOptions run_opts;
  run_cmd->add_option("manifest", run_manifest, "experiment manifest JSON")->required();
  run_cmd->add_option("-o,--out", run_opts.output_dir,
                      "output directory (defaults to the manifest's)");
  run_cmd->add_option("--threads", run_opts.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  run_cmd->add_flag("--charge-invalid", run_opts.charge_invalid,
                    "unparseable samples consume budget with score 0");

  // grid
  auto* grid_cmd = app.add_subcommand("grid", "Sigma/K sweep of AHC over a manifest");
  std::string grid_manifest;
  molopt::harness::GridOptions grid_opts;
  grid_cmd->add_option("manifest", grid_manifest, "experiment manifest JSON")->required();
  grid_cmd->add_option("-o,--out", grid_opts.run.output_dir,
                       "output directory (defaults to the manifest's)");
  grid_cmd->add_option("--threads", grid_opts.run.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  grid_cmd->add_flag("--charge-invalid", grid_opts.run.charge_invalid,
                     "unparseable samples consume budget with score 0");
  grid_cmd->add_option("--sigma", grid_opts.sigmas, "reward coefficients to sweep");
  grid_cmd->add_option("--k", grid_opts.ks, "top fractions to sweep");

  // report
  auto* rep_cmd = app.add_subcommand("report", "Aggregate run outputs");
  std::string rep_run_dir;
  std::string rep_out_dir;
  rep_cmd->add_option("run_dir", rep_run_dir, "directory produced by `run`")->required();
  rep_cmd->add_option("-o,--out", rep_out_dir, "report output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*stats_cmd) {
    molopt::harness::cmd_stats(stats_opts);
  } else if (*pre_cmd) {
    molopt::harness::cmd_pretrain(pre_opts);
  } else if (*run_cmd) {
    const auto rows = molopt::harness::cmd_run(run_manifest, run_opts);
    int failed = 0;
    for (const auto& r : rows) failed += r.failed() ? 1 : 0;
    std::printf("%zu runs, %d failed\n", rows.size(), failed);
  } else if (*grid_cmd) {
    const auto rows = molopt::harness::cmd_grid(grid_manifest, grid_opts);
    std::printf("%zu grid runs\n", rows.size());
  } else if (*rep_cmd) {
    molopt::harness::cmd_report(rep_run_dir, rep_out_dir);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const molopt::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

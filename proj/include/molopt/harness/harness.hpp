//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "molopt/metrics.hpp"
#include "molopt/optimize.hpp"
#include "molopt/policy/model.hpp"
#include "molopt/refstats.hpp"

namespace molopt::harness {

// One optimizer column of a benchmark: a directory-safe label plus the run
// settings.  The per-cell fields (objective name, seed) are filled in when
// the (task × optimizer × replicate) grid is expanded, so manifest entries
// must not set them.
struct OptimizerEntry {
  std::string label;
  optimize::RunConfig config;
};

// A parsed experiment description.  Relative paths in the JSON resolve
// against the manifest file's own directory.  The corpus digest is mandatory
// and is checked against both the corpus bytes and the stats file before any
// optimization starts.
struct ExperimentManifest {
  std::string corpus;
  std::string corpus_digest;  // FNV-1a 64 of the corpus bytes, lowercase hex
  std::string stats;
  std::string prior;
  std::vector<std::string> tasks;  // objective definition files
  std::vector<OptimizerEntry> optimizers;
  int replicates = 5;
  std::uint64_t master_seed = 0;
  std::string output;  // default output directory; the CLI -o overrides

  void validate() const;  // throws ValidationError
  static ExperimentManifest from_json_file(const std::string& path);
  // `base_dir` anchors relative paths ("" leaves them untouched).
  static ExperimentManifest from_json_text(const std::string& text,
                                           const std::string& base_dir);
  std::string to_json_text() const;
};

// Deterministic per-run seed: FNV-1a over the master seed, the task name and
// the optimizer label (each length-delimited), then the replicate index.
std::uint64_t replicate_seed(std::uint64_t master_seed, const std::string& task,
                             const std::string& label, int replicate);

// One line of summary.csv.  A failed run keeps zero AUCs and records the
// failure as "error: <reason>" in stop_reason.
struct SummaryRow {
  std::string task;
  std::string optimizer;
  int replicate = 0;
  double auc_plain = 0.0;
  double auc_filtered = 0.0;
  double auc_diverse = 0.0;
  double auc_combined = 0.0;
  std::string stop_reason;
  int calls_used = 0;

  bool failed() const { return stop_reason.rfind("error:", 0) == 0; }
};

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path);
// Malformed rows are reported on stderr and skipped.
std::vector<SummaryRow> load_summary_csv(const std::string& path);

struct BenchmarkOptions {
  std::string output_dir;      // overrides manifest.output when nonempty
  int threads = 1;             // parallel (task, optimizer, replicate) units
  bool charge_invalid = false; // force charge_invalid on every run
};

// Executes the full (task × optimizer × replicate) grid of a manifest:
// verifies digests, loads stats/prior/objectives, runs every unit (in
// parallel when asked — each unit is fully isolated), writes
// <out>/<task>__<label>/rep<k>.jsonl + rep<k>.report.json, a resolved
// manifest copy, and <out>/summary.csv.  Unit failures become error rows;
// infrastructure failures (bad manifest, digest mismatch) throw.
std::vector<SummaryRow> run_benchmark(const ExperimentManifest& manifest,
                                      const BenchmarkOptions& options);

// Subcommand drivers.  All throw ValidationError for bad input and IoFailure
// for filesystem trouble; main() maps those to exit codes 2 and 1.
struct StatsOptions {
  std::string corpus;
  std::string out;
  int fp_radius = 2;
  std::uint32_t fp_width = 2048;
};
refstats::ReferenceStats cmd_stats(const StatsOptions& options);

struct PretrainOptions {
  std::string corpus;
  std::string out;            // checkpoint path; NLL CSV lands at out + ".nll.csv"
  std::string profile = "desk";  // "desk" (48/128/1) or "paper" (128/512/3)
  int epochs = 5;
  int batch_size = 128;
  double lr = 1e-3;
  std::uint64_t seed = 0;
};
policy::PretrainReport cmd_pretrain(const PretrainOptions& options);

std::vector<SummaryRow> cmd_run(const std::string& manifest_path,
                                const BenchmarkOptions& options);

struct GridOptions {
  BenchmarkOptions run;
  std::vector<double> sigmas = {60.0, 120.0, 240.0, 500.0};
  std::vector<double> ks = {0.25, 0.5, 1.0};
};
// Replaces the manifest's optimizer list with AHC entries labelled
// "AHC_s<sigma>_k<k>" for the (σ × K) cross-product (settings otherwise
// copied from the manifest's first optimizer entry), runs the benchmark, and
// adds <out>/grid.csv with per-cell mean AUCs.
std::vector<SummaryRow> cmd_grid(const std::string& manifest_path,
                                 const GridOptions& options);

// Reads every summary.csv under `run_dir` (plus third-party JSONL logs that
// lack a sibling report: lines of {"call_index", "smiles", "score"}) and
// writes rank_table.csv, diagnostics.csv and plot_data.csv into `out_dir`.
void cmd_report(const std::string& run_dir, const std::string& out_dir);

}  // namespace molopt::harness

//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "molopt/harness/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "molopt/chem/parser.hpp"
#include "molopt/descriptors.hpp"
#include "molopt/oracle.hpp"

namespace molopt::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Shortest round-trip decimal for a double, identical to the JSON reports.
std::string fmt_double(double v) { return json(v).dump(); }

// Labels and task names become directory components; keep them boring.
bool safe_name(const std::string& s) {
  if (s.empty()) return false;
  for (const char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-' ||
                    c == '+';
    if (!ok) return false;
  }
  return true;
}

std::string resolve_path(const std::string& raw, const std::string& base_dir) {
  if (raw.empty() || base_dir.empty()) return raw;
  const fs::path p(raw);
  if (p.is_absolute()) return raw;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

// One field of a CSV line, quoted only when it has to be.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Splits one CSV line honoring double-quote escaping. Returns false on a
// malformed line (unterminated quote) so callers can warn and move on.
bool csv_split(const std::string& line, std::vector<std::string>& fields) {
  fields.clear();
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) return false;
  fields.push_back(cur);
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest

void ExperimentManifest::validate() const {
  if (corpus.empty()) throw ValidationError("manifest: corpus path is required");
  if (corpus_digest.size() != 16 ||
      corpus_digest.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw ValidationError("manifest: corpus_digest must be 16 lowercase hex digits");
  }
  if (stats.empty()) throw ValidationError("manifest: stats path is required");
  if (prior.empty()) throw ValidationError("manifest: prior checkpoint path is required");
  if (tasks.empty()) throw ValidationError("manifest: at least one task is required");
  if (optimizers.empty()) throw ValidationError("manifest: at least one optimizer is required");
  if (replicates < 1) throw ValidationError("manifest: replicates must be at least 1");
  std::set<std::string> labels;
  for (const auto& entry : optimizers) {
    if (!safe_name(entry.label)) {
      throw ValidationError("manifest: optimizer label '" + entry.label +
                            "' must be nonempty [A-Za-z0-9._+-]");
    }
    if (!labels.insert(entry.label).second) {
      throw ValidationError("manifest: duplicate optimizer label '" + entry.label + "'");
    }
    entry.config.validate();
  }
}

ExperimentManifest ExperimentManifest::from_json_text(const std::string& text,
                                                      const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed manifest JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("manifest must be a JSON object");

  ExperimentManifest m;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "corpus") m.corpus = resolve_path(value.get<std::string>(), base_dir);
      else if (key == "corpus_digest") m.corpus_digest = value.get<std::string>();
      else if (key == "stats") m.stats = resolve_path(value.get<std::string>(), base_dir);
      else if (key == "prior") m.prior = resolve_path(value.get<std::string>(), base_dir);
      else if (key == "tasks") {
        for (const auto& t : value) m.tasks.push_back(resolve_path(t.get<std::string>(), base_dir));
      } else if (key == "optimizers") {
        for (auto entry : value) {
          if (!entry.is_object()) throw ValidationError("manifest: optimizer entries must be objects");
          OptimizerEntry oe;
          if (!entry.contains("label")) throw ValidationError("manifest: optimizer entry needs a label");
          oe.label = entry.at("label").get<std::string>();
          entry.erase("label");
          if (entry.contains("seed")) {
            throw ValidationError("manifest: optimizer '" + oe.label +
                                  "' sets seed; replicate seeds derive from master_seed");
          }
          if (entry.contains("objective")) {
            throw ValidationError("manifest: optimizer '" + oe.label +
                                  "' sets objective; objectives come from the tasks list");
          }
          oe.config = optimize::RunConfig::from_json_text(entry.dump());
          m.optimizers.push_back(std::move(oe));
        }
      } else if (key == "replicates") m.replicates = value.get<int>();
      else if (key == "master_seed") m.master_seed = value.get<std::uint64_t>();
      else if (key == "output") m.output = resolve_path(value.get<std::string>(), base_dir);
      else throw ValidationError("unknown manifest key: " + key);
    } catch (const json::exception& e) {
      throw ValidationError("bad value for manifest key '" + key + "': " + e.what());
    }
  }
  m.validate();
  return m;
}

ExperimentManifest ExperimentManifest::from_json_file(const std::string& path) {
  const std::string base = fs::path(path).parent_path().string();
  try {
    return from_json_text(read_file_text(path), base);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string ExperimentManifest::to_json_text() const {
  json j;
  j["corpus"] = corpus;
  j["corpus_digest"] = corpus_digest;
  j["stats"] = stats;
  j["prior"] = prior;
  j["tasks"] = tasks;
  json opts = json::array();
  for (const auto& entry : optimizers) {
    json oj = json::parse(entry.config.to_json_text());
    oj["label"] = entry.label;
    // The per-cell fields are derived, not configuration.
    oj.erase("seed");
    oj.erase("objective");
    opts.push_back(std::move(oj));
  }
  j["optimizers"] = opts;
  j["replicates"] = replicates;
  j["master_seed"] = master_seed;
  j["output"] = output;
  return j.dump(2);
}

std::uint64_t replicate_seed(std::uint64_t master_seed, const std::string& task,
                             const std::string& label, int replicate) {
  std::uint64_t h = fnv1a64_u64(master_seed);
  h = fnv1a64(task, h);
  h = fnv1a64_u64(task.size(), h);
  h = fnv1a64(label, h);
  h = fnv1a64_u64(label.size(), h);
  h = fnv1a64_u64(static_cast<std::uint64_t>(replicate), h);
  return h;
}

// ---------------------------------------------------------------------------
// Summary CSV

namespace {
const char* kSummaryHeader =
    "task,optimizer,replicate,auc_plain,auc_filtered,auc_diverse,auc_combined,"
    "stop_reason,calls_used";
}  // namespace

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoFailure("cannot open summary for writing: " + path);
  out << kSummaryHeader << "\n";
  for (const auto& r : rows) {
    out << csv_field(r.task) << ',' << csv_field(r.optimizer) << ',' << r.replicate
        << ',' << fmt_double(r.auc_plain) << ',' << fmt_double(r.auc_filtered) << ','
        << fmt_double(r.auc_diverse) << ',' << fmt_double(r.auc_combined) << ','
        << csv_field(r.stop_reason) << ',' << r.calls_used << "\n";
  }
  if (!out) throw IoFailure("failed writing summary: " + path);
}

std::vector<SummaryRow> load_summary_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open summary: " + path);
  std::vector<SummaryRow> rows;
  std::string line;
  std::vector<std::string> fields;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) {
      if (line != kSummaryHeader) {
        std::fprintf(stderr, "warning: %s:1: unexpected header, reading anyway\n",
                     path.c_str());
      }
      continue;
    }
    if (line.empty()) continue;
    if (!csv_split(line, fields) || fields.size() != 9) {
      std::fprintf(stderr, "warning: %s:%d: malformed row skipped\n", path.c_str(), lineno);
      continue;
    }
    try {
      SummaryRow r;
      r.task = fields[0];
      r.optimizer = fields[1];
      r.replicate = std::stoi(fields[2]);
      r.auc_plain = std::stod(fields[3]);
      r.auc_filtered = std::stod(fields[4]);
      r.auc_diverse = std::stod(fields[5]);
      r.auc_combined = std::stod(fields[6]);
      r.stop_reason = fields[7];
      r.calls_used = std::stoi(fields[8]);
      rows.push_back(std::move(r));
    } catch (const std::exception&) {
      std::fprintf(stderr, "warning: %s:%d: unparseable numbers, row skipped\n",
                   path.c_str(), lineno);
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Benchmark execution

namespace {

struct RunUnit {
  int task = 0;
  int optimizer = 0;
  int replicate = 1;  // 1-based, matches rep<k> file names
};

void write_run_jsonl(const std::vector<oracle::OracleRecord>& log, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoFailure("cannot open run log for writing: " + path);
  for (const auto& rec : log) {
    json j;
    j["call_index"] = rec.call_index;
    j["smiles"] = rec.key;
    j["score"] = rec.score;
    out << j.dump() << "\n";
  }
  if (!out) throw IoFailure("failed writing run log: " + path);
}

}  // namespace

std::vector<SummaryRow> run_benchmark(const ExperimentManifest& manifest,
                                      const BenchmarkOptions& options) {
  manifest.validate();
  const std::string out_dir = options.output_dir.empty() ? manifest.output
                                                         : options.output_dir;
  if (out_dir.empty()) {
    throw ValidationError("no output directory: set manifest `output` or pass -o");
  }

  // Digest gating before anything heavy: the corpus bytes must match the
  // manifest, and the stats file must have been built from that same corpus.
  const std::string digest = refstats::file_digest(manifest.corpus);
  if (digest != manifest.corpus_digest) {
    throw ValidationError("corpus digest mismatch: manifest says " +
                          manifest.corpus_digest + ", " + manifest.corpus + " has " +
                          digest);
  }
  const refstats::ReferenceStats stats = refstats::load_stats(manifest.stats);
  if (stats.source_digest != digest) {
    throw ValidationError("stats file " + manifest.stats + " was built from digest " +
                          stats.source_digest + ", not the manifest corpus " + digest);
  }

  const policy::GruLM prior = policy::load_checkpoint(manifest.prior);

  std::vector<oracle::Objective> objectives;
  std::vector<std::string> task_names;
  std::set<std::string> seen_tasks;
  for (const auto& path : manifest.tasks) {
    objectives.push_back(oracle::Objective::from_json_file(path));
    const std::string& name = objectives.back().name();
    if (!safe_name(name)) {
      throw ValidationError(path + ": task name '" + name +
                            "' must be nonempty [A-Za-z0-9._+-]");
    }
    if (!seen_tasks.insert(name).second) {
      throw ValidationError("duplicate task name '" + name + "'");
    }
    task_names.push_back(name);
  }

  // Cell directories; reject (task, label) pairs whose composed names
  // collide (possible because '_' is allowed in both halves).
  std::set<std::string> cell_dirs;
  for (const auto& task : task_names) {
    for (const auto& entry : manifest.optimizers) {
      const std::string cell = task + "__" + entry.label;
      if (!cell_dirs.insert(cell).second) {
        throw ValidationError("cell directory collision: " + cell);
      }
    }
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoFailure("cannot create output directory " + out_dir + ": " + ec.message());
  for (const auto& cell : cell_dirs) {
    fs::create_directories(fs::path(out_dir) / cell, ec);
    if (ec) throw IoFailure("cannot create cell directory " + cell + ": " + ec.message());
  }

  {
    const fs::path copy = fs::path(out_dir) / "manifest.json";
    std::ofstream out(copy);
    if (!out) throw IoFailure("cannot write resolved manifest copy: " + copy.string());
    out << manifest.to_json_text() << "\n";
  }

  std::vector<RunUnit> units;
  for (int t = 0; t < static_cast<int>(task_names.size()); ++t) {
    for (int o = 0; o < static_cast<int>(manifest.optimizers.size()); ++o) {
      for (int r = 1; r <= manifest.replicates; ++r) units.push_back({t, o, r});
    }
  }

  std::vector<SummaryRow> rows(units.size());
  std::atomic<std::size_t> cursor{0};
  const int n_threads = std::max(1, std::min<int>(options.threads,
                                                  static_cast<int>(units.size())));

  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= units.size()) return;
      const RunUnit& unit = units[i];
      const std::string& task = task_names[static_cast<std::size_t>(unit.task)];
      const OptimizerEntry& entry =
          manifest.optimizers[static_cast<std::size_t>(unit.optimizer)];

      SummaryRow& row = rows[i];
      row.task = task;
      row.optimizer = entry.label;
      row.replicate = unit.replicate;

      optimize::RunConfig cfg = entry.config;
      cfg.objective = task;
      cfg.seed = replicate_seed(manifest.master_seed, task, entry.label, unit.replicate);
      if (options.charge_invalid) cfg.charge_invalid = true;

      const fs::path cell = fs::path(out_dir) / (task + "__" + entry.label);
      const std::string rep = "rep" + std::to_string(unit.replicate);
      try {
        const optimize::RunResult result = optimize::run_optimization(
            cfg, prior, objectives[static_cast<std::size_t>(unit.task)]);
        write_run_jsonl(result.log, (cell / (rep + ".jsonl")).string());
        const metrics::MetricReport report =
            metrics::compute_all(result.log, stats, cfg.budget, cfg.record_interval);
        metrics::save_report(report, (cell / (rep + ".report.json")).string());
        row.auc_plain = report.auc_plain;
        row.auc_filtered = report.auc_filtered;
        row.auc_diverse = report.auc_diverse;
        row.auc_combined = report.auc_combined;
        row.stop_reason = result.stop_reason;
        row.calls_used = report.calls_used;
      } catch (const std::exception& e) {
        row.stop_reason = std::string("error: ") + e.what();
      }
    }
  };

  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  write_summary_csv(rows, (fs::path(out_dir) / "summary.csv").string());
  return rows;
}

// ---------------------------------------------------------------------------
// Subcommands

refstats::ReferenceStats cmd_stats(const StatsOptions& options) {
  const refstats::ReferenceStats stats =
      refstats::build_stats(options.corpus, options.fp_radius, options.fp_width);
  refstats::save_stats(stats, options.out);
  std::printf("corpus      %s\n", options.corpus.c_str());
  std::printf("digest      %s\n", stats.source_digest.c_str());
  std::printf("molecules   %d (skipped %d)\n", stats.n_molecules, stats.skipped);
  std::printf("mw          %.4f +- %.4f\n", stats.mw_mean, stats.mw_std);
  std::printf("logp        %.4f +- %.4f\n", stats.logp_mean, stats.logp_std);
  std::printf("fingerprint radius %d, width %u, %zu distinct bits\n", stats.fp_radius,
              stats.fp_width, stats.bit_universe.size());
  std::printf("stats file  %s\n", options.out.c_str());
  return stats;
}

policy::PretrainReport cmd_pretrain(const PretrainOptions& options) {
  if (options.profile != "desk" && options.profile != "paper") {
    throw ValidationError("unknown profile '" + options.profile +
                          "' (expected desk or paper)");
  }
  if (options.epochs < 0) throw ValidationError("epochs must be nonnegative");
  const int embed = options.profile == "desk" ? 48 : 128;
  const int hidden = options.profile == "desk" ? 128 : 512;
  const int layers = options.profile == "desk" ? 1 : 3;

  std::ifstream in(options.corpus);
  if (!in) throw IoFailure("cannot open corpus " + options.corpus);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }

  policy::GruLM model = policy::GruLM::init(policy::Vocabulary::build(lines), embed,
                                            hidden, layers, options.seed);
  std::printf("profile %s: embed %d, hidden %d, layers %d, vocabulary %d, corpus %zu lines\n",
              options.profile.c_str(), embed, hidden, layers, model.vocab().size(),
              lines.size());

  const policy::PretrainReport report =
      policy::pretrain(model, lines, options.epochs, options.batch_size, options.lr,
                       options.seed);
  policy::save_checkpoint(model, options.out);

  const std::string csv_path = options.out + ".nll.csv";
  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw IoFailure("cannot write " + csv_path);
  csv << "epoch,mean_nll\n";
  for (std::size_t e = 0; e < report.epoch_mean_nll.size(); ++e) {
    csv << (e + 1) << ',' << fmt_double(report.epoch_mean_nll[e]) << "\n";
    std::printf("epoch %zu: mean per-token NLL %.6f\n", e + 1, report.epoch_mean_nll[e]);
  }
  if (report.skipped_too_long > 0) {
    std::printf("skipped %d over-length lines\n", report.skipped_too_long);
  }
  std::printf("checkpoint %s (digest %s)\n", options.out.c_str(),
              model.param_digest().c_str());
  return report;
}

std::vector<SummaryRow> cmd_run(const std::string& manifest_path,
                                const BenchmarkOptions& options) {
  return run_benchmark(ExperimentManifest::from_json_file(manifest_path), options);
}

namespace {

std::string grid_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::vector<SummaryRow> cmd_grid(const std::string& manifest_path,
                                 const GridOptions& options) {
  if (options.sigmas.empty() || options.ks.empty()) {
    throw ValidationError("grid: --sigma and --k both need at least one value");
  }
  ExperimentManifest manifest = ExperimentManifest::from_json_file(manifest_path);

  // The first manifest optimizer donates everything but sigma/k; the grid is
  // an AHC sweep by definition.
  OptimizerEntry base = manifest.optimizers.front();
  base.config.optimizer = optimize::Optimizer::kAhc;

  manifest.optimizers.clear();
  std::vector<std::pair<double, double>> cells;
  for (const double sigma : options.sigmas) {
    for (const double k : options.ks) {
      OptimizerEntry entry = base;
      entry.config.sigma = sigma;
      entry.config.k_fraction = k;
      entry.label = "AHC_s" + grid_number(sigma) + "_k" + grid_number(k);
      manifest.optimizers.push_back(std::move(entry));
      cells.emplace_back(sigma, k);
    }
  }

  const std::vector<SummaryRow> rows = run_benchmark(manifest, options.run);

  const std::string out_dir =
      options.run.output_dir.empty() ? manifest.output : options.run.output_dir;
  const std::string grid_path = (fs::path(out_dir) / "grid.csv").string();
  std::ofstream out(grid_path, std::ios::trunc);
  if (!out) throw IoFailure("cannot open grid csv for writing: " + grid_path);
  out << "sigma,k,auc_plain,auc_filtered,auc_diverse,auc_combined,runs,failures\n";
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const std::string& label = manifest.optimizers[c].label;
    double sums[4] = {0, 0, 0, 0};
    int runs = 0, failures = 0;
    for (const auto& r : rows) {
      if (r.optimizer != label) continue;
      if (r.failed()) {
        ++failures;
        continue;
      }
      sums[0] += r.auc_plain;
      sums[1] += r.auc_filtered;
      sums[2] += r.auc_diverse;
      sums[3] += r.auc_combined;
      ++runs;
    }
    const double denom = runs > 0 ? runs : 1;
    out << grid_number(cells[c].first) << ',' << grid_number(cells[c].second) << ','
        << fmt_double(sums[0] / denom) << ',' << fmt_double(sums[1] / denom) << ','
        << fmt_double(sums[2] / denom) << ',' << fmt_double(sums[3] / denom) << ','
        << runs << ',' << failures << "\n";
  }
  if (!out) throw IoFailure("failed writing grid csv: " + grid_path);
  return rows;
}

// ---------------------------------------------------------------------------
// Report

namespace {

// A run's metric report plus where it came from, for diagnostics/plot data.
struct ReportEntry {
  SummaryRow row;
  metrics::MetricReport report;
  bool has_report = false;
};

std::vector<oracle::OracleRecord> read_jsonl_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open " + path);
  std::vector<oracle::OracleRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      oracle::OracleRecord rec;
      rec.call_index = j.at("call_index").get<int>();
      rec.key = j.at("smiles").get<std::string>();
      rec.score = j.at("score").get<double>();
      if (rec.call_index < 1) throw ValidationError("call_index must be >= 1");
      records.push_back(std::move(rec));
    } catch (const std::exception& e) {
      std::fprintf(stderr, "warning: %s:%d: bad record skipped (%s)\n", path.c_str(),
                   lineno, e.what());
    }
  }
  return records;
}

std::string sanitize_label(std::string s) {
  for (char& c : s) {
    if (!safe_name(std::string(1, c))) c = '_';
  }
  return s.empty() ? std::string("external") : s;
}

}  // namespace

void cmd_report(const std::string& run_dir, const std::string& out_dir) {
  if (!fs::is_directory(run_dir)) {
    throw ValidationError(run_dir + " is not a directory");
  }

  // Stats come from the resolved manifest the run wrote next to its outputs.
  const fs::path manifest_path = fs::path(run_dir) / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw ValidationError(run_dir + ": no manifest.json (not a run directory?)");
  }
  const ExperimentManifest manifest =
      ExperimentManifest::from_json_file(manifest_path.string());
  const refstats::ReferenceStats stats = refstats::load_stats(manifest.stats);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoFailure("cannot create report directory " + out_dir + ": " + ec.message());

  // Gather summary rows and, per run, the stored metric report.
  std::vector<ReportEntry> entries;
  bool any_summary = false;
  for (const auto& walk : fs::recursive_directory_iterator(run_dir)) {
    if (!walk.is_regular_file() || walk.path().filename() != "summary.csv") continue;
    any_summary = true;
    for (SummaryRow& row : load_summary_csv(walk.path().string())) {
      ReportEntry entry;
      entry.row = std::move(row);
      const fs::path report_path = walk.path().parent_path() /
                                   (entry.row.task + "__" + entry.row.optimizer) /
                                   ("rep" + std::to_string(entry.row.replicate) +
                                    ".report.json");
      if (!entry.row.failed() && fs::exists(report_path)) {
        entry.report = metrics::load_report(report_path.string());
        entry.has_report = true;
      }
      entries.push_back(std::move(entry));
    }
  }
  if (!any_summary) {
    throw ValidationError(run_dir + ": no summary.csv found (run `run` first)");
  }

  // Third-party logs: any JSONL without our sibling report file is ingested
  // as optimizer "<file stem>" on task "external" and scored like our runs.
  for (const auto& walk : fs::recursive_directory_iterator(run_dir)) {
    if (!walk.is_regular_file() || walk.path().extension() != ".jsonl") continue;
    fs::path sibling = walk.path();
    sibling.replace_extension(".report.json");
    if (fs::exists(sibling)) continue;
    const std::vector<oracle::OracleRecord> log = read_jsonl_log(walk.path().string());
    if (log.empty()) {
      std::fprintf(stderr, "warning: %s: no usable records, skipped\n",
                   walk.path().c_str());
      continue;
    }
    int budget = 0;
    for (const auto& rec : log) budget = std::max(budget, rec.call_index);
    ReportEntry entry;
    entry.row.task = "external";
    entry.row.optimizer = sanitize_label(walk.path().stem().string());
    entry.row.replicate = 0;
    entry.row.stop_reason = "external";
    try {
      entry.report = metrics::compute_all(log, stats, budget);
      entry.has_report = true;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "warning: %s: %s, skipped\n", walk.path().c_str(), e.what());
      continue;
    }
    entry.row.auc_plain = entry.report.auc_plain;
    entry.row.auc_filtered = entry.report.auc_filtered;
    entry.row.auc_diverse = entry.report.auc_diverse;
    entry.row.auc_combined = entry.report.auc_combined;
    entry.row.calls_used = entry.report.calls_used;
    const fs::path ext_dir = fs::path(out_dir) / "external";
    fs::create_directories(ext_dir, ec);
    metrics::save_report(entry.report,
                         (ext_dir / (entry.row.optimizer + ".report.json")).string());
    entries.push_back(std::move(entry));
  }

  // Rank table: optimizers ordered by mean AUC across everything that ran.
  {
    const std::string path = (fs::path(out_dir) / "rank_table.csv").string();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + path);
    out << "metric,rank,optimizer,mean_auc,runs\n";
    const char* metric_names[4] = {"plain", "filtered", "diverse", "combined"};
    for (int m = 0; m < 4; ++m) {
      std::map<std::string, std::pair<double, int>> by_opt;  // label -> (sum, n)
      for (const auto& e : entries) {
        if (e.row.failed()) continue;
        const double v = m == 0   ? e.row.auc_plain
                         : m == 1 ? e.row.auc_filtered
                         : m == 2 ? e.row.auc_diverse
                                  : e.row.auc_combined;
        auto& slot = by_opt[e.row.optimizer];
        slot.first += v;
        slot.second += 1;
      }
      std::vector<std::pair<std::string, std::pair<double, int>>> ranked(by_opt.begin(),
                                                                         by_opt.end());
      std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        const double ma = a.second.first / a.second.second;
        const double mb = b.second.first / b.second.second;
        if (ma != mb) return ma > mb;
        return a.first < b.first;
      });
      for (std::size_t i = 0; i < ranked.size(); ++i) {
        out << metric_names[m] << ',' << (i + 1) << ',' << csv_field(ranked[i].first)
            << ',' << fmt_double(ranked[i].second.first / ranked[i].second.second)
            << ',' << ranked[i].second.second << "\n";
      }
    }
    if (!out) throw IoFailure("failed writing " + path);
  }

  // Property-drift diagnostics: final plain top-10 of each run, z-scored
  // against the reference stats, plus the mean de novo bit fraction.
  {
    const std::string path = (fs::path(out_dir) / "diagnostics.csv").string();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + path);
    out << "task,optimizer,replicate,top_n,mw_z_mean,logp_z_mean,denovo_mean\n";
    for (const auto& e : entries) {
      if (!e.has_report || e.report.plain_top.empty()) continue;
      double mw_z = 0.0, logp_z = 0.0, denovo = 0.0;
      int n = 0;
      for (const std::string& key : e.report.plain_top) {
        chem::Molecule mol;
        try {
          mol = chem::parse_smiles(key);
        } catch (const chem::ParseError&) {
          continue;  // charged invalid strings never make a top-10, but be safe
        }
        mw_z += (desc::mol_weight(mol) - stats.mw_mean) / stats.mw_std;
        logp_z += (desc::crippen_logp(mol) - stats.logp_mean) / stats.logp_std;
        denovo += refstats::denovo_fraction(
            fp::ecfp(mol, stats.fp_radius, stats.fp_width), stats);
        ++n;
      }
      if (n == 0) continue;
      out << csv_field(e.row.task) << ',' << csv_field(e.row.optimizer) << ','
          << e.row.replicate << ',' << n << ',' << fmt_double(mw_z / n) << ','
          << fmt_double(logp_z / n) << ',' << fmt_double(denovo / n) << "\n";
    }
    if (!out) throw IoFailure("failed writing " + path);
  }

  // Plot-ready long format: one row per (run, recording point, metric).
  {
    const std::string path = (fs::path(out_dir) / "plot_data.csv").string();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + path);
    out << "task,optimizer,replicate,call_index,metric,value\n";
    for (const auto& e : entries) {
      if (!e.has_report) continue;
      for (const auto& pt : e.report.series) {
        const std::pair<const char*, double> vals[4] = {{"plain", pt.plain},
                                                        {"filtered", pt.filtered},
                                                        {"diverse", pt.diverse},
                                                        {"combined", pt.combined}};
        for (const auto& [name, value] : vals) {
          out << csv_field(e.row.task) << ',' << csv_field(e.row.optimizer) << ','
              << e.row.replicate << ',' << pt.call_index << ',' << name << ','
              << fmt_double(value) << "\n";
        }
      }
    }
    if (!out) throw IoFailure("failed writing " + path);
  }

  std::printf("report written to %s (%zu runs)\n", out_dir.c_str(), entries.size());
}

}  // namespace molopt::harness

//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
// Benchmark harness tests: manifest parsing and validation, seed derivation,
// summary CSV round-trips, and a miniature end-to-end benchmark whose outputs
// are checked for determinism and reproduced run by run from first
// principles.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "molopt/common.hpp"
#include "molopt/harness/harness.hpp"
#include "molopt/metrics.hpp"
#include "molopt/optimize.hpp"
#include "molopt/oracle.hpp"
#include "molopt/policy/model.hpp"
#include "molopt/refstats.hpp"

using namespace molopt;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  REQUIRE(out.good());
  out << text;
}

// A scratch directory wiped per test case.
fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("molopt_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::vector<std::string> kCorpusLines = {
    "C",     "CC",    "CCC",  "CCCC", "CCO",   "CCCO",
    "COC",   "CCOC",  "OCCO", "CCCCC", "CCOCC", "OCCCO"};

// Lays down corpus.smi, stats.json, prior.ckpt and objective.json in `dir`
// and returns the corpus digest.
std::string make_workspace(const fs::path& dir) {
  std::string corpus_text;
  for (const auto& line : kCorpusLines) corpus_text += line + "\n";
  spit(dir / "corpus.smi", corpus_text);

  const std::string digest = refstats::file_digest((dir / "corpus.smi").string());
  refstats::save_stats(refstats::build_stats((dir / "corpus.smi").string(), 2, 2048),
                       (dir / "stats.json").string());

  const policy::GruLM prior =
      policy::GruLM::init(policy::Vocabulary::build(kCorpusLines), 6, 8, 1, 13);
  policy::save_checkpoint(prior, (dir / "prior.ckpt").string());

  spit(dir / "objective.json", R"({
    "name": "const1",
    "components": [{"source": "mw", "modifier": {"kind": "identity"}}]
  })");
  return digest;
}

// The manifest JSON for `make_workspace`, with relative paths on purpose.
std::string make_manifest_text(const std::string& digest) {
  nlohmann::json j;
  j["corpus"] = "corpus.smi";
  j["corpus_digest"] = digest;
  j["stats"] = "stats.json";
  j["prior"] = "prior.ckpt";
  j["tasks"] = {"objective.json"};
  j["optimizers"] = nlohmann::json::array(
      {{{"label", "RND"}, {"optimizer", "RANDOM"}, {"batch_size", 8},
        {"budget", 25}, {"record_interval", 10}},
       {{"label", "AHC"}, {"optimizer", "AHC"}, {"sigma", 120.0},
        {"k_fraction", 0.25}, {"batch_size", 8}, {"budget", 25},
        {"record_interval", 10}}});
  j["replicates"] = 2;
  j["master_seed"] = 7;
  j["output"] = "";
  return j.dump(2);
}

}  // namespace

TEST_CASE("replicate_seed: deterministic and sensitive to every input") {
  const std::uint64_t base = harness::replicate_seed(7, "taskA", "OPT", 1);
  CHECK(harness::replicate_seed(7, "taskA", "OPT", 1) == base);
  CHECK(harness::replicate_seed(8, "taskA", "OPT", 1) != base);
  CHECK(harness::replicate_seed(7, "taskB", "OPT", 1) != base);
  CHECK(harness::replicate_seed(7, "taskA", "OPT2", 1) != base);
  CHECK(harness::replicate_seed(7, "taskA", "OPT", 2) != base);
  // Length delimiting: moving a character across the task/label boundary
  // changes the seed even though the concatenation is identical.
  CHECK(harness::replicate_seed(7, "ab", "c", 1) != harness::replicate_seed(7, "a", "bc", 1));

  // Replicates of one cell are distinct.
  std::set<std::uint64_t> seen;
  for (int r = 1; r <= 64; ++r) seen.insert(harness::replicate_seed(7, "t", "o", r));
  CHECK(seen.size() == 64);
}

TEST_CASE("manifest: JSON round-trip preserves configuration") {
  harness::ExperimentManifest m;
  m.corpus = "/data/corpus.smi";
  m.corpus_digest = "0123456789abcdef";
  m.stats = "/data/stats.json";
  m.prior = "/data/prior.ckpt";
  m.tasks = {"/data/a.json", "/data/b.json"};
  harness::OptimizerEntry e1;
  e1.label = "AHC_base";
  e1.config.budget = 500;
  e1.config.sigma = 60.0;
  harness::OptimizerEntry e2;
  e2.label = "HC";
  e2.config.optimizer = optimize::Optimizer::kHc;
  e2.config.charge_invalid = true;
  m.optimizers = {e1, e2};
  m.replicates = 3;
  m.master_seed = 424242;
  m.output = "/tmp/out";

  const harness::ExperimentManifest back =
      harness::ExperimentManifest::from_json_text(m.to_json_text(), "");
  CHECK(back.corpus == m.corpus);
  CHECK(back.corpus_digest == m.corpus_digest);
  CHECK(back.stats == m.stats);
  CHECK(back.prior == m.prior);
  CHECK(back.tasks == m.tasks);
  CHECK(back.replicates == 3);
  CHECK(back.master_seed == 424242);
  CHECK(back.output == m.output);
  REQUIRE(back.optimizers.size() == 2);
  CHECK(back.optimizers[0].label == "AHC_base");
  CHECK(back.optimizers[0].config.budget == 500);
  CHECK(back.optimizers[0].config.sigma == 60.0);
  CHECK(back.optimizers[1].label == "HC");
  CHECK(back.optimizers[1].config.optimizer == optimize::Optimizer::kHc);
  CHECK(back.optimizers[1].config.charge_invalid);
}

TEST_CASE("manifest: relative paths resolve against the manifest directory") {
  const std::string text = R"({
    "corpus": "data/corpus.smi",
    "corpus_digest": "0123456789abcdef",
    "stats": "stats.json",
    "prior": "/abs/prior.ckpt",
    "tasks": ["tasks/a.json"],
    "optimizers": [{"label": "X"}],
    "replicates": 1
  })";
  const harness::ExperimentManifest m =
      harness::ExperimentManifest::from_json_text(text, "/base");
  CHECK(m.corpus == "/base/data/corpus.smi");
  CHECK(m.stats == "/base/stats.json");
  CHECK(m.prior == "/abs/prior.ckpt");  // absolute paths stay put
  CHECK(m.tasks == std::vector<std::string>{"/base/tasks/a.json"});
  // With no base directory the raw strings survive.
  const harness::ExperimentManifest raw = harness::ExperimentManifest::from_json_text(text, "");
  CHECK(raw.corpus == "data/corpus.smi");
}

TEST_CASE("manifest: malformed inputs are rejected with validation errors") {
  using M = harness::ExperimentManifest;
  const auto reject = [](const std::string& text) {
    CHECK_THROWS_AS(M::from_json_text(text, ""), ValidationError);
  };

  reject("not json at all");
  reject("[]");

  // A valid skeleton to mutate.
  nlohmann::json base;
  base["corpus"] = "c.smi";
  base["corpus_digest"] = "0123456789abcdef";
  base["stats"] = "s.json";
  base["prior"] = "p.ckpt";
  base["tasks"] = {"t.json"};
  base["optimizers"] = nlohmann::json::array({{{"label", "A"}}});
  base["replicates"] = 1;
  CHECK_NOTHROW(M::from_json_text(base.dump(), ""));

  auto j = base;
  j["budget"] = 5;  // unknown top-level key
  reject(j.dump());

  j = base;
  j["corpus_digest"] = "0123456789ABCDEF";  // uppercase hex
  reject(j.dump());
  j["corpus_digest"] = "0123456789abcde";  // 15 digits
  reject(j.dump());

  j = base;
  j["replicates"] = 0;
  reject(j.dump());

  j = base;
  j["tasks"] = nlohmann::json::array();
  reject(j.dump());

  j = base;
  j["optimizers"] = nlohmann::json::array();
  reject(j.dump());

  // Per-cell fields are derived; entries must not set them.
  j = base;
  j["optimizers"] = nlohmann::json::array({{{"label", "A"}, {"seed", 1}}});
  reject(j.dump());
  j["optimizers"] = nlohmann::json::array({{{"label", "A"}, {"objective", "x"}}});
  reject(j.dump());

  // Entry knobs flow through the run-config parser, unknown keys included.
  j = base;
  j["optimizers"] = nlohmann::json::array({{{"label", "A"}, {"sigmaa", 60}}});
  reject(j.dump());
  j["optimizers"] = nlohmann::json::array({{{"label", "A"}, {"budget", -3}}});
  reject(j.dump());

  // Labels become directory names.
  j = base;
  j["optimizers"] = nlohmann::json::array({{{"label", "bad/label"}}});
  reject(j.dump());
  j["optimizers"] = nlohmann::json::array({{{"label", ""}}});
  reject(j.dump());
  j["optimizers"] =
      nlohmann::json::array({{{"label", "A"}}, {{"label", "A"}}});  // duplicate
  reject(j.dump());

  CHECK_THROWS_AS(M::from_json_file("/nonexistent/manifest.json"), IoFailure);
}

TEST_CASE("summary CSV: round-trips rows including quoting") {
  const fs::path dir = scratch_dir("csv");
  std::vector<harness::SummaryRow> rows(3);
  rows[0] = {"taskA", "AHC", 1, 0.25, 0.2, 0.15, 0.1, "budget", 2000};
  rows[1] = {"task,with,commas", "opt\"quoted\"", 2, 0.5, 0.5, 0.5, 0.5,
             "error: exploded, badly \"twice\"", 17};
  rows[2] = {"t", "o", 3, 1e-17, 0.123456789012345678, 0.0, 1.0, "patience", 40};

  const std::string path = (dir / "summary.csv").string();
  harness::write_summary_csv(rows, path);
  const std::vector<harness::SummaryRow> back = harness::load_summary_csv(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].task == rows[i].task);
    CHECK(back[i].optimizer == rows[i].optimizer);
    CHECK(back[i].replicate == rows[i].replicate);
    CHECK(back[i].auc_plain == rows[i].auc_plain);  // shortest round-trip format
    CHECK(back[i].auc_filtered == rows[i].auc_filtered);
    CHECK(back[i].auc_diverse == rows[i].auc_diverse);
    CHECK(back[i].auc_combined == rows[i].auc_combined);
    CHECK(back[i].stop_reason == rows[i].stop_reason);
    CHECK(back[i].calls_used == rows[i].calls_used);
  }
  CHECK_FALSE(back[0].failed());
  CHECK(back[1].failed());
}

TEST_CASE("summary CSV: malformed rows are skipped, good ones kept") {
  const fs::path dir = scratch_dir("csv_bad");
  const std::string path = (dir / "summary.csv").string();
  spit(path,
       "task,optimizer,replicate,auc_plain,auc_filtered,auc_diverse,auc_combined,"
       "stop_reason,calls_used\n"
       "good,opt,1,0.5,0.4,0.3,0.2,budget,100\n"
       "short,row,only\n"                                  // wrong field count
       "\"unterminated,opt,1,0,0,0,0,x,1\n"                // dangling quote
       "bad,opt,NOTANUMBER,0,0,0,0,x,1\n"                  // unparseable int
       "\n"                                                 // blank: ignored
       "good2,opt,2,0.1,0.1,0.1,0.1,patience,60\n");
  const std::vector<harness::SummaryRow> rows = harness::load_summary_csv(path);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].task == "good");
  CHECK(rows[1].task == "good2");
  CHECK(rows[1].replicate == 2);
  CHECK_THROWS_AS(harness::load_summary_csv((dir / "missing.csv").string()), IoFailure);
}

TEST_CASE("run_benchmark: digest gating refuses stale inputs") {
  const fs::path dir = scratch_dir("gating");
  const std::string digest = make_workspace(dir);

  harness::BenchmarkOptions opt;
  opt.output_dir = (dir / "out").string();

  // Wrong corpus digest in the manifest.
  {
    nlohmann::json j = nlohmann::json::parse(make_manifest_text(digest));
    j["corpus_digest"] = "0000000000000000";
    CHECK_THROWS_AS(
        harness::run_benchmark(
            harness::ExperimentManifest::from_json_text(j.dump(), dir.string()), opt),
        ValidationError);
  }

  // Stats built from a different corpus.
  {
    spit(dir / "other.smi", "CCO\nCCC\nCOC\nCCCC\nOCCO\n");
    refstats::save_stats(refstats::build_stats((dir / "other.smi").string(), 2, 2048),
                         (dir / "stats.json").string());
    CHECK_THROWS_AS(
        harness::run_benchmark(harness::ExperimentManifest::from_json_text(
                                   make_manifest_text(digest), dir.string()),
                               opt),
        ValidationError);
  }
}

TEST_CASE("run_benchmark: duplicate task names and cell collisions are rejected") {
  const fs::path dir = scratch_dir("cells");
  const std::string digest = make_workspace(dir);
  harness::BenchmarkOptions opt;
  opt.output_dir = (dir / "out").string();

  // The same objective twice is a duplicate task name.
  {
    nlohmann::json j = nlohmann::json::parse(make_manifest_text(digest));
    j["tasks"] = {"objective.json", "objective.json"};
    CHECK_THROWS_AS(
        harness::run_benchmark(
            harness::ExperimentManifest::from_json_text(j.dump(), dir.string()), opt),
        ValidationError);
  }

  // task "a__b" + label "c" composes the same directory as "a" + "b__c".
  {
    spit(dir / "obj_ab.json",
         R"({"name": "a__b", "components": [{"source": "mw", "modifier": {"kind": "identity"}}]})");
    spit(dir / "obj_a.json",
         R"({"name": "a", "components": [{"source": "logp", "modifier": {"kind": "identity"}}]})");
    nlohmann::json j = nlohmann::json::parse(make_manifest_text(digest));
    j["tasks"] = {"obj_ab.json", "obj_a.json"};
    j["optimizers"] = nlohmann::json::array(
        {{{"label", "c"}, {"budget", 5}}, {{"label", "b__c"}, {"budget", 5}}});
    CHECK_THROWS_AS(
        harness::run_benchmark(
            harness::ExperimentManifest::from_json_text(j.dump(), dir.string()), opt),
        ValidationError);
  }

  // No output directory anywhere.
  {
    harness::BenchmarkOptions none;
    CHECK_THROWS_AS(
        harness::run_benchmark(harness::ExperimentManifest::from_json_text(
                                   make_manifest_text(digest), dir.string()),
                               none),
        ValidationError);
  }
}

TEST_CASE("run_benchmark: end-to-end grid, determinism, and per-run reproduction") {
  const fs::path dir = scratch_dir("e2e");
  const std::string digest = make_workspace(dir);
  spit(dir / "manifest.json", make_manifest_text(digest));

  harness::BenchmarkOptions serial;
  serial.output_dir = (dir / "out1").string();
  serial.threads = 1;
  const std::vector<harness::SummaryRow> rows =
      harness::cmd_run((dir / "manifest.json").string(), serial);

  // 1 task × 2 optimizers × 2 replicates, expanded task-major, replicates
  // 1-based and innermost.
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].task == "const1");
  CHECK(rows[0].optimizer == "RND");
  CHECK(rows[0].replicate == 1);
  CHECK(rows[1].optimizer == "RND");
  CHECK(rows[1].replicate == 2);
  CHECK(rows[2].optimizer == "AHC");
  CHECK(rows[2].replicate == 1);
  CHECK(rows[3].optimizer == "AHC");
  CHECK(rows[3].replicate == 2);
  for (const auto& row : rows) {
    CHECK_FALSE(row.failed());
    CHECK(row.calls_used <= 25);
    CHECK(row.auc_plain >= row.auc_filtered);
    CHECK(row.auc_plain >= row.auc_diverse);
    CHECK(row.auc_filtered >= row.auc_combined);
    CHECK(row.auc_diverse >= row.auc_combined);
  }

  // The summary on disk is the returned rows.
  const std::vector<harness::SummaryRow> loaded =
      harness::load_summary_csv((dir / "out1" / "summary.csv").string());
  REQUIRE(loaded.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(loaded[i].task == rows[i].task);
    CHECK(loaded[i].optimizer == rows[i].optimizer);
    CHECK(loaded[i].replicate == rows[i].replicate);
    CHECK(loaded[i].auc_plain == rows[i].auc_plain);
    CHECK(loaded[i].calls_used == rows[i].calls_used);
  }

  // Per-cell artifacts: JSONL log lines match calls_used, the stored report
  // matches the summary row, and the resolved manifest copy re-loads.
  for (const auto& row : rows) {
    const fs::path cell = dir / "out1" / (row.task + "__" + row.optimizer);
    const fs::path log_path = cell / ("rep" + std::to_string(row.replicate) + ".jsonl");
    const fs::path report_path =
        cell / ("rep" + std::to_string(row.replicate) + ".report.json");
    REQUIRE(fs::exists(log_path));
    REQUIRE(fs::exists(report_path));

    std::istringstream log_text(slurp(log_path));
    std::string line;
    int lines = 0;
    while (std::getline(log_text, line)) {
      if (!line.empty()) ++lines;
    }
    CHECK(lines == row.calls_used);

    const metrics::MetricReport report = metrics::load_report(report_path.string());
    CHECK(report.auc_plain == row.auc_plain);
    CHECK(report.auc_combined == row.auc_combined);
    CHECK(report.calls_used == row.calls_used);
    CHECK(report.budget == 25);
  }
  const harness::ExperimentManifest copy =
      harness::ExperimentManifest::from_json_file((dir / "out1" / "manifest.json").string());
  CHECK(copy.corpus == (dir / "corpus.smi").string());
  CHECK(copy.corpus_digest == digest);

  // A threaded re-run produces byte-identical outputs.
  harness::BenchmarkOptions threaded;
  threaded.output_dir = (dir / "out2").string();
  threaded.threads = 3;
  harness::cmd_run((dir / "manifest.json").string(), threaded);
  CHECK(slurp(dir / "out1" / "summary.csv") == slurp(dir / "out2" / "summary.csv"));
  for (const auto& row : rows) {
    const std::string rel = row.task + "__" + row.optimizer + "/rep" +
                            std::to_string(row.replicate);
    CHECK(slurp(dir / "out1" / (rel + ".jsonl")) == slurp(dir / "out2" / (rel + ".jsonl")));
    CHECK(slurp(dir / "out1" / (rel + ".report.json")) ==
          slurp(dir / "out2" / (rel + ".report.json")));
  }

  // Reproduce the AHC replicate-2 run from first principles: same prior,
  // objective, settings, and the derived seed must give the same log bytes.
  {
    const policy::GruLM prior = policy::load_checkpoint((dir / "prior.ckpt").string());
    const oracle::Objective objective =
        oracle::Objective::from_json_file((dir / "objective.json").string());
    optimize::RunConfig cfg;
    cfg.optimizer = optimize::Optimizer::kAhc;
    cfg.sigma = 120.0;
    cfg.k_fraction = 0.25;
    cfg.batch_size = 8;
    cfg.budget = 25;
    cfg.record_interval = 10;
    cfg.objective = "const1";
    cfg.seed = harness::replicate_seed(7, "const1", "AHC", 2);
    const optimize::RunResult result = optimize::run_optimization(cfg, prior, objective);

    std::istringstream log_text(slurp(dir / "out1" / "const1__AHC" / "rep2.jsonl"));
    std::string line;
    std::vector<oracle::OracleRecord> stored;
    while (std::getline(log_text, line)) {
      if (line.empty()) continue;
      const nlohmann::json j = nlohmann::json::parse(line);
      stored.push_back({j.at("call_index").get<int>(), j.at("smiles").get<std::string>(),
                        j.at("score").get<double>()});
    }
    REQUIRE(stored.size() == result.log.size());
    for (std::size_t i = 0; i < stored.size(); ++i) {
      CHECK(stored[i].call_index == result.log[i].call_index);
      CHECK(stored[i].key == result.log[i].key);
      CHECK(stored[i].score == result.log[i].score);
    }
    CHECK(result.stop_reason == rows[3].stop_reason);

    // And its AUCs recompute from the log exactly as summarized.
    const refstats::ReferenceStats stats = refstats::load_stats((dir / "stats.json").string());
    const metrics::MetricReport report = metrics::compute_all(result.log, stats, 25, 10);
    CHECK(report.auc_plain == rows[3].auc_plain);
    CHECK(report.auc_filtered == rows[3].auc_filtered);
    CHECK(report.auc_diverse == rows[3].auc_diverse);
    CHECK(report.auc_combined == rows[3].auc_combined);
  }
}

TEST_CASE("cmd_report: rank table, diagnostics, plot data, external ingestion") {
  const fs::path dir = scratch_dir("report");
  const std::string digest = make_workspace(dir);
  spit(dir / "manifest.json", make_manifest_text(digest));

  harness::BenchmarkOptions opt;
  opt.output_dir = (dir / "out").string();
  const std::vector<harness::SummaryRow> rows =
      harness::cmd_run((dir / "manifest.json").string(), opt);

  // A third-party log: three valid molecules, one per call.  The stem has a
  // space to exercise label sanitization.
  spit(dir / "out" / "my log.jsonl",
       "{\"call_index\": 1, \"smiles\": \"CCO\", \"score\": 0.5}\n"
       "{\"call_index\": 2, \"smiles\": \"CC\", \"score\": 0.2}\n"
       "{\"call_index\": 3, \"smiles\": \"C\", \"score\": 0.9}\n");

  const fs::path out = dir / "rep";
  harness::cmd_report((dir / "out").string(), out.string());
  REQUIRE(fs::exists(out / "rank_table.csv"));
  REQUIRE(fs::exists(out / "diagnostics.csv"));
  REQUIRE(fs::exists(out / "plot_data.csv"));
  REQUIRE(fs::exists(out / "external" / "my_log.report.json"));

  // Rank table: four metrics × three optimizers (RND, AHC, my_log), ranks
  // 1..3 within each metric, means matching the summary rows.
  std::istringstream rank_text(slurp(out / "rank_table.csv"));
  std::string line;
  std::getline(rank_text, line);
  CHECK(line == "metric,rank,optimizer,mean_auc,runs");
  int rank_rows = 0;
  double rnd_plain_mean = -1.0, mylog_plain_mean = -1.0;
  std::vector<double> plain_means_in_order;
  while (std::getline(rank_text, line)) {
    if (line.empty()) continue;
    ++rank_rows;
    std::istringstream fields(line);
    std::string metric, rank, optimizer, mean, runs;
    std::getline(fields, metric, ',');
    std::getline(fields, rank, ',');
    std::getline(fields, optimizer, ',');
    std::getline(fields, mean, ',');
    std::getline(fields, runs, ',');
    if (metric == "plain") {
      plain_means_in_order.push_back(std::stod(mean));
      if (optimizer == "RND") {
        rnd_plain_mean = std::stod(mean);
        CHECK(runs == "2");
      }
      if (optimizer == "my_log") {
        mylog_plain_mean = std::stod(mean);
        CHECK(runs == "1");
      }
    }
  }
  CHECK(rank_rows == 12);
  CHECK(rnd_plain_mean == (rows[0].auc_plain + rows[1].auc_plain) / 2);
  // External logs are scored with our metrics: budget 3 (max call index),
  // one recording point at call 3 → AUC = top-10 mean · 1/3.
  CHECK(mylog_plain_mean == doctest::Approx((0.5 + 0.2 + 0.9) / 10.0 / 3.0).epsilon(1e-12));
  for (std::size_t i = 1; i < plain_means_in_order.size(); ++i) {
    CHECK(plain_means_in_order[i - 1] >= plain_means_in_order[i]);  // rank order
  }

  // Diagnostics: header plus one row per run with a nonempty top pool.
  std::istringstream diag_text(slurp(out / "diagnostics.csv"));
  std::getline(diag_text, line);
  CHECK(line == "task,optimizer,replicate,top_n,mw_z_mean,logp_z_mean,denovo_mean");
  int diag_rows = 0;
  while (std::getline(diag_text, line)) {
    if (!line.empty()) ++diag_rows;
  }
  CHECK(diag_rows == 5);  // 4 benchmark runs + the external log

  // Plot data: per recording point, all four metrics for every run.
  std::istringstream plot_text(slurp(out / "plot_data.csv"));
  std::getline(plot_text, line);
  CHECK(line == "task,optimizer,replicate,call_index,metric,value");
  int plot_rows = 0;
  while (std::getline(plot_text, line)) {
    if (!line.empty()) ++plot_rows;
  }
  int expected = 4;  // the external log: one point × four metrics
  for (const auto& row : rows) {
    const fs::path report_path = dir / "out" / (row.task + "__" + row.optimizer) /
                                 ("rep" + std::to_string(row.replicate) + ".report.json");
    expected += 4 * static_cast<int>(metrics::load_report(report_path.string()).series.size());
  }
  CHECK(plot_rows == expected);

  // Error handling: not a directory, and a directory that is not a run.
  CHECK_THROWS_AS(harness::cmd_report((dir / "nope").string(), out.string()),
                  ValidationError);
  const fs::path empty = dir / "empty";
  fs::create_directories(empty);
  CHECK_THROWS_AS(harness::cmd_report(empty.string(), out.string()), ValidationError);
}

TEST_CASE("cmd_grid: sweeps sigma and k over AHC cells") {
  const fs::path dir = scratch_dir("grid");
  const std::string digest = make_workspace(dir);
  // Single-optimizer manifest: the grid donor.
  nlohmann::json j = nlohmann::json::parse(make_manifest_text(digest));
  j["optimizers"] = nlohmann::json::array({{{"label", "AHC"},
                                            {"optimizer", "AHC"},
                                            {"batch_size", 8},
                                            {"budget", 15},
                                            {"record_interval", 10}}});
  j["replicates"] = 1;
  spit(dir / "manifest.json", j.dump(2));

  harness::GridOptions grid;
  grid.run.output_dir = (dir / "out").string();
  grid.run.threads = 2;
  grid.sigmas = {60.0, 120.0};
  grid.ks = {0.25, 1.0};
  const std::vector<harness::SummaryRow> rows =
      harness::cmd_grid((dir / "manifest.json").string(), grid);

  REQUIRE(rows.size() == 4);  // 2 sigmas × 2 ks × 1 replicate
  std::set<std::string> labels;
  for (const auto& row : rows) labels.insert(row.optimizer);
  CHECK(labels == std::set<std::string>{"AHC_s60_k0.25", "AHC_s60_k1", "AHC_s120_k0.25",
                                        "AHC_s120_k1"});

  std::istringstream grid_text(slurp(dir / "out" / "grid.csv"));
  std::string line;
  std::getline(grid_text, line);
  CHECK(line == "sigma,k,auc_plain,auc_filtered,auc_diverse,auc_combined,runs,failures");
  int cells = 0;
  while (std::getline(grid_text, line)) {
    if (line.empty()) continue;
    ++cells;
    std::istringstream fields(line);
    std::string sigma, k, plain, filtered, diverse, combined, runs, failures;
    std::getline(fields, sigma, ',');
    std::getline(fields, k, ',');
    std::getline(fields, plain, ',');
    std::getline(fields, filtered, ',');
    std::getline(fields, diverse, ',');
    std::getline(fields, combined, ',');
    std::getline(fields, runs, ',');
    std::getline(fields, failures, ',');
    CHECK(runs == "1");
    CHECK(failures == "0");
    // Each cell's mean over its single run is that run's summary value.
    const std::string label = "AHC_s" + sigma + "_k" + k;
    bool found = false;
    for (const auto& row : rows) {
      if (row.optimizer != label) continue;
      found = true;
      CHECK(std::stod(plain) == row.auc_plain);
    }
    CHECK(found);
  }
  CHECK(cells == 4);

  // Grid cells reproduce standalone runs: same master seed, task, label.
  {
    const policy::GruLM prior = policy::load_checkpoint((dir / "prior.ckpt").string());
    const oracle::Objective objective =
        oracle::Objective::from_json_file((dir / "objective.json").string());
    optimize::RunConfig cfg;
    cfg.optimizer = optimize::Optimizer::kAhc;
    cfg.sigma = 60.0;
    cfg.k_fraction = 1.0;
    cfg.batch_size = 8;
    cfg.budget = 15;
    cfg.record_interval = 10;
    cfg.objective = "const1";
    cfg.seed = harness::replicate_seed(7, "const1", "AHC_s60_k1", 1);
    const optimize::RunResult result = optimize::run_optimization(cfg, prior, objective);
    for (const auto& row : rows) {
      if (row.optimizer != "AHC_s60_k1") continue;
      CHECK(row.calls_used == static_cast<int>(result.log.size()));
      CHECK(row.stop_reason == result.stop_reason);
    }
  }
}

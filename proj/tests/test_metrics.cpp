//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "molopt/chem/canonical.hpp"
#include "molopt/chem/parser.hpp"
#include "molopt/metrics.hpp"
#include "support/reference_metrics.hpp"

using namespace molopt;
using metrics::ScoredMol;

namespace {

ScoredMol make_mol(std::string key, double score, int call,
                   std::vector<std::uint32_t> bits, bool pass = true) {
  ScoredMol m;
  m.canonical_key = std::move(key);
  m.score = score;
  m.first_call_index = call;
  m.fingerprint.width = 2048;
  m.fingerprint.bits = std::move(bits);
  m.verdict.pass = pass;
  if (!pass) m.verdict.reasons = {"mw_high"};
  return m;
}

// Random synthetic log: unique keys, random scores/fingerprints/verdicts.
std::vector<ScoredMol> random_log(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::uniform_int_distribution<int> nbits(1, 24);
  std::uniform_int_distribution<std::uint32_t> bit(0, 2047);
  std::bernoulli_distribution passes(0.7);
  std::vector<ScoredMol> mols;
  for (int i = 0; i < n; ++i) {
    std::vector<std::uint32_t> bits;
    const int k = nbits(rng);
    for (int b = 0; b < k; ++b) bits.push_back(bit(rng));
    std::sort(bits.begin(), bits.end());
    bits.erase(std::unique(bits.begin(), bits.end()), bits.end());
    mols.push_back(make_mol("K" + std::to_string(i), score(rng), i + 1, bits, passes(rng)));
  }
  return mols;
}

}  // namespace

TEST_CASE("top10_mean divides by exactly 10, zero-padding small pools") {
  CHECK(metrics::top10_mean({}) == 0.0);
  std::vector<ScoredMol> three = {
      make_mol("a", 0.5, 1, {1}),
      make_mol("b", 0.2, 2, {2}),
      make_mol("c", 0.9, 3, {3}),
  };
  CHECK(metrics::top10_mean(three) == doctest::Approx(0.16).epsilon(1e-15));

  std::vector<ScoredMol> twelve;
  for (int i = 0; i < 12; ++i) {
    twelve.push_back(make_mol(std::to_string(i), i < 2 ? 0.0 : 1.0, i + 1,
                              {static_cast<std::uint32_t>(i)}));
  }
  CHECK(metrics::top10_mean(twelve) == 1.0);  // ten 1.0s beat the two 0.0s
}

TEST_CASE("diverse_select greedily excludes near-duplicates") {
  // Ranked input; the second entry duplicates the first's fingerprint.
  std::vector<ScoredMol> ranked = {
      make_mol("best", 0.9, 1, {1, 2, 3}),
      make_mol("same_scaffold", 0.8, 2, {1, 2, 3}),  // tanimoto 1 with best
      make_mol("different", 0.7, 3, {100, 200}),
  };
  const auto sel = metrics::diverse_select(ranked);
  REQUIRE(sel.size() == 2);
  CHECK(sel[0].canonical_key == "best");
  CHECK(sel[1].canonical_key == "different");
}

TEST_CASE("diverse_select threshold is closed: exactly 0.35 still passes") {
  // |∩| = 7, |∪| = 20 → tanimoto 0.35 exactly.
  std::vector<std::uint32_t> a, b;
  for (std::uint32_t i = 0; i < 14; ++i) a.push_back(i);         // 14 bits
  for (std::uint32_t i = 7; i < 20; ++i) b.push_back(i);         // 13 bits, 7 shared
  REQUIRE(fp::tanimoto(fp::Fingerprint{2048, a}, fp::Fingerprint{2048, b}) == 0.35);
  std::vector<ScoredMol> ranked = {
      make_mol("first", 0.9, 1, a),
      make_mol("boundary", 0.8, 2, b),
  };
  CHECK(metrics::diverse_select(ranked).size() == 2);
}

TEST_CASE("diverse_select stops at k") {
  std::vector<ScoredMol> ranked;
  for (int i = 0; i < 30; ++i) {
    ranked.push_back(make_mol(std::to_string(i), 1.0 - i * 0.01, i + 1,
                              {static_cast<std::uint32_t>(i * 50)}));
  }
  CHECK(metrics::diverse_select(ranked).size() == 10);
  CHECK(metrics::diverse_select(ranked, 0.35, 3).size() == 3);
}

TEST_CASE("auc_series hand case with last-value hold") {
  const double auc = metrics::auc_series({1, 2, 3}, {0.1, 0.2, 0.3}, 5);
  // t=1 → 0.1, t=2 → 0.2, t=3..5 → 0.3.
  CHECK(auc == (0.1 * 1 + 0.2 * 1 + 0.3 * 3) / 5.0);
}

TEST_CASE("auc_series: calls before the first recording point contribute zero") {
  CHECK(metrics::auc_series({10}, {1.0}, 10) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(metrics::auc_series({}, {}, 100) == 0.0);
}

TEST_CASE("auc_series rejects inconsistent inputs") {
  using metrics::BudgetMismatch;
  CHECK_THROWS_AS((void)metrics::auc_series({1, 2}, {0.1}, 5), BudgetMismatch);
  CHECK_THROWS_AS((void)metrics::auc_series({2, 2}, {0.1, 0.2}, 5), BudgetMismatch);
  CHECK_THROWS_AS((void)metrics::auc_series({3, 2}, {0.1, 0.2}, 5), BudgetMismatch);
  CHECK_THROWS_AS((void)metrics::auc_series({0}, {0.1}, 5), BudgetMismatch);
  CHECK_THROWS_AS((void)metrics::auc_series({6}, {0.1}, 5), BudgetMismatch);
  CHECK_THROWS_AS((void)metrics::auc_series({1}, {0.1}, 0), BudgetMismatch);
}

TEST_CASE("the 100-call all-ones stream integrates to exactly 0.955") {
  std::vector<ScoredMol> mols;
  for (int i = 1; i <= 100; ++i) {
    mols.push_back(make_mol("K" + std::to_string(i), 1.0, i,
                            {static_cast<std::uint32_t>(i)}));
  }
  const auto report = metrics::compute_report(mols, 100, /*record_interval=*/1);
  CHECK(report.auc_plain == 0.955);
  CHECK(report.auc_filtered == 0.955);
}

TEST_CASE("compute_report: recording points are interval multiples plus the final call") {
  std::vector<ScoredMol> mols;
  for (int i = 1; i <= 23; ++i) {
    mols.push_back(make_mol("K" + std::to_string(i), 0.5, i,
                            {static_cast<std::uint32_t>(i)}));
  }
  const auto report = metrics::compute_report(mols, 50, 10);
  REQUIRE(report.series.size() == 3);
  CHECK(report.series[0].call_index == 10);
  CHECK(report.series[1].call_index == 20);
  CHECK(report.series[2].call_index == 23);
  CHECK(report.calls_used == 23);
  CHECK(report.budget == 50);
}

TEST_CASE("compute_report: calls_used_floor extends the axis past the last molecule") {
  std::vector<ScoredMol> mols = {make_mol("a", 1.0, 1, {1})};
  const auto plain = metrics::compute_report(mols, 100, 10);
  const auto floored = metrics::compute_report(mols, 100, 10, 60);
  CHECK(plain.calls_used == 1);
  CHECK(floored.calls_used == 60);
  // Without the floor the only (final) recording point is call 1, so the
  // 0.1 top-10 mean holds over the whole budget.  With the floor the grid
  // is the interval multiples 10..60, so calls 1..9 contribute zero.
  CHECK(plain.auc_plain == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(floored.auc_plain == doctest::Approx(0.1 * 91.0 / 100.0).epsilon(1e-12));
  CHECK(floored.series.back().call_index == 60);
}

TEST_CASE("zero budget with an empty log is an all-zero report") {
  const auto report = metrics::compute_report({}, 0);
  CHECK(report.auc_plain == 0.0);
  CHECK(report.auc_filtered == 0.0);
  CHECK(report.auc_diverse == 0.0);
  CHECK(report.auc_combined == 0.0);
  CHECK(report.series.empty());
  CHECK(report.calls_used == 0);

  std::vector<ScoredMol> mols = {make_mol("a", 1.0, 1, {1})};
  CHECK_THROWS_AS((void)metrics::compute_report(mols, 0), metrics::BudgetMismatch);
  CHECK_THROWS_AS((void)metrics::compute_report({}, -1), metrics::BudgetMismatch);
}

TEST_CASE("certificates list the canonical keys behind the final values") {
  std::vector<ScoredMol> mols = {
      make_mol("low", 0.1, 1, {1}),
      make_mol("high", 0.9, 2, {2}),
      make_mol("blocked", 0.8, 3, {3}, /*pass=*/false),
  };
  const auto report = metrics::compute_report(mols, 10, 100);
  REQUIRE(report.plain_top.size() == 3);
  CHECK(report.plain_top[0] == "high");
  CHECK(report.plain_top[1] == "blocked");
  CHECK(report.plain_top[2] == "low");
  REQUIRE(report.filtered_top.size() == 2);
  CHECK(report.filtered_top[0] == "high");
  CHECK(report.filtered_top[1] == "low");
  CHECK(!report.diverse_selected.empty());
  CHECK(!report.combined_selected.empty());
}

TEST_CASE("pool orderings that are theorems hold on random synthetic logs") {
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 150);
    const auto mols = random_log(rng, n);
    const int budget = n + static_cast<int>(rng() % 50);
    const auto report = metrics::compute_report(mols, budget, 10);
    // Removing candidates (filtering) or constraining the pick (diversity)
    // can only lower a zero-padded top-10 mean.
    REQUIRE(report.auc_filtered <= report.auc_plain);
    REQUIRE(report.auc_diverse <= report.auc_plain);
    REQUIRE(report.auc_combined <= report.auc_filtered);
    for (const auto& pt : report.series) {
      REQUIRE(pt.filtered <= pt.plain);
      REQUIRE(pt.diverse <= pt.plain);
      REQUIRE(pt.combined <= pt.filtered);
    }
  }
}

TEST_CASE("production metrics match the naive evaluator bitwise on random logs") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 120);
    const auto mols = random_log(rng, n);
    const int budget = n + static_cast<int>(rng() % 30);
    const int interval = 1 + static_cast<int>(rng() % 25);
    const auto report = metrics::compute_report(mols, budget, interval);
    const auto naive = refmetrics::naive_aucs(mols, budget, interval);
    REQUIRE(report.auc_plain == naive.plain);
    REQUIRE(report.auc_filtered == naive.filtered);
    REQUIRE(report.auc_diverse == naive.diverse);
    REQUIRE(report.auc_combined == naive.combined);
  }
}

TEST_CASE("report JSON round-trips through load_report") {
  std::mt19937_64 rng(31337);
  const auto mols = random_log(rng, 60);
  const auto report = metrics::compute_report(mols, 80, 15);
  const std::string path =
      (std::filesystem::temp_directory_path() / "molopt_report_roundtrip.json").string();
  metrics::save_report(report, path);
  const auto loaded = metrics::load_report(path);
  CHECK(loaded.auc_plain == report.auc_plain);
  CHECK(loaded.auc_filtered == report.auc_filtered);
  CHECK(loaded.auc_diverse == report.auc_diverse);
  CHECK(loaded.auc_combined == report.auc_combined);
  CHECK(loaded.calls_used == report.calls_used);
  CHECK(loaded.budget == report.budget);
  REQUIRE(loaded.series.size() == report.series.size());
  for (std::size_t i = 0; i < loaded.series.size(); ++i) {
    CHECK(loaded.series[i].call_index == report.series[i].call_index);
    CHECK(loaded.series[i].plain == report.series[i].plain);
    CHECK(loaded.series[i].combined == report.series[i].combined);
  }
  CHECK(loaded.plain_top == report.plain_top);
  CHECK(loaded.filtered_top == report.filtered_top);
  CHECK(loaded.diverse_selected == report.diverse_selected);
  CHECK(loaded.combined_selected == report.combined_selected);
  std::remove(path.c_str());
}

TEST_CASE("compute_all materializes an oracle log, skipping charged invalids") {
  const refstats::ReferenceStats stats = refstats::build_stats_from_lines(
      {"CCO", "CCN", "CCC", "CCCC", "c1ccccc1"}, "0123456789abcdef");

  std::vector<oracle::OracleRecord> log;
  const auto add = [&](const std::string& key, double score) {
    oracle::OracleRecord r;
    r.call_index = static_cast<int>(log.size()) + 1;
    r.key = key;
    r.score = score;
    log.push_back(r);
  };
  add(chem::canonical_key(chem::parse_smiles("CCO")), 0.8);
  add("((garbage that was charged", 0.0);
  add(chem::canonical_key(chem::parse_smiles("CCN")), 0.6);

  const auto report = metrics::compute_all(log, stats, 10, 5);
  CHECK(report.calls_used == 3);  // the invalid record still advances the axis
  // Only the two real molecules enter the pools.
  CHECK(report.plain_top.size() == 2);
  CHECK(report.series.back().plain == doctest::Approx(1.4 / 10.0).epsilon(1e-15));
}

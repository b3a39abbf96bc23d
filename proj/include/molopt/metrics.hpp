//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <string>
#include <vector>

#include "molopt/fingerprint.hpp"
#include "molopt/oracle.hpp"
#include "molopt/refstats.hpp"

namespace molopt::metrics {

struct BudgetMismatch : ValidationError {
  using ValidationError::ValidationError;
};

// One unique molecule of a run, with everything the four metrics consume.
struct ScoredMol {
  std::string canonical_key;
  double score = 0.0;        // oracle score, in [0, 1]
  int first_call_index = 0;  // 1-based call that paid for it
  fp::Fingerprint fingerprint;
  double mw = 0.0;
  double logp = 0.0;
  refstats::FilterVerdict verdict;
};

// Sum of the 10 highest scores divided by exactly 10 (zero-padding below 10
// candidates); empty pool gives 0.  The pool must be deduplicated.
double top10_mean(const std::vector<ScoredMol>& pool);

// Greedy diverse subset of a list ranked by (score desc, first_call asc):
// accept the first entry, then each candidate whose Tanimoto similarity to
// every accepted one is ≤ threshold (0.35 itself passes), until k accepted.
std::vector<ScoredMol> diverse_select(const std::vector<ScoredMol>& ranked,
                                      double threshold = 0.35, int k = 10);

// Piecewise-constant AUC over calls 1..budget: value(t) is the series value
// at the most recent recording point ≤ t (0 before the first); the last value
// holds through the budget on early stops.  AUC = (1/budget)·Σ_t value(t).
// Throws BudgetMismatch if points/values disagree, points are not strictly
// increasing 1-based indices, or the last point exceeds the budget.
double auc_series(const std::vector<int>& points, const std::vector<double>& values,
                  int budget);

struct MetricPoint {
  int call_index = 0;
  double plain = 0.0;
  double filtered = 0.0;
  double diverse = 0.0;
  double combined = 0.0;
};

struct MetricReport {
  double auc_plain = 0.0;
  double auc_filtered = 0.0;
  double auc_diverse = 0.0;
  double auc_combined = 0.0;
  std::vector<MetricPoint> series;  // one entry per recording point
  int calls_used = 0;
  int budget = 0;
  // Certificates: the canonical keys behind each metric's final-point value.
  std::vector<std::string> plain_top;
  std::vector<std::string> filtered_top;
  std::vector<std::string> diverse_selected;
  std::vector<std::string> combined_selected;
};

// Core evaluation over materialized molecules (unique keys, any provenance):
// recording points are the multiples of record_interval up to the last call
// index plus a mandatory final point; at each point the four pools are formed
// from the molecules seen so far — plain, filter-passing, greedy-diverse over
// each — and each series is integrated with auc_series.  `calls_used_floor`
// extends the call axis past the last molecule, for logs whose trailing
// budget went to charged-but-invalid strings.  A zero budget is legal when
// the log is empty and yields an all-zero report.
MetricReport compute_report(const std::vector<ScoredMol>& mols, int budget,
                            int record_interval = 100, int calls_used_floor = 0);

// Convenience overload that materializes ScoredMols from an oracle log:
// every key is parsed and fingerprinted/filtered against `stats`.  Records
// whose key does not parse (budget charged to an invalid string) contribute
// nothing to any pool but still advance calls_used.
MetricReport compute_all(const std::vector<oracle::OracleRecord>& log,
                         const refstats::ReferenceStats& stats, int budget,
                         int record_interval = 100);

std::string report_json(const MetricReport& report);
void save_report(const MetricReport& report, const std::string& path);
MetricReport load_report(const std::string& path);  // inverse of save_report

}  // namespace molopt::metrics

//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "molopt/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "molopt/chem/canonical.hpp"
#include "molopt/chem/parser.hpp"
#include "molopt/descriptors.hpp"
#include <json.hpp>

namespace molopt::metrics {

namespace {
using nlohmann::json;

// Indices of `mols` ordered by (score desc, first_call asc).
std::vector<int> ranked_order(const std::vector<ScoredMol>& mols) {
  std::vector<int> order(mols.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& x = mols[static_cast<std::size_t>(a)];
    const auto& y = mols[static_cast<std::size_t>(b)];
    if (x.score != y.score) return x.score > y.score;
    return x.first_call_index < y.first_call_index;
  });
  return order;
}

double zero_padded_mean(double sum) { return sum / 10.0; }

}  // namespace

double top10_mean(const std::vector<ScoredMol>& pool) {
  std::vector<double> scores;
  scores.reserve(pool.size());
  for (const auto& m : pool) scores.push_back(m.score);
  const std::size_t k = std::min<std::size_t>(10, scores.size());
  std::partial_sort(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(k),
                    scores.end(), std::greater<double>());
  return zero_padded_mean(std::accumulate(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(k), 0.0));
}

std::vector<ScoredMol> diverse_select(const std::vector<ScoredMol>& ranked,
                                      double threshold, int k) {
  std::vector<ScoredMol> selected;
  for (const auto& cand : ranked) {
    if (static_cast<int>(selected.size()) >= k) break;
    bool ok = true;
    for (const auto& s : selected) {
      if (fp::tanimoto(cand.fingerprint, s.fingerprint) > threshold) {
        ok = false;
        break;
      }
    }
    if (ok) selected.push_back(cand);
  }
  return selected;
}

double auc_series(const std::vector<int>& points, const std::vector<double>& values,
                  int budget) {
  if (budget < 1) throw BudgetMismatch("auc_series: budget must be at least 1");
  if (points.size() != values.size()) {
    throw BudgetMismatch("auc_series: recording points and values differ in length");
  }
  if (points.empty()) return 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] < 1 || (i > 0 && points[i] <= points[i - 1])) {
      throw BudgetMismatch("auc_series: recording points must be strictly increasing and ≥ 1");
    }
  }
  if (points.back() > budget) {
    throw BudgetMismatch("auc_series: last recording point exceeds the budget");
  }
  // value(t) is constant between points: each value spans until the call
  // before the next point, the last one through the budget.
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int until = i + 1 < points.size() ? points[i + 1] - 1 : budget;
    sum += values[i] * static_cast<double>(until - points[i] + 1);
  }
  return sum / static_cast<double>(budget);
}

MetricReport compute_report(const std::vector<ScoredMol>& mols, int budget,
                            int record_interval, int calls_used_floor) {
  if (record_interval < 1) throw ValidationError("record_interval must be at least 1");
  MetricReport report;
  report.budget = budget;
  report.calls_used = std::max(calls_used_floor, 0);
  for (const auto& m : mols) report.calls_used = std::max(report.calls_used, m.first_call_index);
  if (budget < 0) throw BudgetMismatch("compute_report: budget must be nonnegative");
  if (budget == 0) {
    // Degenerate but legal: a run that never got to call the oracle has an
    // empty series and all four AUCs exactly 0.
    if (report.calls_used > 0) {
      throw BudgetMismatch("compute_report: calls recorded against a zero budget");
    }
    return report;
  }

  std::vector<int> points;
  for (int p = record_interval; p <= report.calls_used; p += record_interval) points.push_back(p);
  if (report.calls_used > 0 && (points.empty() || points.back() != report.calls_used)) {
    points.push_back(report.calls_used);
  }

  const std::vector<int> order = ranked_order(mols);
  std::vector<double> plain_v, filtered_v, diverse_v, combined_v;
  std::vector<ScoredMol> plain_ranked, filtered_ranked;
  plain_ranked.reserve(mols.size());
  filtered_ranked.reserve(mols.size());

  for (const int p : points) {
    plain_ranked.clear();
    filtered_ranked.clear();
    for (const int i : order) {
      const auto& m = mols[static_cast<std::size_t>(i)];
      if (m.first_call_index > p) continue;
      plain_ranked.push_back(m);
      if (m.verdict.pass) filtered_ranked.push_back(m);
    }
    double plain_sum = 0.0, filtered_sum = 0.0;
    for (std::size_t i = 0; i < std::min<std::size_t>(10, plain_ranked.size()); ++i) {
      plain_sum += plain_ranked[i].score;
    }
    for (std::size_t i = 0; i < std::min<std::size_t>(10, filtered_ranked.size()); ++i) {
      filtered_sum += filtered_ranked[i].score;
    }
    const std::vector<ScoredMol> div = diverse_select(plain_ranked);
    const std::vector<ScoredMol> comb = diverse_select(filtered_ranked);
    double diverse_sum = 0.0, combined_sum = 0.0;
    for (const auto& m : div) diverse_sum += m.score;
    for (const auto& m : comb) combined_sum += m.score;

    MetricPoint pt;
    pt.call_index = p;
    pt.plain = zero_padded_mean(plain_sum);
    pt.filtered = zero_padded_mean(filtered_sum);
    pt.diverse = zero_padded_mean(diverse_sum);
    pt.combined = zero_padded_mean(combined_sum);
    report.series.push_back(pt);
    plain_v.push_back(pt.plain);
    filtered_v.push_back(pt.filtered);
    diverse_v.push_back(pt.diverse);
    combined_v.push_back(pt.combined);

    if (p == points.back()) {
      for (std::size_t i = 0; i < std::min<std::size_t>(10, plain_ranked.size()); ++i) {
        report.plain_top.push_back(plain_ranked[i].canonical_key);
      }
      for (std::size_t i = 0; i < std::min<std::size_t>(10, filtered_ranked.size()); ++i) {
        report.filtered_top.push_back(filtered_ranked[i].canonical_key);
      }
      for (const auto& m : div) report.diverse_selected.push_back(m.canonical_key);
      for (const auto& m : comb) report.combined_selected.push_back(m.canonical_key);
    }
  }

  report.auc_plain = auc_series(points, plain_v, budget);
  report.auc_filtered = auc_series(points, filtered_v, budget);
  report.auc_diverse = auc_series(points, diverse_v, budget);
  report.auc_combined = auc_series(points, combined_v, budget);
  return report;
}

MetricReport compute_all(const std::vector<oracle::OracleRecord>& log,
                         const refstats::ReferenceStats& stats, int budget,
                         int record_interval) {
  std::vector<ScoredMol> mols;
  mols.reserve(log.size());
  int calls_used = 0;
  for (const auto& rec : log) {
    calls_used = std::max(calls_used, rec.call_index);
    chem::Molecule mol;
    try {
      mol = chem::parse_smiles(rec.key);
    } catch (const chem::ParseError&) {
      continue;  // charged invalid string: consumes the call, scores nothing
    }
    ScoredMol sm;
    sm.canonical_key = rec.key;
    sm.score = rec.score;
    sm.first_call_index = rec.call_index;
    sm.fingerprint = fp::ecfp(mol, stats.fp_radius, stats.fp_width);
    sm.mw = desc::mol_weight(mol);
    sm.logp = desc::crippen_logp(mol);
    sm.verdict = refstats::property_filter(mol, stats);
    mols.push_back(std::move(sm));
  }
  return compute_report(mols, budget, record_interval, calls_used);
}

std::string report_json(const MetricReport& report) {
  json j;
  j["auc_plain"] = report.auc_plain;
  j["auc_filtered"] = report.auc_filtered;
  j["auc_diverse"] = report.auc_diverse;
  j["auc_combined"] = report.auc_combined;
  j["calls_used"] = report.calls_used;
  j["budget"] = report.budget;
  json series = json::array();
  for (const auto& pt : report.series) {
    series.push_back({{"call_index", pt.call_index},
                      {"plain", pt.plain},
                      {"filtered", pt.filtered},
                      {"diverse", pt.diverse},
                      {"combined", pt.combined}});
  }
  j["series"] = series;
  j["certificates"] = {{"plain_top", report.plain_top},
                       {"filtered_top", report.filtered_top},
                       {"diverse_selected", report.diverse_selected},
                       {"combined_selected", report.combined_selected}};
  return j.dump(2);
}

void save_report(const MetricReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoFailure("cannot open report for writing: " + path);
  out << report_json(report) << "\n";
  if (!out) throw IoFailure("failed writing report: " + path);
}

MetricReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open report: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path + ": malformed report JSON: " + e.what());
  }
  MetricReport report;
  try {
    report.auc_plain = j.at("auc_plain").get<double>();
    report.auc_filtered = j.at("auc_filtered").get<double>();
    report.auc_diverse = j.at("auc_diverse").get<double>();
    report.auc_combined = j.at("auc_combined").get<double>();
    report.calls_used = j.at("calls_used").get<int>();
    report.budget = j.at("budget").get<int>();
    for (const auto& pj : j.at("series")) {
      MetricPoint pt;
      pt.call_index = pj.at("call_index").get<int>();
      pt.plain = pj.at("plain").get<double>();
      pt.filtered = pj.at("filtered").get<double>();
      pt.diverse = pj.at("diverse").get<double>();
      pt.combined = pj.at("combined").get<double>();
      report.series.push_back(pt);
    }
    const auto& certs = j.at("certificates");
    report.plain_top = certs.at("plain_top").get<std::vector<std::string>>();
    report.filtered_top = certs.at("filtered_top").get<std::vector<std::string>>();
    report.diverse_selected = certs.at("diverse_selected").get<std::vector<std::string>>();
    report.combined_selected = certs.at("combined_selected").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ValidationError(path + ": report JSON missing fields: " + e.what());
  }
  return report;
}

}  // namespace molopt::metrics

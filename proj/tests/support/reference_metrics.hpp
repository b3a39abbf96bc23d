//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
// Deliberately naive re-implementation of the four run metrics, used to
// cross-check the production evaluator.  Everything here is recomputed from
// scratch at every recording point — full re-sorts, greedy selection restarted
// from nothing, AUC by literally summing one term per oracle call — so the
// only thing it shares with src/metrics is the definition.
#pragma once

#include <algorithm>
#include <vector>

#include "molopt/metrics.hpp"

namespace refmetrics {

using molopt::fp::tanimoto;
using molopt::metrics::MetricReport;
using molopt::metrics::ScoredMol;

inline double naive_top10(std::vector<ScoredMol> pool) {
  std::stable_sort(pool.begin(), pool.end(), [](const ScoredMol& a, const ScoredMol& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.first_call_index < b.first_call_index;
  });
  double sum = 0.0;
  for (std::size_t i = 0; i < pool.size() && i < 10; ++i) sum += pool[i].score;
  return sum / 10.0;
}

inline std::vector<ScoredMol> naive_diverse(std::vector<ScoredMol> pool,
                                            double threshold = 0.35, int k = 10) {
  std::stable_sort(pool.begin(), pool.end(), [](const ScoredMol& a, const ScoredMol& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.first_call_index < b.first_call_index;
  });
  std::vector<ScoredMol> picked;
  for (const auto& cand : pool) {
    if (static_cast<int>(picked.size()) >= k) break;
    bool ok = true;
    for (const auto& have : picked) {
      if (tanimoto(cand.fingerprint, have.fingerprint) > threshold) {
        ok = false;
        break;
      }
    }
    if (ok) picked.push_back(cand);
  }
  return picked;
}

inline double naive_top10_of(const std::vector<ScoredMol>& picked) {
  double sum = 0.0;
  for (std::size_t i = 0; i < picked.size() && i < 10; ++i) sum += picked[i].score;
  return sum / 10.0;
}

// The four metric values of one pool, from first principles.
struct PoolValues {
  double plain = 0.0;
  double filtered = 0.0;
  double diverse = 0.0;
  double combined = 0.0;
};

inline PoolValues naive_pool_values(const std::vector<ScoredMol>& pool) {
  std::vector<ScoredMol> passing;
  for (const auto& m : pool) {
    if (m.verdict.pass) passing.push_back(m);
  }
  PoolValues v;
  v.plain = naive_top10(pool);
  v.filtered = naive_top10(passing);
  v.diverse = naive_top10_of(naive_diverse(pool));
  v.combined = naive_top10_of(naive_diverse(passing));
  return v;
}

// Per-call AUC: the value at call t is the value of the most recent recording
// point ≤ t (0 before the first).  Summed literally over t = 1..budget.
struct NaiveAucs {
  double plain = 0.0;
  double filtered = 0.0;
  double diverse = 0.0;
  double combined = 0.0;
};

inline NaiveAucs naive_aucs(const std::vector<ScoredMol>& mols, int budget,
                            int record_interval, int calls_used_floor = 0) {
  int calls_used = calls_used_floor;
  for (const auto& m : mols) calls_used = std::max(calls_used, m.first_call_index);

  std::vector<int> points;
  for (int p = record_interval; p <= calls_used; p += record_interval) points.push_back(p);
  if (calls_used > 0 && (points.empty() || points.back() != calls_used)) {
    points.push_back(calls_used);
  }

  std::vector<PoolValues> at_point;
  for (const int p : points) {
    std::vector<ScoredMol> pool;
    for (const auto& m : mols) {
      if (m.first_call_index <= p) pool.push_back(m);
    }
    at_point.push_back(naive_pool_values(pool));
  }

  // Walk every call index 1..budget and count, per recording point, how many
  // calls it is the holding value for.  The per-call walk is the exhaustive
  // part; the final value×count products keep the float arithmetic in the
  // same associativity class as a closed-form integrator so the comparison
  // can demand bitwise equality.
  std::vector<long> held_calls(points.size(), 0);
  for (int t = 1; t <= budget; ++t) {
    int last = -1;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i] <= t) last = static_cast<int>(i);
    }
    if (last >= 0) ++held_calls[static_cast<std::size_t>(last)];
  }

  NaiveAucs auc;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double n = static_cast<double>(held_calls[i]);
    auc.plain += at_point[i].plain * n;
    auc.filtered += at_point[i].filtered * n;
    auc.diverse += at_point[i].diverse * n;
    auc.combined += at_point[i].combined * n;
  }
  auc.plain /= budget;
  auc.filtered /= budget;
  auc.diverse /= budget;
  auc.combined /= budget;
  return auc;
}

}  // namespace refmetrics

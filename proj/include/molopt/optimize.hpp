//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "molopt/oracle.hpp"
#include "molopt/policy/model.hpp"

namespace molopt::optimize {

enum class Optimizer { kAhc, kReinvent, kHc, kRandom };
const char* to_string(Optimizer opt);
Optimizer optimizer_from_string(const std::string& name);  // throws ValidationError

// Knobs of one optimization run.  Defaults are the AHC settings; REINVENT
// conventionally runs with sigma 500 and k_fraction 1, AHC* with sigma 60.
struct RunConfig {
  Optimizer optimizer = Optimizer::kAhc;
  double sigma = 120.0;          // reward coefficient
  double k_fraction = 0.25;      // top fraction kept for the update, (0, 1]
  int batch_size = 256;          // samples per step
  int budget = 10000;            // unique oracle evaluations allowed
  int patience = 5;              // no-improvement boundaries before stopping
  double improvement_eps = 1e-3;
  std::uint64_t seed = 0;
  std::string objective;         // objective name, resolved by the caller
  int record_interval = 100;     // patience checkpoints, in oracle calls
  double lr = 5e-4;              // agent Adam learning rate
  bool charge_invalid = false;   // unparseable samples consume budget (score 0)

  void validate() const;  // throws ValidationError
  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_json_file(const std::string& path);
  std::string to_json_text() const;
};

// One batch sampled from the agent and pushed through the oracle in sample
// order.  Invalid strings score 0; by default they cost nothing, with
// `charge_invalid` each one consumes a budget call.  If the budget runs dry
// mid-batch, `scored` marks the prefix that got scores and the remainder is
// discarded unscored.
struct ScoredBatch {
  std::vector<policy::GruLM::Sample> samples;
  std::vector<std::string> smiles;  // decoded strings, index-aligned
  std::vector<double> scores;
  std::vector<char> valid;
  int scored = 0;
  bool exhausted = false;
  int new_calls = 0;  // budget consumed by this batch
};
ScoredBatch sample_and_score(const policy::GruLM& agent, oracle::BudgetedOracle& orc,
                             int batch_size, std::mt19937_64& rng,
                             bool charge_invalid = false);

// Indices of the top ⌈k_fraction·n⌉ of scores[0..n), ranked by score
// descending with ties broken by sample order.
std::vector<int> rank_kept(const std::vector<double>& scores, int n, double k_fraction);

struct StepResult {
  double loss = 0.0;
  bool updated = false;
  bool exhausted = false;
  int new_calls = 0;
  ScoredBatch batch;
  std::vector<int> kept;
};

// Augmented Hill-Climb step: sample, score, keep the top fraction, and take
// one Adam step on the squared augmented-likelihood gap
//   mean over kept x of (logP_prior(x) + sigma·score(x) − logP_agent(x))².
// The prior stays frozen.  With k_fraction = 1 this is exactly a
// REINVENT-style full-batch step.
StepResult ahc_step(policy::GruLM& agent, const policy::GruLM& prior,
                    policy::Adam& opt, oracle::BudgetedOracle& orc,
                    const RunConfig& cfg, std::mt19937_64& rng);

// Plain hill-climb step: one Adam step on the mean NLL of the kept samples
// (no prior, no reward shaping).  A batch with no valid molecule skips the
// update entirely.
StepResult hc_step(policy::GruLM& agent, policy::Adam& opt,
                   oracle::BudgetedOracle& orc, const RunConfig& cfg,
                   std::mt19937_64& rng);

struct RunResult {
  std::vector<oracle::OracleRecord> log;
  std::string stop_reason;  // "budget" | "patience" | "completed"
  int steps_taken = 0;
  std::string final_model_digest;
};

// Full budgeted loop: steps until the budget is spent, the plain top-10 mean
// stops improving for `patience` record-interval boundaries, or the policy
// stops producing new molecules for `patience` consecutive steps ("completed").
RunResult run_optimization(const RunConfig& cfg, const policy::GruLM& prior,
                           const oracle::Objective& objective);

}  // namespace molopt::optimize

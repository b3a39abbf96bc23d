//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "molopt/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "molopt/chem/canonical.hpp"
#include "molopt/chem/parser.hpp"
#include <json.hpp>

namespace molopt::optimize {

namespace {
using nlohmann::json;
using policy::GruLM;
constexpr int kMaxSampleLen = 100;
}  // namespace

const char* to_string(Optimizer opt) {
  switch (opt) {
    case Optimizer::kAhc: return "AHC";
    case Optimizer::kReinvent: return "REINVENT";
    case Optimizer::kHc: return "HC";
    case Optimizer::kRandom: return "RANDOM";
  }
  return "?";
}

Optimizer optimizer_from_string(const std::string& name) {
  if (name == "AHC") return Optimizer::kAhc;
  if (name == "REINVENT") return Optimizer::kReinvent;
  if (name == "HC") return Optimizer::kHc;
  if (name == "RANDOM") return Optimizer::kRandom;
  throw ValidationError("unknown optimizer: " + name +
                        " (expected AHC, REINVENT, HC, or RANDOM)");
}

void RunConfig::validate() const {
  if (!(k_fraction > 0.0 && k_fraction <= 1.0)) {
    throw ValidationError("k_fraction must be in (0, 1]");
  }
  if (sigma < 0.0) throw ValidationError("sigma must be non-negative");
  if (batch_size < 1) throw ValidationError("batch_size must be at least 1");
  // A zero budget is legal and degenerate: the run stops before its first
  // batch and every AUC is 0.
  if (budget < 0) throw ValidationError("budget must be nonnegative");
  if (patience < 1) throw ValidationError("patience must be at least 1");
  if (improvement_eps < 0.0) throw ValidationError("improvement_eps must be non-negative");
  if (record_interval < 1) throw ValidationError("record_interval must be at least 1");
  if (!(lr > 0.0)) throw ValidationError("lr must be positive");
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed run config: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("run config must be a JSON object");
  RunConfig cfg;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "optimizer") cfg.optimizer = optimizer_from_string(value.get<std::string>());
      else if (key == "sigma") cfg.sigma = value.get<double>();
      else if (key == "k_fraction") cfg.k_fraction = value.get<double>();
      else if (key == "batch_size") cfg.batch_size = value.get<int>();
      else if (key == "budget") cfg.budget = value.get<int>();
      else if (key == "patience") cfg.patience = value.get<int>();
      else if (key == "improvement_eps") cfg.improvement_eps = value.get<double>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "objective") cfg.objective = value.get<std::string>();
      else if (key == "record_interval") cfg.record_interval = value.get<int>();
      else if (key == "lr") cfg.lr = value.get<double>();
      else if (key == "charge_invalid") cfg.charge_invalid = value.get<bool>();
      else throw ValidationError("unknown run config key: " + key);
    } catch (const json::exception& e) {
      throw ValidationError("bad value for run config key '" + key + "': " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open run config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string RunConfig::to_json_text() const {
  json j;
  j["optimizer"] = to_string(optimizer);
  j["sigma"] = sigma;
  j["k_fraction"] = k_fraction;
  j["batch_size"] = batch_size;
  j["budget"] = budget;
  j["patience"] = patience;
  j["improvement_eps"] = improvement_eps;
  j["seed"] = seed;
  j["objective"] = objective;
  j["record_interval"] = record_interval;
  j["lr"] = lr;
  j["charge_invalid"] = charge_invalid;
  return j.dump(2);
}

ScoredBatch sample_and_score(const GruLM& agent, oracle::BudgetedOracle& orc,
                             int batch_size, std::mt19937_64& rng, bool charge_invalid) {
  ScoredBatch out;
  out.samples.reserve(static_cast<std::size_t>(batch_size));
  for (int i = 0; i < batch_size; ++i) out.samples.push_back(agent.sample(rng, kMaxSampleLen));
  out.smiles.resize(out.samples.size());
  out.scores.assign(out.samples.size(), 0.0);
  out.valid.assign(out.samples.size(), 0);

  const int before = orc.calls_used();
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.smiles[i] = agent.vocab().decode(out.samples[i].tokens);
    chem::Molecule mol;
    try {
      mol = chem::parse_smiles(out.smiles[i]);
    } catch (const chem::ParseError&) {
      if (charge_invalid) {
        if (orc.exhausted()) {
          out.exhausted = true;
          break;
        }
        orc.charge_invalid(out.smiles[i]);
      }
      ++out.scored;  // invalid: scored 0, charged only when asked to
      continue;
    }
    try {
      out.scores[i] = orc.evaluate(chem::canonical_key(mol), mol);
      out.valid[i] = 1;
      ++out.scored;
    } catch (const oracle::BudgetExhausted&) {
      out.exhausted = true;  // remainder of the batch stays unscored
      break;
    }
  }
  out.new_calls = orc.calls_used() - before;
  return out;
}

std::vector<int> rank_kept(const std::vector<double>& scores, int n, double k_fraction) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
  });
  const int keep = std::min(n, static_cast<int>(std::ceil(k_fraction * n)));
  order.resize(static_cast<std::size_t>(std::max(0, keep)));
  return order;
}

namespace {

// Shared scaffolding for AHC/REINVENT/HC updates: builds the NLL graph over
// the kept sequences and takes one Adam step on `loss_node(graph)`.
template <typename LossBuilder>
void update_on_kept(GruLM& agent, policy::Adam& opt,
                    const std::vector<std::vector<int>>& kept_seqs,
                    LossBuilder&& build_loss, StepResult& result) {
  policy::Gradients grads;
  policy::NllGraph graph;
  policy::build_nll_graph(agent, grads, kept_seqs, graph);
  const int loss = build_loss(graph);
  result.loss = graph.tape.scalar(loss);
  graph.tape.backward(loss);
  opt.step(agent.params(), grads.g);
  result.updated = true;
}

StepResult step_common(GruLM& agent, const GruLM* prior, policy::Adam& opt,
                       oracle::BudgetedOracle& orc, const RunConfig& cfg,
                       double k_fraction, std::mt19937_64& rng) {
  StepResult result;
  result.batch = sample_and_score(agent, orc, cfg.batch_size, rng, cfg.charge_invalid);
  result.exhausted = result.batch.exhausted;
  result.new_calls = result.batch.new_calls;
  result.kept = rank_kept(result.batch.scores, result.batch.scored, k_fraction);
  if (result.kept.empty()) return result;

  if (prior == nullptr) {
    // Plain hill-climb: fine-tune on the kept samples; a batch with no valid
    // molecule offers nothing worth reinforcing.
    bool any_valid = false;
    for (int i : result.kept) any_valid |= result.batch.valid[static_cast<std::size_t>(i)] != 0;
    if (!any_valid) return result;
  }

  std::vector<std::vector<int>> kept_seqs;
  kept_seqs.reserve(result.kept.size());
  for (int i : result.kept) kept_seqs.push_back(result.batch.samples[static_cast<std::size_t>(i)].tokens);

  if (prior == nullptr) {
    update_on_kept(agent, opt, kept_seqs, [](policy::NllGraph& g) {
      return g.tape.mean_all(g.per_seq);
    }, result);
    return result;
  }

  // Augmented likelihood target: logP_prior + sigma·score.  With
  // logP_agent = −per_seq, the squared gap is (per_seq + c)².
  const std::vector<double> prior_nll = prior->nll_batch(kept_seqs);
  policy::Mat c(static_cast<Eigen::Index>(kept_seqs.size()), 1);
  for (std::size_t i = 0; i < kept_seqs.size(); ++i) {
    const int idx = result.kept[i];
    c(static_cast<Eigen::Index>(i), 0) =
        -prior_nll[i] + cfg.sigma * result.batch.scores[static_cast<std::size_t>(idx)];
  }
  update_on_kept(agent, opt, kept_seqs, [&](policy::NllGraph& g) {
    const int d = g.tape.add(g.per_seq, g.tape.constant(c));
    return g.tape.mean_all(g.tape.mul(d, d));
  }, result);
  return result;
}

}  // namespace

StepResult ahc_step(GruLM& agent, const GruLM& prior, policy::Adam& opt,
                    oracle::BudgetedOracle& orc, const RunConfig& cfg,
                    std::mt19937_64& rng) {
  return step_common(agent, &prior, opt, orc, cfg, cfg.k_fraction, rng);
}

StepResult hc_step(GruLM& agent, policy::Adam& opt, oracle::BudgetedOracle& orc,
                   const RunConfig& cfg, std::mt19937_64& rng) {
  return step_common(agent, nullptr, opt, orc, cfg, cfg.k_fraction, rng);
}

RunResult run_optimization(const RunConfig& cfg, const GruLM& prior,
                           const oracle::Objective& objective) {
  cfg.validate();
  GruLM agent = prior.clone();
  policy::Adam opt(cfg.lr);
  oracle::BudgetedOracle orc(objective, cfg.budget);
  std::mt19937_64 rng(cfg.seed);

  RunResult result;
  // Patience bookkeeping: the plain top-10 mean of the log prefix at each
  // record_interval boundary, evaluated in order as calls accumulate.
  std::multiset<double> top10;
  std::size_t consumed = 0;  // log records folded into top10 so far
  int next_boundary = cfg.record_interval;
  double best = -std::numeric_limits<double>::infinity();
  int no_improve = 0;
  int idle_steps = 0;  // consecutive steps with zero new oracle calls
  bool stop = false;

  while (!stop) {
    if (orc.exhausted()) {
      result.stop_reason = "budget";
      break;
    }
    StepResult step;
    switch (cfg.optimizer) {
      case Optimizer::kAhc:
        step = ahc_step(agent, prior, opt, orc, cfg, rng);
        break;
      case Optimizer::kReinvent:
        step = step_common(agent, &prior, opt, orc, cfg, /*k_fraction=*/1.0, rng);
        break;
      case Optimizer::kHc:
        step = hc_step(agent, opt, orc, cfg, rng);
        break;
      case Optimizer::kRandom:
        step = StepResult{};
        step.batch = sample_and_score(agent, orc, cfg.batch_size, rng, cfg.charge_invalid);
        step.exhausted = step.batch.exhausted;
        step.new_calls = step.batch.new_calls;
        break;
    }
    ++result.steps_taken;

    // Evaluate every record-interval boundary this step crossed.
    while (orc.calls_used() >= next_boundary && !stop) {
      while (consumed < static_cast<std::size_t>(next_boundary)) {
        top10.insert(orc.log()[consumed].score);
        if (top10.size() > 10) top10.erase(top10.begin());
        ++consumed;
      }
      double mean = std::accumulate(top10.begin(), top10.end(), 0.0) / 10.0;
      if (mean > best + cfg.improvement_eps) {
        best = mean;
        no_improve = 0;
      } else if (++no_improve >= cfg.patience) {
        result.stop_reason = "patience";
        stop = true;
      }
      next_boundary += cfg.record_interval;
    }
    if (stop) break;

    if (step.exhausted || orc.exhausted()) {
      result.stop_reason = "budget";
      break;
    }
    // A policy that only re-emits cached molecules consumes no budget; treat
    // `patience` such steps in a row as the run having converged outright.
    if (step.new_calls == 0) {
      if (++idle_steps >= cfg.patience) {
        result.stop_reason = "completed";
        break;
      }
    } else {
      idle_steps = 0;
    }
  }

  result.log = orc.log();
  result.final_model_digest = agent.param_digest();
  return result;
}

}  // namespace molopt::optimize

//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "molopt/chem/molecule.hpp"
#include "molopt/common.hpp"
#include "molopt/fingerprint.hpp"

namespace molopt::oracle {

// Maps a raw descriptor value onto [0,1].
struct ScoreModifier {
  enum class Kind { Gaussian, MinThreshold, MaxThreshold, Identity };
  Kind kind = Kind::Identity;
  double mu = 0.0;        // gaussian center
  double sigma = 1.0;     // gaussian width, > 0
  double threshold = 1.0; // min/max threshold parameter, > 0

  // gaussian: exp(−(x−μ)²/(2σ²)); min_threshold: clamp(x/t, 0, 1);
  // max_threshold: 1 for x ≤ t, clamp(2 − x/t, 0, 1) above; identity: clamp(x, 0, 1).
  double apply(double x) const;
};

// One scored property: a value source plus its modifier.  Sources:
//   "similarity:<SMILES>"  Tanimoto to the target's fingerprint
//   "mw"                   molecular weight
//   "logp"                 Crippen LogP
//   "element:<symbol>"     atom count of one element (hydrogens via "element:H")
//   "total_atoms"          atom count including hydrogens
struct Component {
  std::string source;
  ScoreModifier modifier;
  // Prepared at construction for similarity sources.
  fp::Fingerprint target_fp;
};

// A named multi-property objective: geometric mean of its component scores.
class Objective {
 public:
  Objective(std::string name, std::vector<Component> components);

  // score(m) = tanimoto(ecfp(m), ecfp(target)).
  static Objective similarity(const std::string& target_smiles);
  // Per-element gaussians (σ_m = 1) plus a total-atom gaussian (σ_m = 2).
  static Objective isomer(const std::map<std::string, int>& formula);
  // Objective definition JSON: {name, components: [{source, modifier}]}.
  static Objective from_json_file(const std::string& path);
  static Objective from_json_text(const std::string& text);

  double score(const chem::Molecule& mol) const;
  const std::string& name() const { return name_; }
  const std::vector<Component>& components() const { return components_; }

 private:
  std::string name_;
  std::vector<Component> components_;
};

struct BudgetExhausted : Error {
  using Error::Error;
};

struct OracleRecord {
  int call_index = 0;  // 1-based, gap-free
  std::string key;     // canonical SMILES
  double score = 0.0;
};

// Budget-enforcing caching wrapper around an Objective.  Distinct canonical
// keys cost budget; repeats are free cache hits.  Every charged call is
// appended to an immutable log in evaluation order.
class BudgetedOracle {
 public:
  BudgetedOracle(Objective objective, int budget);

  // Returns the objective score for `mol`.  Cached keys return without
  // consuming budget; new keys are charged and logged.  Throws
  // BudgetExhausted for a new key once calls_used == budget.
  double evaluate(const std::string& key, const chem::Molecule& mol);

  // Charges one budget call for a string that failed to parse: the raw text
  // is logged with score 0 and is never cached, so repeats are charged again.
  // Throws BudgetExhausted when no budget remains.
  void charge_invalid(const std::string& raw);

  bool cached(const std::string& key) const { return cache_.count(key) > 0; }
  bool exhausted() const { return calls_used_ >= budget_; }
  int calls_used() const { return calls_used_; }
  int budget() const { return budget_; }
  const Objective& objective() const { return objective_; }
  const std::vector<OracleRecord>& log() const { return log_; }

 private:
  Objective objective_;
  int budget_;
  int calls_used_ = 0;
  std::unordered_map<std::string, double> cache_;
  std::vector<OracleRecord> log_;
};

}  // namespace molopt::oracle

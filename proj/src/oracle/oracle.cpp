//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "molopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "molopt/chem/elements.hpp"
#include "molopt/chem/parser.hpp"
#include "molopt/descriptors.hpp"

namespace molopt::oracle {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Fails on any key outside `allowed` so typos surface instead of silently
// configuring nothing.
void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                  const char* what) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* a : allowed) known |= (item.key() == a);
    if (!known) throw ValidationError(std::string("unknown ") + what + " key: " + item.key());
  }
}

ScoreModifier modifier_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw ValidationError("modifier must be an object with a kind");
  }
  ScoreModifier m;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian") {
    require_keys(j, {"kind", "mu", "sigma"}, "gaussian modifier");
    m.kind = ScoreModifier::Kind::Gaussian;
    m.mu = j.at("mu").get<double>();
    m.sigma = j.at("sigma").get<double>();
    if (m.sigma <= 0.0) throw ValidationError("gaussian modifier needs sigma > 0");
  } else if (kind == "min_threshold") {
    require_keys(j, {"kind", "threshold"}, "min_threshold modifier");
    m.kind = ScoreModifier::Kind::MinThreshold;
    m.threshold = j.at("threshold").get<double>();
    if (m.threshold <= 0.0) throw ValidationError("min_threshold needs threshold > 0");
  } else if (kind == "max_threshold") {
    require_keys(j, {"kind", "threshold"}, "max_threshold modifier");
    m.kind = ScoreModifier::Kind::MaxThreshold;
    m.threshold = j.at("threshold").get<double>();
    if (m.threshold <= 0.0) throw ValidationError("max_threshold needs threshold > 0");
  } else if (kind == "identity") {
    require_keys(j, {"kind"}, "identity modifier");
    m.kind = ScoreModifier::Kind::Identity;
  } else {
    throw ValidationError("unknown score modifier kind '" + kind + "'");
  }
  return m;
}

Component make_component(std::string source, ScoreModifier modifier) {
  Component c;
  c.source = std::move(source);
  c.modifier = modifier;
  if (c.source.rfind("similarity:", 0) == 0) {
    const std::string target = c.source.substr(std::string("similarity:").size());
    try {
      c.target_fp = fp::ecfp(chem::parse_smiles(target));
    } catch (const chem::ParseError& e) {
      throw ValidationError("bad similarity target '" + target + "': " + e.what());
    }
  } else if (c.source.rfind("element:", 0) == 0) {
    const std::string symbol = c.source.substr(std::string("element:").size());
    if (chem::element_by_symbol(symbol) == nullptr) {
      throw ValidationError("element source has unknown symbol '" + symbol + "'");
    }
  } else if (c.source != "mw" && c.source != "logp" && c.source != "total_atoms") {
    throw ValidationError("unknown objective source '" + c.source + "'");
  }
  return c;
}

double raw_value(const Component& c, const chem::Molecule& mol) {
  if (c.source.rfind("similarity:", 0) == 0)
    return fp::tanimoto(fp::ecfp(mol, 2, c.target_fp.width), c.target_fp);
  if (c.source == "mw") return desc::mol_weight(mol);
  if (c.source == "logp") return desc::crippen_logp(mol);
  if (c.source == "total_atoms") return desc::total_atom_count(mol);
  const std::string symbol = c.source.substr(std::string("element:").size());
  const auto counts = desc::element_counts(mol);
  const auto it = counts.find(symbol);
  return it == counts.end() ? 0.0 : it->second;
}

}  // namespace

double ScoreModifier::apply(double x) const {
  switch (kind) {
    case Kind::Gaussian: {
      const double d = (x - mu) / sigma;
      return std::exp(-0.5 * d * d);
    }
    case Kind::MinThreshold:
      return clamp01(x / threshold);
    case Kind::MaxThreshold:
      return x <= threshold ? 1.0 : clamp01(2.0 - x / threshold);
    case Kind::Identity:
      return clamp01(x);
  }
  return 0.0;
}

Objective::Objective(std::string name, std::vector<Component> components)
    : name_(std::move(name)), components_(std::move(components)) {
  if (components_.empty()) throw ValidationError("objective needs at least one component");
}

Objective Objective::similarity(const std::string& target_smiles) {
  ScoreModifier identity;  // tanimoto is already in [0,1]
  std::vector<Component> comps;
  comps.push_back(make_component("similarity:" + target_smiles, identity));
  return Objective("similarity", std::move(comps));
}

Objective Objective::isomer(const std::map<std::string, int>& formula) {
  if (formula.empty()) throw ValidationError("isomer objective needs a nonempty formula");
  std::vector<Component> comps;
  int total = 0;
  for (const auto& [symbol, count] : formula) {
    ScoreModifier g;
    g.kind = ScoreModifier::Kind::Gaussian;
    g.mu = count;
    g.sigma = 1.0;
    comps.push_back(make_component("element:" + symbol, g));
    total += count;
  }
  ScoreModifier g;
  g.kind = ScoreModifier::Kind::Gaussian;
  g.mu = total;
  g.sigma = 2.0;
  comps.push_back(make_component("total_atoms", g));

  std::string name = "isomer";
  for (const auto& [symbol, count] : formula) name += "_" + symbol + std::to_string(count);
  return Objective(std::move(name), std::move(comps));
}

Objective Objective::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed objective JSON: ") + e.what());
  }
  try {
    if (!j.is_object()) throw ValidationError("objective must be a JSON object");
    require_keys(j, {"name", "components"}, "objective");
    if (!j.contains("name") || !j.contains("components")) {
      throw ValidationError("objective needs a name and a components list");
    }
    const std::string name = j.at("name").get<std::string>();
    std::vector<Component> comps;
    for (const auto& cj : j.at("components")) {
      if (!cj.is_object() || !cj.contains("source") || !cj.contains("modifier")) {
        throw ValidationError("component needs a source and a modifier");
      }
      require_keys(cj, {"source", "modifier"}, "component");
      comps.push_back(make_component(cj.at("source").get<std::string>(),
                                     modifier_from_json(cj.at("modifier"))));
    }
    return Objective(name, std::move(comps));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed objective JSON: ") + e.what());
  }
}

Objective Objective::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open objective file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return from_json_text(buf.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

double Objective::score(const chem::Molecule& mol) const {
  double log_sum = 0.0;
  for (const Component& c : components_) {
    const double s = c.modifier.apply(raw_value(c, mol));
    if (s <= 0.0) return 0.0;  // geometric mean with a zero factor
    log_sum += std::log(s);
  }
  return clamp01(std::exp(log_sum / static_cast<double>(components_.size())));
}

BudgetedOracle::BudgetedOracle(Objective objective, int budget)
    : objective_(std::move(objective)), budget_(budget) {
  if (budget < 0) throw ValidationError("oracle budget must be nonnegative");
}

double BudgetedOracle::evaluate(const std::string& key, const chem::Molecule& mol) {
  const auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  if (calls_used_ >= budget_)
    throw BudgetExhausted("oracle budget of " + std::to_string(budget_) + " exhausted");
  const double score = objective_.score(mol);
  ++calls_used_;
  log_.push_back({calls_used_, key, score});
  cache_.emplace(key, score);
  return score;
}

void BudgetedOracle::charge_invalid(const std::string& raw) {
  if (calls_used_ >= budget_)
    throw BudgetExhausted("oracle budget of " + std::to_string(budget_) + " exhausted");
  ++calls_used_;
  log_.push_back({calls_used_, raw, 0.0});
}

}  // namespace molopt::oracle

//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
// Generates the bundled drug-like SMILES corpus: seeded random assembly of
// ring scaffolds, linkers, and substituents, kept when the string parses,
// lands in a drug-like weight window, and is not a duplicate under canonical
// keys.  The output is deterministic for a given seed, so the committed
// corpus can be regenerated and diffed.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include "molopt/chem/canonical.hpp"
#include "molopt/chem/parser.hpp"
#include "molopt/descriptors.hpp"

namespace {

// A ring system template: SMILES text plus byte offsets of atoms that can
// take a parenthesized substituent (atoms with a spare valence, not adjacent
// to a ring-closure digit so insertion keeps the digit next to its atom).
struct RingTemplate {
  const char* text;
  std::vector<int> slots;
};

const std::vector<RingTemplate>& ring_templates() {
  static const std::vector<RingTemplate> t = {
      {"c1ccccc1", {2, 3, 4, 5}},        // benzene
      {"c1ccncc1", {2, 3, 5}},           // pyridine
      {"c1ccncn1", {2, 3}},              // pyrimidine
      {"c1ccsc1", {2, 3}},               // thiophene
      {"c1ccoc1", {2, 3}},               // furan
      {"c1cc[nH]c1", {2, 3}},            // pyrrole
      {"c1cc[nH]n1", {2, 3}},            // pyrazole
      {"c1nc[nH]c1", {3}},               // imidazole
      {"C1CCNCC1", {2, 3, 4, 5}},        // piperidine
      {"C1CCCCC1", {2, 3, 4, 5}},        // cyclohexane
      {"C1CCCC1", {2, 3, 4}},            // cyclopentane
      {"C1COCCN1", {2, 4, 5}},           // morpholine
      {"C1CCOC1", {2, 3}},               // tetrahydrofuran
      {"c1ccc2ccccc2c1", {2, 3, 6, 7, 8, 9}},  // naphthalene
  };
  return t;
}

const std::vector<std::string>& substituents() {
  static const std::vector<std::string> s = {
      "C",        "CC",         "CCC",       "C(C)C",     "C(C)(C)C",
      "O",        "OC",         "OCC",       "N",         "NC",
      "N(C)C",    "F",          "Cl",        "Br",        "C(F)(F)F",
      "C#N",      "C(=O)O",     "C(=O)OC",   "C(=O)N",    "C(=O)NC",
      "C(=O)C",   "S(=O)(=O)N", "S(=O)(=O)C", "SC",       "OC(F)(F)F",
      "[N+](=O)[O-]",
  };
  return s;
}

const std::vector<std::string>& linkers() {
  static const std::vector<std::string> l = {
      "",      "C",      "CC",      "CCC",    "O",      "OC",     "OCC",
      "N",     "NC",     "CN",      "C(=O)N", "NC(=O)", "C(=O)",  "C(=O)O",
      "OC(=O)", "S",      "CS",      "C=C",    "CNC",    "COC",    "C(C)N",
      "S(=O)(=O)N", "NS(=O)(=O)",
  };
  return l;
}

// One ring block: template with 0–2 substituents spliced into free slots.
std::string make_ring_block(std::mt19937_64& rng) {
  const auto& templates = ring_templates();
  const RingTemplate& t = templates[rng() % templates.size()];
  std::string text = t.text;
  const std::uint64_t roll = rng() % 100;
  std::size_t count = roll < 35 ? 0 : (roll < 80 ? 1 : 2);
  count = std::min(count, t.slots.size());
  std::vector<int> slots = t.slots;
  for (std::size_t i = slots.size(); i > 1; --i) {
    std::swap(slots[i - 1], slots[rng() % i]);
  }
  slots.resize(count);
  std::sort(slots.rbegin(), slots.rend());  // right-to-left keeps offsets valid
  for (const int pos : slots) {
    const std::string& sub = substituents()[rng() % substituents().size()];
    text.insert(static_cast<std::size_t>(pos) + 1, "(" + sub + ")");
  }
  return text;
}

std::string assemble(std::mt19937_64& rng) {
  const std::uint64_t roll = rng() % 100;
  const int rings = roll < 20 ? 1 : (roll < 75 ? 2 : 3);
  std::string smiles = make_ring_block(rng);
  for (int i = 1; i < rings; ++i) {
    smiles += linkers()[rng() % linkers().size()];
    smiles += make_ring_block(rng);
  }
  return smiles;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the bundled drug-like SMILES corpus"};
  std::string out_path = "data/desk_corpus.smi";
  int count = 10000;
  std::uint64_t seed = 20260816;
  double mw_low = 180.0, mw_high = 480.0;
  app.add_option("-o,--out", out_path, "output SMILES file")->capture_default_str();
  app.add_option("--count", count, "number of lines")->capture_default_str();
  app.add_option("--seed", seed, "generator seed")->capture_default_str();
  app.add_option("--mw-low", mw_low, "minimum molecular weight")->capture_default_str();
  app.add_option("--mw-high", mw_high, "maximum molecular weight")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  std::mt19937_64 rng(seed);
  std::set<std::string> seen;
  std::vector<std::string> lines;
  lines.reserve(static_cast<std::size_t>(count));
  long long tried = 0;
  double mw_sum = 0.0, mw_sq = 0.0;
  while (static_cast<int>(lines.size()) < count) {
    ++tried;
    const std::string smiles = assemble(rng);
    molopt::chem::Molecule mol;
    try {
      mol = molopt::chem::parse_smiles(smiles);
    } catch (const molopt::chem::ParseError&) {
      continue;
    }
    const double mw = molopt::desc::mol_weight(mol);
    if (mw < mw_low || mw > mw_high) continue;
    if (!seen.insert(molopt::chem::canonical_key(mol)).second) continue;
    lines.push_back(smiles);
    mw_sum += mw;
    mw_sq += mw * mw;
  }

  std::ofstream out(out_path, std::ios::trunc);
  if (!out) {
    std::cerr << "cannot open " << out_path << " for writing\n";
    return 1;
  }
  for (const auto& line : lines) out << line << "\n";
  out.close();

  const double n = static_cast<double>(count);
  const double mean = mw_sum / n;
  const double var = std::max(0.0, mw_sq / n - mean * mean);
  std::cout << "wrote " << count << " lines to " << out_path << " (tried " << tried
            << ", mw mean " << mean << ", mw std " << std::sqrt(var) << ")\n";
  return 0;
}

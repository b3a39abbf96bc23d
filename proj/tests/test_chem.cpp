//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "molopt/chem/canonical.hpp"
#include "molopt/chem/parser.hpp"
#include "molopt/chem/tokenizer.hpp"

using namespace molopt;

namespace {

std::vector<std::string> corpus_lines(std::size_t limit) {
  std::ifstream in(MOLOPT_SOURCE_DIR "/data/desk_corpus.smi");
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (lines.size() < limit && std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

int total_h(const chem::Molecule& m) {
  int h = 0;
  for (int i = 0; i < m.atom_count(); ++i) h += m.atom(i).total_h();
  return h;
}

}  // namespace

TEST_CASE("tokenizer is lossless: concatenated tokens rebuild the input") {
  const std::vector<std::string> inputs = {
      "CCO",
      "c1ccccc1",
      "CC(=O)Nc1ccc(O)cc1",
      "[NH4+].[Cl-]",
      "C%12CCCCC%12",
      "O=S(=O)(N)c1ccccc1",
      "[13CH4]",
      "N#Cc1ccc2[nH]ccc2c1",
  };
  for (const auto& s : inputs) {
    CAPTURE(s);
    std::string rebuilt;
    for (const auto& tok : chem::tokenize(s)) rebuilt += tok.text;
    CHECK(rebuilt == s);
  }
}

TEST_CASE("tokenizer is lossless over the corpus sample") {
  for (const auto& line : corpus_lines(200)) {
    std::string rebuilt;
    for (const auto& tok : chem::tokenize(line)) rebuilt += tok.text;
    REQUIRE(rebuilt == line);
  }
}

TEST_CASE("malformed strings are rejected with ParseError") {
  const std::vector<std::string> bad = {
      "",            // empty
      "   ",         // blank
      "(",           // dangling branch open
      ")",           // branch close without open
      "C(",          // unclosed branch
      "C)",          // unmatched close
      "C((C)",       // unbalanced nesting
      "C1CC",        // unclosed ring bond
      "1CC1",        // ring digit before any atom
      "C11",         // ring closure to itself
      "C%1C",        // truncated %NN closure
      "[C",          // unclosed bracket
      "C]",          // stray bracket close
      "[]",          // empty bracket
      "[Zz]",        // unknown element
      "Zz",          // unknown organic token
      "C=",          // dangling bond
      "=C",          // leading bond
      "C==C",        // doubled bond token
      "C.=C",        // bond after dot
      "C(=)C",       // empty bond target in branch
      "C#N#C",       // nitrogen valence overflow
      "O=C=O=C",     // oxygen valence overflow
      "C\tC",        // embedded whitespace
      "CC(C)(C)(C)(C)C",  // carbon with five neighbours
  };
  for (const auto& s : bad) {
    CAPTURE(s);
    CHECK_THROWS_AS((void)chem::parse_smiles(s), chem::ParseError);
  }
}

TEST_CASE("unsupported features are rejected, not silently dropped") {
  const std::vector<std::string> unsupported = {
      "C/C=C/C",        // cis/trans bonds
      "C\\C=C\\C",      //
      "[C@H](N)(C)O",   // tetrahedral chirality
      "[C@@H](N)(C)O",  //
      "*CC",            // wildcard atom
      "[CH3:1]C",       // atom map
  };
  for (const auto& s : unsupported) {
    CAPTURE(s);
    CHECK_THROWS_AS((void)chem::parse_smiles(s), chem::ParseError);
  }
}

TEST_CASE("implicit hydrogens follow smallest-fitting-valence rules") {
  CHECK(total_h(chem::parse_smiles("C")) == 4);     // methane
  CHECK(total_h(chem::parse_smiles("CC")) == 6);    // ethane
  CHECK(total_h(chem::parse_smiles("O")) == 2);     // water
  CHECK(total_h(chem::parse_smiles("N")) == 3);     // ammonia
  CHECK(total_h(chem::parse_smiles("C=O")) == 2);   // formaldehyde
  CHECK(total_h(chem::parse_smiles("C#N")) == 1);   // hydrogen cyanide
  CHECK(total_h(chem::parse_smiles("c1ccccc1")) == 6);  // benzene
  // Sulfur picks the smallest valence from {2,4,6} that fits: sulfonamide
  // sulfur carries four explicit neighbours summing to bond order 6.
  CHECK_NOTHROW((void)chem::parse_smiles("NS(=O)(=O)c1ccccc1"));
  CHECK(total_h(chem::parse_smiles("S")) == 2);     // hydrogen sulfide
  CHECK(total_h(chem::parse_smiles("CS(C)=O")) == 6);  // DMSO: no H on S
}

TEST_CASE("bracket atoms take their hydrogen count literally") {
  CHECK(total_h(chem::parse_smiles("[CH4]")) == 4);
  CHECK(total_h(chem::parse_smiles("[CH3]C")) == 6);  // same as ethane
  CHECK(total_h(chem::parse_smiles("[C]")) == 0);     // bare carbon atom
  const chem::Molecule charged = chem::parse_smiles("[NH4+]");
  CHECK(charged.atom(0).formal_charge == 1);
  CHECK(charged.atom(0).total_h() == 4);
  const chem::Molecule isotope = chem::parse_smiles("[13CH4]");
  CHECK(isotope.atom(0).isotope == 13);
}

TEST_CASE("aromatic nitrogen hydrogen bookkeeping: pyrrole vs pyridine") {
  const chem::Molecule pyrrole = chem::parse_smiles("c1cc[nH]c1");
  const chem::Molecule pyridine = chem::parse_smiles("c1ccncc1");
  int pyrrole_n_h = -1, pyridine_n_h = -1;
  for (int i = 0; i < pyrrole.atom_count(); ++i) {
    if (pyrrole.atom(i).element == "N") pyrrole_n_h = pyrrole.atom(i).total_h();
  }
  for (int i = 0; i < pyridine.atom_count(); ++i) {
    if (pyridine.atom(i).element == "N") pyridine_n_h = pyridine.atom(i).total_h();
  }
  CHECK(pyrrole_n_h == 1);
  CHECK(pyridine_n_h == 0);
}

TEST_CASE("ring closures: digits, %NN, and bond order consistency") {
  // Cyclohexane via %NN closure parses to the same molecule as via digits.
  CHECK(chem::canonical_key(chem::parse_smiles("C%12CCCCC%12")) ==
        chem::canonical_key(chem::parse_smiles("C1CCCCC1")));
  // Ring-closure bond order may be written on either side, but not both
  // with different orders.
  CHECK(chem::canonical_key(chem::parse_smiles("C=1CCCCC=1")) ==
        chem::canonical_key(chem::parse_smiles("C1CCCCC=1")));
  CHECK_THROWS_AS((void)chem::parse_smiles("C=1CCCCC#1"), chem::ParseError);
  // Reused ring-closure digit after closing is fine.
  CHECK_NOTHROW((void)chem::parse_smiles("C1CC1C1CC1"));
}

TEST_CASE("dots split molecules into fragments") {
  const chem::Molecule salt = chem::parse_smiles("[NH4+].[Cl-]");
  CHECK(salt.fragments().size() == 2);
  const chem::Molecule one = chem::parse_smiles("CCO");
  CHECK(one.fragments().size() == 1);
}

TEST_CASE("canonical SMILES is stable under input atom reordering") {
  const std::vector<std::pair<std::string, std::string>> same = {
      {"CCO", "OCC"},
      {"CC(=O)O", "OC(C)=O"},
      {"c1ccccc1C", "Cc1ccccc1"},
      {"C1CCCCC1", "C2CCCCC2"},
      {"N#Cc1ccccc1", "c1ccccc1C#N"},
      {"CC(C)(C)C", "C(C)(C)(C)C"},
      {"[NH4+].[Cl-]", "[Cl-].[NH4+]"},  // fragment order
  };
  for (const auto& [a, b] : same) {
    CAPTURE(a);
    CAPTURE(b);
    CHECK(chem::canonical_key(chem::parse_smiles(a)) ==
          chem::canonical_key(chem::parse_smiles(b)));
  }
}

TEST_CASE("distinct molecules get distinct canonical keys") {
  const std::vector<std::string> mols = {
      "CCO", "CCN", "CCC", "C=O",  "CC=O", "c1ccccc1", "C1CCCCC1",
      "CO",  "OCO", "COC", "CC#N", "CNC",  "CCCO",     "CC(C)O",
  };
  std::set<std::string> keys;
  for (const auto& s : mols) keys.insert(chem::canonical_key(chem::parse_smiles(s)));
  CHECK(keys.size() == mols.size());
}

TEST_CASE("canonical SMILES round-trips through the parser unchanged") {
  for (const auto& line : corpus_lines(150)) {
    const std::string canon = chem::canonical_smiles(chem::parse_smiles(line));
    REQUIRE(chem::canonical_smiles(chem::parse_smiles(canon)) == canon);
  }
}

TEST_CASE("randomized renderings re-parse to the same canonical key") {
  std::mt19937_64 rng(20260816);
  for (const auto& line : corpus_lines(60)) {
    const chem::Molecule mol = chem::parse_smiles(line);
    const std::string key = chem::canonical_key(mol);
    for (int r = 0; r < 8; ++r) {
      const std::string variant = chem::render_random_smiles(mol, rng);
      REQUIRE(chem::canonical_key(chem::parse_smiles(variant)) == key);
    }
  }
}

TEST_CASE("whole corpus parses") {
  std::ifstream in(MOLOPT_SOURCE_DIR "/data/desk_corpus.smi");
  REQUIRE(in.good());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    REQUIRE_NOTHROW((void)chem::parse_smiles(line));
    ++n;
  }
  CHECK(n == 10000);
}

//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "molopt/chem/canonical.hpp"
#include "molopt/chem/parser.hpp"
#include "molopt/descriptors.hpp"

using namespace molopt;

namespace {

chem::Molecule mol(const std::string& smiles) { return chem::parse_smiles(smiles); }

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

}  // namespace

TEST_CASE("molecular weight: hand-summed atomic masses") {
  // H 1.008, C 12.011, N 14.007, O 15.999 (standard atomic weights).
  CHECK(desc::mol_weight(mol("C")) == doctest::Approx(16.043).epsilon(1e-9));   // 12.011 + 4·1.008
  CHECK(desc::mol_weight(mol("O")) == doctest::Approx(18.015).epsilon(1e-9));   // 15.999 + 2·1.008
  CHECK(desc::mol_weight(mol("N")) == doctest::Approx(17.031).epsilon(1e-9));   // 14.007 + 3·1.008
  CHECK(desc::mol_weight(mol("CC")) == doctest::Approx(30.070).epsilon(1e-9));  // 2·12.011 + 6·1.008
  CHECK(desc::mol_weight(mol("c1ccccc1")) == doctest::Approx(78.114).epsilon(1e-9));  // 6·(12.011+1.008)
  // Acetamide CH3C(=O)NH2: 2 C + 5 H + N + O.
  CHECK(desc::mol_weight(mol("CC(N)=O")) ==
        doctest::Approx(2 * 12.011 + 5 * 1.008 + 14.007 + 15.999).epsilon(1e-12));
}

TEST_CASE("molecular weight counts bracket hydrogens and charges correctly") {
  // Ammonium: N + 4 H; the charge moves electrons, not mass, at this
  // resolution.
  CHECK(desc::mol_weight(mol("[NH4+]")) == doctest::Approx(14.007 + 4 * 1.008).epsilon(1e-12));
  CHECK(desc::mol_weight(mol("[CH3]")) == doctest::Approx(12.011 + 3 * 1.008).epsilon(1e-12));
  // Fragments sum.
  CHECK(desc::mol_weight(mol("[NH4+].[Cl-]")) ==
        doctest::Approx(14.007 + 4 * 1.008 + 35.45).epsilon(1e-9));
}

TEST_CASE("element counts include implicit hydrogens") {
  const auto counts = desc::element_counts(mol("CC(N)=O"));  // acetamide
  CHECK(counts.at("C") == 2);
  CHECK(counts.at("H") == 5);
  CHECK(counts.at("N") == 1);
  CHECK(counts.at("O") == 1);
  CHECK(counts.size() == 4);
}

TEST_CASE("Crippen LogP: hand-applied atom-class table values") {
  CHECK(desc::crippen_logp(mol("C")) == doctest::Approx(0.6361).epsilon(1e-6));
  CHECK(desc::crippen_logp(mol("CC")) == doctest::Approx(1.0262).epsilon(1e-6));
  CHECK(desc::crippen_logp(mol("c1ccccc1")) == doctest::Approx(1.6866).epsilon(1e-6));
  CHECK(desc::crippen_logp(mol("O")) == doctest::Approx(-0.8247).epsilon(1e-6));
  // Ibuprofen CC(C)Cc1ccc(cc1)C(C)C(=O)O.
  CHECK(desc::crippen_logp(mol("CC(C)Cc1ccc(cc1)C(C)C(=O)O")) ==
        doctest::Approx(3.0732).epsilon(1e-5));
}

TEST_CASE("LogP orders simple series sensibly") {
  // Longer alkanes are greasier; alcohols are less greasy than their alkane.
  CHECK(desc::crippen_logp(mol("CCC")) > desc::crippen_logp(mol("CC")));
  CHECK(desc::crippen_logp(mol("CCCC")) > desc::crippen_logp(mol("CCC")));
  CHECK(desc::crippen_logp(mol("CCO")) < desc::crippen_logp(mol("CC")));
}

TEST_CASE("descriptors are bitwise identical across randomized renderings") {
  std::mt19937_64 rng(7);
  for (const auto& line : corpus_lines(80)) {
    const chem::Molecule m = chem::parse_smiles(line);
    const double mw = desc::mol_weight(m);
    const double logp = desc::crippen_logp(m);
    for (int r = 0; r < 10; ++r) {
      const chem::Molecule v = chem::parse_smiles(chem::render_random_smiles(m, rng));
      REQUIRE(desc::mol_weight(v) == mw);
      REQUIRE(desc::crippen_logp(v) == logp);
    }
  }
}

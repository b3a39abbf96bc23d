//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>

#include "molopt/chem/canonical.hpp"
#include "molopt/chem/parser.hpp"
#include "molopt/fingerprint.hpp"

using namespace molopt;

namespace {
chem::Molecule mol(const std::string& smiles) { return chem::parse_smiles(smiles); }
}  // namespace

TEST_CASE("tanimoto hand cases") {
  fp::Fingerprint a, b;
  a.bits = {1, 2, 3};
  b.bits = {2, 3, 4};
  CHECK(fp::tanimoto(a, b) == 0.5);  // |∩| 2 / |∪| 4

  fp::Fingerprint self;
  self.bits = {7, 100, 2000};
  CHECK(fp::tanimoto(self, self) == 1.0);

  fp::Fingerprint empty;
  CHECK(fp::tanimoto(empty, empty) == 0.0);  // defined as 0
  CHECK(fp::tanimoto(empty, a) == 0.0);

  fp::Fingerprint disjoint;
  disjoint.bits = {10, 11};
  CHECK(fp::tanimoto(a, disjoint) == 0.0);
}

TEST_CASE("fingerprint bits are sorted, unique, and within width") {
  for (const std::string s :
       {"CCO", "c1ccccc1", "CC(=O)Nc1ccc(O)cc1", "O=S(=O)(N)c1ccc(Cl)cc1"}) {
    const fp::Fingerprint f = fp::ecfp(mol(s));
    CAPTURE(s);
    CHECK(f.width == 2048);
    CHECK(!f.bits.empty());
    CHECK(std::is_sorted(f.bits.begin(), f.bits.end()));
    CHECK(std::adjacent_find(f.bits.begin(), f.bits.end()) == f.bits.end());
    CHECK(f.bits.back() < f.width);
  }
}

TEST_CASE("identical molecules give identical fingerprints regardless of rendering") {
  std::mt19937_64 rng(11);
  for (const std::string s : {"CC(=O)Nc1ccc(O)cc1", "O=C(O)C1CCCCC1", "c1ccc2[nH]ccc2c1"}) {
    const chem::Molecule m = mol(s);
    const fp::Fingerprint reference = fp::ecfp(m);
    for (int i = 0; i < 10; ++i) {
      const chem::Molecule v = chem::parse_smiles(chem::render_random_smiles(m, rng));
      REQUIRE(fp::ecfp(v) == reference);
    }
  }
}

TEST_CASE("similar molecules overlap more than dissimilar ones") {
  const auto fp_of = [](const std::string& s) { return fp::ecfp(mol(s)); };
  // Hexane vs heptane share most environments; hexane vs benzene share none
  // beyond chance.
  const double close = fp::tanimoto(fp_of("CCCCCC"), fp_of("CCCCCCC"));
  const double far = fp::tanimoto(fp_of("CCCCCC"), fp_of("c1ccccc1"));
  CHECK(close > far);
  CHECK(close > 0.5);
  CHECK(far < 0.2);
}

TEST_CASE("radius grows the environment set monotonically in count") {
  const chem::Molecule m = mol("CC(=O)Nc1ccc(O)cc1");
  const auto r0 = fp::ecfp(m, 0).bits.size();
  const auto r1 = fp::ecfp(m, 1).bits.size();
  const auto r2 = fp::ecfp(m, 2).bits.size();
  CHECK(r0 <= r1);
  CHECK(r1 <= r2);
  CHECK(r0 >= 1);
}

TEST_CASE("folding width bounds the bit domain") {
  const chem::Molecule m = mol("CC(=O)Nc1ccc(O)cc1");
  for (const std::uint32_t width : {64u, 256u, 2048u}) {
    const fp::Fingerprint f = fp::ecfp(m, 2, width);
    CHECK(f.width == width);
    CHECK(f.bits.back() < width);
  }
}

TEST_CASE("methane and ethane differ") {
  CHECK(fp::ecfp(mol("C")) != fp::ecfp(mol("CC")));
  CHECK(fp::tanimoto(fp::ecfp(mol("C")), fp::ecfp(mol("CC"))) < 1.0);
}

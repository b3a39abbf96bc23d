//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <vector>

#include "molopt/chem/molecule.hpp"

namespace molopt::fp {

// A folded circular fingerprint: the sorted, de-duplicated set of on-bits.
struct Fingerprint {
  std::uint32_t width = 2048;       // folding modulus (power of two)
  std::vector<std::uint32_t> bits;  // ascending, unique, all < width

  bool operator==(const Fingerprint&) const = default;
};

// Circular substructure fingerprint in the ECFP family.  Atom environments
// start from hashed invariants (element, heavy degree, hydrogen count, charge,
// aromaticity, ring membership) and grow by hashing each atom's previous
// identifier with its sorted (bond order, neighbour identifier) pairs, out to
// the given radius (radius 2 ~ ECFP4).  Environments that cover an identical
// atom set are collapsed, keeping the one with the smallest (radius,
// identifier); surviving identifiers fold onto `width` bits.
Fingerprint ecfp(const chem::Molecule& mol, int radius = 2, std::uint32_t width = 2048);

// Tanimoto similarity |A∩B| / |A∪B|; defined as 0 when both sets are empty.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

}  // namespace molopt::fp

//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "molopt/descriptors.hpp"

#include "molopt/chem/elements.hpp"

namespace molopt::desc {

double mol_weight(const chem::Molecule& mol) {
  // Summing count * weight per element (in symbol order) rather than walking
  // atoms keeps the result bit-identical across atom orderings: the formula
  // is a rendering invariant, so the floating-point sum is too.
  double total = 0.0;
  for (const auto& [symbol, count] : element_counts(mol)) {
    total += chem::element_by_symbol(symbol)->weight * count;
  }
  return total;
}

std::map<std::string, int> element_counts(const chem::Molecule& mol) {
  std::map<std::string, int> counts;
  for (const chem::Atom& a : mol.atoms()) {
    ++counts[a.element];
    if (a.total_h() > 0) counts["H"] += a.total_h();
  }
  return counts;
}

int total_atom_count(const chem::Molecule& mol) {
  int n = mol.atom_count();
  for (const chem::Atom& a : mol.atoms()) n += a.total_h();
  return n;
}

}  // namespace molopt::desc

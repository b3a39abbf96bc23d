//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <map>
#include <string>
#include <vector>

#include "molopt/chem/molecule.hpp"

namespace molopt::desc {

// Molecular weight in g/mol: standard atomic weights of all heavy atoms plus
// implicit/explicit hydrogens.
double mol_weight(const chem::Molecule& mol);

// Element symbol -> atom count, hydrogens included under "H".
std::map<std::string, int> element_counts(const chem::Molecule& mol);

// Total atom count including hydrogens.
int total_atom_count(const chem::Molecule& mol);

// One heavy atom's contribution class in the atomic LogP scheme.
struct CrippenType {
  std::string label;  // e.g. "C1", "N11", "OS"
  double value = 0.0;
};

// Per-heavy-atom LogP contribution types, index-aligned with mol.atoms().
// Exposed so the classification can be checked atom by atom.
std::vector<CrippenType> crippen_types(const chem::Molecule& mol);

// Octanol/water LogP by atomic contribution (Wildman–Crippen scheme): every
// heavy atom is assigned a structural class with a fixed additive value, and
// each hydrogen contributes according to the atom it sits on.
double crippen_logp(const chem::Molecule& mol);

}  // namespace molopt::desc

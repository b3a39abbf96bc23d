//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <random>
#include <string>

#include "molopt/chem/molecule.hpp"

namespace molopt::chem {

// Canonical SMILES for a molecule.
//
// Atom ranks are computed by iterative neighbourhood refinement (Morgan-style):
// initial invariants hash (element, heavy degree, charge, total hydrogens,
// aromaticity, isotope), then each round rehashes an atom's rank together with
// its sorted (bond order, neighbour rank) pairs until the number of distinct
// ranks stops growing.  Remaining ties are broken by promoting each tied atom
// in turn and keeping the lexicographically smallest rendering, so the result
// does not depend on input atom order.  Tie exploration is capped per
// fragment; molecules symmetric enough to exhaust the cap (far beyond any
// drug-like structure) fall back to the smallest rendering found.
//
// Fragments are rendered independently, sorted, and joined with '.'.
std::string canonical_smiles(const Molecule& mol);

// Stable identity key for duplicate detection.  Currently the canonical
// SMILES itself, which keeps keys human-readable in logs.
inline std::string canonical_key(const Molecule& mol) { return canonical_smiles(mol); }

// A randomly rooted, randomly ordered — but valid and losslessly re-parseable —
// SMILES rendering of the molecule.  Uses the same writer as canonical_smiles
// with shuffled atom ranks, so parse(render_random_smiles(m)) always has the
// same canonical key as m.
std::string render_random_smiles(const Molecule& mol, std::mt19937_64& rng);

}  // namespace molopt::chem

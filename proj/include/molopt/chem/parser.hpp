//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <string_view>

#include "molopt/chem/molecule.hpp"
#include "molopt/chem/tokenizer.hpp"

namespace molopt::chem {

// Parses a SMILES string into a molecular graph and assigns implicit
// hydrogens by the organic-subset valence rules (B:3, C:4, N:3, O:2,
// P:3/5, S:2/4/6, halogens:1).
//
// Aromaticity is taken from lowercase symbols; an unspecified bond between
// two aromatic atoms is aromatic. Aromatic atoms must sit on a cycle of
// aromatic bonds (>= 2 incident aromatic bonds). Implicit hydrogens on
// aromatic atoms follow the Daylight convention for this subset: aromatic C
// with two ring neighbors gets one H, everything else aromatic gets none.
//
// Stereochemistry (/ \ @), wildcard atoms and atom maps are rejected with
// UnsupportedFeature rather than silently dropped.
Molecule parse_smiles(std::string_view text);

// Convenience: parse and return true, or false when a ParseError fires.
bool try_parse_smiles(std::string_view text, Molecule* out);

}  // namespace molopt::chem

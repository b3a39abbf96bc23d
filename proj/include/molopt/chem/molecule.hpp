//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <string>
#include <utility>
#include <vector>

namespace molopt::chem {

struct Atom {
  std::string element;     // atomic symbol, e.g. "C", "Cl"
  bool aromatic = false;
  int formal_charge = 0;
  int explicit_h = -1;     // bracket H count; -1 means "unset" (organic subset)
  int implicit_h = 0;      // assigned by the parser; 0 for bracket atoms
  int isotope = 0;         // mass number; 0 means unspecified

  int total_h() const { return implicit_h + (explicit_h > 0 ? explicit_h : 0); }
};

enum class BondOrder : int { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::Single;

  int other(int atom) const { return atom == a ? b : a; }
};

// Immutable molecular graph. Built by parse_smiles(); all downstream
// operations are pure functions over it, so sharing across threads is safe.
class Molecule {
 public:
  Molecule() = default;
  Molecule(std::vector<Atom> atoms, std::vector<Bond> bonds);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  const Atom& atom(int i) const { return atoms_[static_cast<std::size_t>(i)]; }
  const Bond& bond(int i) const { return bonds_[static_cast<std::size_t>(i)]; }
  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }

  // Incident (neighbor atom, bond index) pairs, in insertion order.
  const std::vector<std::pair<int, int>>& neighbors(int atom) const {
    return adjacency_[static_cast<std::size_t>(atom)];
  }
  int degree(int atom) const {
    return static_cast<int>(adjacency_[static_cast<std::size_t>(atom)].size());
  }
  bool in_ring(int atom) const { return atom_in_ring_[static_cast<std::size_t>(atom)]; }
  bool bond_in_ring(int bond) const { return bond_in_ring_[static_cast<std::size_t>(bond)]; }

  // Connected components as atom index lists, ordered by smallest member.
  std::vector<std::vector<int>> fragments() const;

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<std::pair<int, int>>> adjacency_;
  std::vector<bool> atom_in_ring_;
  std::vector<bool> bond_in_ring_;
};

}  // namespace molopt::chem

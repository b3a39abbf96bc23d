//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "molopt/chem/molecule.hpp"

#include <algorithm>
#include <functional>

namespace molopt::chem {

namespace {

// Marks bridge bonds via iterative DFS low-link; every non-bridge bond lies
// on a cycle, and an atom is "in a ring" iff it touches a non-bridge bond.
void find_ring_bonds(int n_atoms,
                     const std::vector<std::vector<std::pair<int, int>>>& adj,
                     std::vector<bool>& bond_in_ring) {
  std::vector<int> disc(static_cast<std::size_t>(n_atoms), -1);
  std::vector<int> low(static_cast<std::size_t>(n_atoms), 0);
  int timer = 0;

  struct Frame {
    int atom;
    int parent_bond;
    std::size_t next_edge;
  };
  std::vector<Frame> stack;

  for (int root = 0; root < n_atoms; ++root) {
    if (disc[static_cast<std::size_t>(root)] != -1) continue;
    stack.push_back({root, -1, 0});
    disc[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& edges = adj[static_cast<std::size_t>(f.atom)];
      if (f.next_edge < edges.size()) {
        auto [nbr, bond] = edges[f.next_edge++];
        if (bond == f.parent_bond) continue;
        if (disc[static_cast<std::size_t>(nbr)] == -1) {
          disc[static_cast<std::size_t>(nbr)] = low[static_cast<std::size_t>(nbr)] = timer++;
          stack.push_back({nbr, bond, 0});
        } else {
          low[static_cast<std::size_t>(f.atom)] =
              std::min(low[static_cast<std::size_t>(f.atom)], disc[static_cast<std::size_t>(nbr)]);
          bond_in_ring[static_cast<std::size_t>(bond)] = true;  // back edge
        }
      } else {
        const int atom = f.atom;
        const int parent_bond = f.parent_bond;
        stack.pop_back();
        if (!stack.empty()) {
          const int parent = stack.back().atom;
          low[static_cast<std::size_t>(parent)] =
              std::min(low[static_cast<std::size_t>(parent)], low[static_cast<std::size_t>(atom)]);
          if (low[static_cast<std::size_t>(atom)] <= disc[static_cast<std::size_t>(parent)])
            bond_in_ring[static_cast<std::size_t>(parent_bond)] = true;  // tree edge on a cycle
        }
      }
    }
  }
}

}  // namespace

Molecule::Molecule(std::vector<Atom> atoms, std::vector<Bond> bonds)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
  adjacency_.resize(atoms_.size());
  for (int bi = 0; bi < static_cast<int>(bonds_.size()); ++bi) {
    const Bond& b = bonds_[static_cast<std::size_t>(bi)];
    adjacency_[static_cast<std::size_t>(b.a)].emplace_back(b.b, bi);
    adjacency_[static_cast<std::size_t>(b.b)].emplace_back(b.a, bi);
  }
  bond_in_ring_.assign(bonds_.size(), false);
  find_ring_bonds(atom_count(), adjacency_, bond_in_ring_);
  atom_in_ring_.assign(atoms_.size(), false);
  for (int bi = 0; bi < static_cast<int>(bonds_.size()); ++bi) {
    if (bond_in_ring_[static_cast<std::size_t>(bi)]) {
      atom_in_ring_[static_cast<std::size_t>(bonds_[static_cast<std::size_t>(bi)].a)] = true;
      atom_in_ring_[static_cast<std::size_t>(bonds_[static_cast<std::size_t>(bi)].b)] = true;
    }
  }
}

std::vector<std::vector<int>> Molecule::fragments() const {
  std::vector<std::vector<int>> result;
  std::vector<bool> seen(atoms_.size(), false);
  for (int start = 0; start < atom_count(); ++start) {
    if (seen[static_cast<std::size_t>(start)]) continue;
    std::vector<int> frag;
    std::vector<int> stack{start};
    seen[static_cast<std::size_t>(start)] = true;
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      frag.push_back(a);
      for (auto [nbr, bond] : neighbors(a)) {
        (void)bond;
        if (!seen[static_cast<std::size_t>(nbr)]) {
          seen[static_cast<std::size_t>(nbr)] = true;
          stack.push_back(nbr);
        }
      }
    }
    std::sort(frag.begin(), frag.end());
    result.push_back(std::move(frag));
  }
  return result;
}

}  // namespace molopt::chem

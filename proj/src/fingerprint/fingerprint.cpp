//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "molopt/fingerprint.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "molopt/chem/elements.hpp"
#include "molopt/common.hpp"

namespace molopt::fp {

namespace {

using chem::BondOrder;
using chem::Molecule;

std::uint64_t initial_identifier(const Molecule& mol, int i) {
  const chem::Atom& a = mol.atom(i);
  std::uint64_t h = kFnvOffset;
  h = fnv1a64_i32(chem::element_by_symbol(a.element)->z, h);
  h = fnv1a64_i32(mol.degree(i), h);
  h = fnv1a64_i32(a.total_h(), h);
  h = fnv1a64_i32(a.formal_charge, h);
  h = fnv1a64_i32(mol.in_ring(i) ? 1 : 0, h);
  h = fnv1a64_i32(a.aromatic ? 1 : 0, h);
  return h;
}

int bond_code(BondOrder order) { return static_cast<int>(order); }

}  // namespace

Fingerprint ecfp(const Molecule& mol, int radius, std::uint32_t width) {
  const int n = mol.atom_count();

  // Environment atom sets are the dedup key: two environments describing the
  // same set of atoms are the same substructure, and the earlier / smaller
  // identifier wins.
  std::map<std::vector<int>, std::pair<int, std::uint64_t>> kept;

  std::vector<std::uint64_t> ids(static_cast<std::size_t>(n));
  std::vector<std::set<int>> covered(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    ids[static_cast<std::size_t>(i)] = initial_identifier(mol, i);
    covered[static_cast<std::size_t>(i)] = {i};
    std::vector<int> key = {i};
    kept.emplace(std::move(key), std::make_pair(0, ids[static_cast<std::size_t>(i)]));
  }

  for (int r = 1; r <= radius; ++r) {
    std::vector<std::uint64_t> next_ids(static_cast<std::size_t>(n));
    std::vector<std::set<int>> next_covered = covered;
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<int, std::uint64_t>> env;
      for (const auto& [nbr, bond] : mol.neighbors(i)) {
        env.emplace_back(bond_code(mol.bond(bond).order), ids[static_cast<std::size_t>(nbr)]);
        next_covered[static_cast<std::size_t>(i)].insert(
            covered[static_cast<std::size_t>(nbr)].begin(),
            covered[static_cast<std::size_t>(nbr)].end());
      }
      std::sort(env.begin(), env.end());
      std::uint64_t h = fnv1a64_i32(r);
      h = fnv1a64_u64(ids[static_cast<std::size_t>(i)], h);
      for (const auto& [code, id] : env) {
        h = fnv1a64_i32(code, h);
        h = fnv1a64_u64(id, h);
      }
      next_ids[static_cast<std::size_t>(i)] = h;
    }
    ids = std::move(next_ids);
    covered = std::move(next_covered);

    for (int i = 0; i < n; ++i) {
      std::vector<int> key(covered[static_cast<std::size_t>(i)].begin(),
                           covered[static_cast<std::size_t>(i)].end());
      const std::pair<int, std::uint64_t> candidate{r, ids[static_cast<std::size_t>(i)]};
      auto [it, inserted] = kept.emplace(std::move(key), candidate);
      if (!inserted && candidate < it->second) it->second = candidate;
    }
  }

  Fingerprint out;
  out.width = width;
  std::set<std::uint32_t> bits;
  for (const auto& [atoms, entry] : kept)
    bits.insert(static_cast<std::uint32_t>(entry.second % width));
  out.bits.assign(bits.begin(), bits.end());
  return out;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.width != b.width)
    throw ValidationError("fingerprint width mismatch: " + std::to_string(a.width) +
                          " vs " + std::to_string(b.width));
  if (a.bits.empty() && b.bits.empty()) return 0.0;
  std::size_t common = 0, ia = 0, ib = 0;
  while (ia < a.bits.size() && ib < b.bits.size()) {
    if (a.bits[ia] == b.bits[ib]) {
      ++common;
      ++ia;
      ++ib;
    } else if (a.bits[ia] < b.bits[ib]) {
      ++ia;
    } else {
      ++ib;
    }
  }
  const std::size_t unions = a.bits.size() + b.bits.size() - common;
  return static_cast<double>(common) / static_cast<double>(unions);
}

}  // namespace molopt::fp

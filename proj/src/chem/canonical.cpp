//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "molopt/chem/canonical.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "molopt/chem/elements.hpp"
#include "molopt/common.hpp"

namespace molopt::chem {

namespace {

int bond_code(BondOrder order) { return static_cast<int>(order); }

// ---------------------------------------------------------------------------
// Atom ranking by iterative neighbourhood refinement.
// ---------------------------------------------------------------------------

std::vector<int> ranks_from_hashes(const std::vector<std::uint64_t>& hashes) {
  std::vector<std::uint64_t> sorted = hashes;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> ranks(hashes.size());
  for (std::size_t i = 0; i < hashes.size(); ++i) {
    ranks[i] = static_cast<int>(
        std::lower_bound(sorted.begin(), sorted.end(), hashes[i]) - sorted.begin());
  }
  return ranks;
}

int distinct_count(const std::vector<int>& ranks) {
  std::set<int> s(ranks.begin(), ranks.end());
  return static_cast<int>(s.size());
}

std::vector<int> initial_ranks(const Molecule& mol) {
  std::vector<std::uint64_t> hashes(static_cast<std::size_t>(mol.atom_count()));
  for (int i = 0; i < mol.atom_count(); ++i) {
    const Atom& a = mol.atom(i);
    std::uint64_t h = kFnvOffset;
    h = fnv1a64_i32(element_by_symbol(a.element)->z, h);
    h = fnv1a64_i32(mol.degree(i), h);
    h = fnv1a64_i32(a.formal_charge, h);
    h = fnv1a64_i32(a.total_h(), h);
    h = fnv1a64_i32(a.aromatic ? 1 : 0, h);
    h = fnv1a64_i32(a.isotope, h);
    hashes[static_cast<std::size_t>(i)] = h;
  }
  return ranks_from_hashes(hashes);
}

// One refinement pass folds each atom's rank with its sorted neighbour
// (bond, rank) pairs; iterates until the number of distinct ranks is stable.
std::vector<int> refine_ranks(const Molecule& mol, std::vector<int> ranks) {
  const int n = mol.atom_count();
  // Normalize to order-compressed values in [0, #distinct): tie-break
  // promotion feeds ranks up to 2n+1, and callers index arrays by rank.
  {
    std::vector<std::uint64_t> keys(ranks.begin(), ranks.end());
    ranks = ranks_from_hashes(keys);
  }
  int distinct = distinct_count(ranks);
  for (int round = 0; round < 2 * n + 2 && distinct < n; ++round) {
    std::vector<std::uint64_t> hashes(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<int, int>> env;
      for (const auto& [nbr, bond] : mol.neighbors(i))
        env.emplace_back(bond_code(mol.bond(bond).order), ranks[static_cast<std::size_t>(nbr)]);
      std::sort(env.begin(), env.end());
      std::uint64_t h = fnv1a64_i32(ranks[static_cast<std::size_t>(i)]);
      for (const auto& [code, r] : env) {
        h = fnv1a64_i32(code, h);
        h = fnv1a64_i32(r, h);
      }
      hashes[static_cast<std::size_t>(i)] = h;
    }
    std::vector<int> next = ranks_from_hashes(hashes);
    const int next_distinct = distinct_count(next);
    if (next_distinct <= distinct) break;
    ranks = std::move(next);
    distinct = next_distinct;
  }
  return ranks;
}

// ---------------------------------------------------------------------------
// SMILES rendering for one fragment given injective atom ranks.
// ---------------------------------------------------------------------------

bool in_organic_subset(const std::string& element) {
  return element == "B" || element == "C" || element == "N" || element == "O" ||
         element == "P" || element == "S" || element == "F" || element == "Cl" ||
         element == "Br" || element == "I";
}

std::string atom_token(const Atom& a) {
  std::string symbol = a.element;
  if (a.aromatic)
    symbol[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(symbol[0])));

  const bool bracket = a.isotope != 0 || a.formal_charge != 0 || a.explicit_h >= 0 ||
                       !in_organic_subset(a.element);
  if (!bracket) return symbol;

  std::string out = "[";
  if (a.isotope != 0) out += std::to_string(a.isotope);
  out += symbol;
  if (a.explicit_h == 1) {
    out += "H";
  } else if (a.explicit_h > 1) {
    out += "H" + std::to_string(a.explicit_h);
  }
  if (a.formal_charge != 0) {
    out += a.formal_charge > 0 ? '+' : '-';
    const int magnitude = std::abs(a.formal_charge);
    if (magnitude > 1) out += std::to_string(magnitude);
  }
  out += "]";
  return out;
}

// Bond symbol preceding an atom or ring-closure digit.  Single and aromatic
// bonds are implicit except where the default would flip them: a single bond
// between two aromatic atoms needs '-', an aromatic bond not between two
// aromatic atoms needs ':'.
std::string bond_token(const Molecule& mol, const Bond& b) {
  const bool both_aromatic =
      mol.atom(b.a).aromatic && mol.atom(b.b).aromatic;
  switch (b.order) {
    case BondOrder::Single: return both_aromatic ? "-" : "";
    case BondOrder::Double: return "=";
    case BondOrder::Triple: return "#";
    case BondOrder::Aromatic: return both_aromatic ? "" : ":";
  }
  return "";
}

std::string ring_digit_token(int digit) {
  if (digit < 10) return std::to_string(digit);
  return "%" + std::to_string(digit);  // always two digits: allocator stays below 100
}

std::string render_fragment(const Molecule& mol, const std::vector<int>& rank, int start) {
  const int n = mol.atom_count();

  // Pass 1: depth-first traversal in rank order.  Classifies every fragment
  // edge as tree or ring-closure; closures record which endpoint was reached
  // first (where the digit opens).
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<std::pair<int, int>>> children(static_cast<std::size_t>(n));
  std::vector<char> edge_state(static_cast<std::size_t>(mol.bond_count()), 0);  // 0 new, 1 tree, 2 closure
  struct Closure {
    int open_atom = -1;
    int close_atom = -1;
    int digit = -1;
  };
  std::vector<Closure> closure(static_cast<std::size_t>(mol.bond_count()));
  std::vector<std::vector<int>> opens_at(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> closes_at(static_cast<std::size_t>(n));

  std::function<void(int, int)> walk = [&](int u, int parent_bond) {
    visited[static_cast<std::size_t>(u)] = 1;
    auto nbrs = mol.neighbors(u);
    std::sort(nbrs.begin(), nbrs.end(), [&](const auto& x, const auto& y) {
      return rank[static_cast<std::size_t>(x.first)] < rank[static_cast<std::size_t>(y.first)];
    });
    for (const auto& [v, b] : nbrs) {
      if (b == parent_bond) continue;
      if (!visited[static_cast<std::size_t>(v)]) {
        edge_state[static_cast<std::size_t>(b)] = 1;
        children[static_cast<std::size_t>(u)].push_back({v, b});
        walk(v, b);
      } else if (edge_state[static_cast<std::size_t>(b)] == 0) {
        edge_state[static_cast<std::size_t>(b)] = 2;
        closure[static_cast<std::size_t>(b)] = {v, u, -1};
        opens_at[static_cast<std::size_t>(v)].push_back(b);
        closes_at[static_cast<std::size_t>(u)].push_back(b);
      }
    }
  };
  walk(start, -1);

  // Pass 2: emit the string over the tree.  Ring digits are allocated
  // smallest-free at the opening site and released at the closing site; the
  // bond symbol of a closure bond is written at the opening only.
  std::set<int> free_digits;
  for (int d = 1; d < 100; ++d) free_digits.insert(d);

  std::string out;
  std::function<void(int)> emit = [&](int u) {
    out += atom_token(mol.atom(u));

    auto& closes = closes_at[static_cast<std::size_t>(u)];
    std::sort(closes.begin(), closes.end(), [&](int x, int y) {
      return closure[static_cast<std::size_t>(x)].digit < closure[static_cast<std::size_t>(y)].digit;
    });
    for (int b : closes) {
      const int digit = closure[static_cast<std::size_t>(b)].digit;
      out += ring_digit_token(digit);
      free_digits.insert(digit);
    }

    auto& opens = opens_at[static_cast<std::size_t>(u)];
    std::sort(opens.begin(), opens.end(), [&](int x, int y) {
      return rank[static_cast<std::size_t>(closure[static_cast<std::size_t>(x)].close_atom)] <
             rank[static_cast<std::size_t>(closure[static_cast<std::size_t>(y)].close_atom)];
    });
    for (int b : opens) {
      if (free_digits.empty())
        throw Error("ring closure digits exhausted while writing SMILES");
      const int digit = *free_digits.begin();
      free_digits.erase(free_digits.begin());
      closure[static_cast<std::size_t>(b)].digit = digit;
      out += bond_token(mol, mol.bond(b));
      out += ring_digit_token(digit);
    }

    const auto& kids = children[static_cast<std::size_t>(u)];
    for (std::size_t k = 0; k < kids.size(); ++k) {
      const auto& [v, b] = kids[k];
      const bool last = k + 1 == kids.size();
      if (!last) out += "(";
      out += bond_token(mol, mol.bond(b));
      emit(v);
      if (!last) out += ")";
    }
  };
  emit(start);
  return out;
}

int min_rank_atom(const std::vector<int>& fragment, const std::vector<int>& rank) {
  int best = fragment.front();
  for (int a : fragment)
    if (rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(best)]) best = a;
  return best;
}

// Canonical rendering of one fragment: resolve rank ties by promoting each
// member of the smallest tied class in turn, re-refining, and keeping the
// lexicographically smallest complete rendering.
class FragmentCanonicalizer {
 public:
  FragmentCanonicalizer(const Molecule& mol, const std::vector<int>& fragment)
      : mol_(mol), fragment_(fragment) {}

  std::string run(std::vector<int> ranks) {
    explore(std::move(ranks));
    return best_;
  }

 private:
  void explore(std::vector<int> ranks) {
    if (budget_ <= 0) return;
    ranks = refine_ranks(mol_, std::move(ranks));

    // Smallest rank shared by two or more atoms of this fragment.
    int tied_rank = -1;
    std::vector<int> seen_counts(ranks.size(), 0);
    for (int a : fragment_) ++seen_counts[static_cast<std::size_t>(ranks[static_cast<std::size_t>(a)])];
    for (int a : fragment_) {
      const int r = ranks[static_cast<std::size_t>(a)];
      if (seen_counts[static_cast<std::size_t>(r)] > 1 && (tied_rank < 0 || r < tied_rank))
        tied_rank = r;
    }

    if (tied_rank < 0) {
      --budget_;
      std::string s = render_fragment(mol_, ranks, min_rank_atom(fragment_, ranks));
      if (best_.empty() || s < best_) best_ = std::move(s);
      return;
    }

    std::vector<int> tied;
    for (int a : fragment_)
      if (ranks[static_cast<std::size_t>(a)] == tied_rank) tied.push_back(a);
    std::sort(tied.begin(), tied.end());
    for (int a : tied) {
      if (budget_ <= 0) return;
      std::vector<int> promoted(ranks.size());
      for (std::size_t i = 0; i < ranks.size(); ++i)
        promoted[i] = 2 * ranks[i] + (static_cast<int>(i) == a ? 0 : 1);
      explore(std::move(promoted));
    }
  }

  const Molecule& mol_;
  const std::vector<int>& fragment_;
  int budget_ = 64;
  std::string best_;
};

}  // namespace

std::string canonical_smiles(const Molecule& mol) {
  if (mol.atom_count() == 0) return "";
  const std::vector<int> base_ranks = refine_ranks(mol, initial_ranks(mol));

  std::vector<std::string> parts;
  for (const auto& fragment : mol.fragments())
    parts.push_back(FragmentCanonicalizer(mol, fragment).run(base_ranks));
  std::sort(parts.begin(), parts.end());

  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ".";
    out += parts[i];
  }
  return out;
}

std::string render_random_smiles(const Molecule& mol, std::mt19937_64& rng) {
  if (mol.atom_count() == 0) return "";
  const int n = mol.atom_count();

  // Random injective ranks via Fisher-Yates (std::shuffle ordering is
  // implementation-defined; this keeps renderings reproducible everywhere).
  std::vector<int> ranks(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ranks[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(ranks[static_cast<std::size_t>(i)], ranks[static_cast<std::size_t>(j)]);
  }

  std::vector<std::string> parts;
  for (const auto& fragment : mol.fragments())
    parts.push_back(render_fragment(mol, ranks, min_rank_atom(fragment, ranks)));
  for (std::size_t i = parts.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(parts[i - 1], parts[j]);
  }

  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ".";
    out += parts[i];
  }
  return out;
}

}  // namespace molopt::chem

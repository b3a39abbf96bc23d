//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "molopt/chem/parser.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "molopt/chem/elements.hpp"

namespace molopt::chem {

namespace {

[[noreturn]] void fail(ParseErrorKind kind, int pos, const std::string& what) {
  throw ParseError(kind, pos, what + " at position " + std::to_string(pos));
}

bool is_aromatic_organic(std::string_view s) {
  return s == "b" || s == "c" || s == "n" || s == "o" || s == "p" || s == "s";
}

std::string upcase_symbol(std::string_view s) {
  std::string out(s);
  out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

// Parses the inside of "[...]": [isotope? symbol H-count? charge?].
Atom parse_bracket_atom(const Token& tok) {
  const std::string& t = tok.text;
  std::size_t i = 1;                      // skip '['
  const std::size_t end = t.size() - 1;   // index of ']'
  auto bad = [&](const std::string& what) -> void {
    fail(ParseErrorKind::UnknownCharacter, tok.position + static_cast<int>(i), what);
  };

  Atom atom;
  atom.explicit_h = 0;

  while (i < end && std::isdigit(static_cast<unsigned char>(t[i]))) {
    atom.isotope = atom.isotope * 10 + (t[i] - '0');
    ++i;
  }
  if (i >= end) bad("bracket atom lacks an element symbol");

  if (std::islower(static_cast<unsigned char>(t[i]))) {
    std::string sym(1, t[i]);
    if (!is_aromatic_organic(sym))
      fail(ParseErrorKind::UnsupportedFeature, tok.position + static_cast<int>(i),
           "unsupported aromatic symbol '" + sym + "'");
    atom.element = upcase_symbol(sym);
    atom.aromatic = true;
    ++i;
  } else if (std::isupper(static_cast<unsigned char>(t[i]))) {
    std::string sym(1, t[i]);
    ++i;
    // "Hx" inside a bracket is hydrogen-count syntax, not an element suffix,
    // except for genuine two-letter symbols (He, Hf, Hg, Ho).
    if (i < end && std::islower(static_cast<unsigned char>(t[i])) &&
        is_known_element(sym + t[i])) {
      sym += t[i];
      ++i;
    }
    if (!is_known_element(sym)) bad("unknown element '" + sym + "'");
    atom.element = sym;
  } else if (t[i] == '*') {
    fail(ParseErrorKind::UnsupportedFeature, tok.position + static_cast<int>(i),
         "wildcard atoms are not supported");
  } else {
    bad("bracket atom lacks an element symbol");
  }

  if (i < end && t[i] == '@')
    fail(ParseErrorKind::UnsupportedFeature, tok.position + static_cast<int>(i),
         "stereochemistry markers are not supported");

  if (i < end && t[i] == 'H') {
    ++i;
    if (i < end && std::isdigit(static_cast<unsigned char>(t[i]))) {
      atom.explicit_h = 0;
      while (i < end && std::isdigit(static_cast<unsigned char>(t[i]))) {
        atom.explicit_h = atom.explicit_h * 10 + (t[i] - '0');
        ++i;
      }
    } else {
      atom.explicit_h = 1;
    }
  }

  if (i < end && (t[i] == '+' || t[i] == '-')) {
    const char sign_char = t[i];
    const int sign = sign_char == '+' ? 1 : -1;
    ++i;
    int magnitude = 1;
    if (i < end && std::isdigit(static_cast<unsigned char>(t[i]))) {
      magnitude = 0;
      while (i < end && std::isdigit(static_cast<unsigned char>(t[i]))) {
        magnitude = magnitude * 10 + (t[i] - '0');
        ++i;
      }
    } else {
      while (i < end && t[i] == sign_char) {
        ++magnitude;
        ++i;
      }
    }
    atom.formal_charge = sign * magnitude;
  }

  if (i < end) {
    if (t[i] == '@')
      fail(ParseErrorKind::UnsupportedFeature, tok.position + static_cast<int>(i),
           "stereochemistry markers are not supported");
    if (t[i] == ':')
      fail(ParseErrorKind::UnsupportedFeature, tok.position + static_cast<int>(i),
           "atom maps are not supported");
    bad(std::string("unexpected '") + t[i] + "' in bracket atom");
  }
  return atom;
}

Atom parse_organic_atom(const Token& tok) {
  Atom atom;
  if (is_aromatic_organic(tok.text)) {
    atom.element = upcase_symbol(tok.text);
    atom.aromatic = true;
  } else {
    atom.element = tok.text;
  }
  return atom;
}

// Allowed valences for organic-subset implicit-H assignment.
const std::vector<int>& allowed_valences(const std::string& element) {
  static const std::map<std::string, std::vector<int>> table = {
      {"B", {3}},  {"C", {4}},       {"N", {3}},       {"O", {2}},
      {"P", {3, 5}}, {"S", {2, 4, 6}}, {"F", {1}},     {"Cl", {1}},
      {"Br", {1}}, {"I", {1}},
  };
  static const std::vector<int> empty;
  auto it = table.find(element);
  return it == table.end() ? empty : it->second;
}

int bond_order_value(BondOrder order) {
  switch (order) {
    case BondOrder::Single: return 1;
    case BondOrder::Double: return 2;
    case BondOrder::Triple: return 3;
    case BondOrder::Aromatic: return 1;  // handled separately for aromatic atoms
  }
  return 1;
}

struct RingOpening {
  int atom;
  std::optional<BondOrder> order;
  int position;
};

}  // namespace

Molecule parse_smiles(std::string_view text) {
  const std::vector<Token> tokens = tokenize(text);

  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::set<std::pair<int, int>> bond_pairs;
  std::vector<int> branch_stack;
  std::map<int, RingOpening> open_rings;
  int prev_atom = -1;
  std::optional<BondOrder> pending;
  int pending_pos = 0;
  bool after_dot = false;

  auto add_bond = [&](int a, int b, std::optional<BondOrder> order, int pos) {
    if (a == b)
      fail(ParseErrorKind::DuplicateBond, pos, "ring closure bonds an atom to itself");
    auto key = std::minmax(a, b);
    if (!bond_pairs.insert({key.first, key.second}).second)
      fail(ParseErrorKind::DuplicateBond, pos, "duplicate bond between atoms");
    BondOrder o;
    if (order) {
      o = *order;
    } else {
      const bool both_aromatic = atoms[static_cast<std::size_t>(a)].aromatic &&
                                 atoms[static_cast<std::size_t>(b)].aromatic;
      o = both_aromatic ? BondOrder::Aromatic : BondOrder::Single;
    }
    bonds.push_back({a, b, o});
  };

  for (const Token& tok : tokens) {
    switch (tok.kind) {
      case TokenKind::AtomOrganic:
      case TokenKind::AtomBracket: {
        Atom atom = tok.kind == TokenKind::AtomBracket ? parse_bracket_atom(tok)
                                                       : parse_organic_atom(tok);
        const int idx = static_cast<int>(atoms.size());
        atoms.push_back(std::move(atom));
        if (prev_atom >= 0 && !after_dot) {
          add_bond(prev_atom, idx, pending, tok.position);
        } else if (pending) {
          fail(ParseErrorKind::DanglingBond, pending_pos,
               "bond symbol with no preceding atom");
        }
        pending.reset();
        after_dot = false;
        prev_atom = idx;
        break;
      }
      case TokenKind::Bond: {
        const char c = tok.text[0];
        if (c == '/' || c == '\\')
          fail(ParseErrorKind::UnsupportedFeature, tok.position,
               "stereo bond markers are not supported");
        if (pending)
          fail(ParseErrorKind::DanglingBond, tok.position, "consecutive bond symbols");
        if (prev_atom < 0 || after_dot)
          fail(ParseErrorKind::DanglingBond, tok.position,
               "bond symbol with no preceding atom");
        switch (c) {
          case '-': pending = BondOrder::Single; break;
          case '=': pending = BondOrder::Double; break;
          case '#': pending = BondOrder::Triple; break;
          case ':': pending = BondOrder::Aromatic; break;
          default: fail(ParseErrorKind::UnknownCharacter, tok.position, "bad bond");
        }
        pending_pos = tok.position;
        break;
      }
      case TokenKind::BranchOpen:
        if (prev_atom < 0 || after_dot)
          fail(ParseErrorKind::UnbalancedBranch, tok.position,
               "branch opened with no current atom");
        if (pending)
          fail(ParseErrorKind::DanglingBond, pending_pos,
               "bond symbol before a branch open");
        branch_stack.push_back(prev_atom);
        break;
      case TokenKind::BranchClose:
        if (branch_stack.empty())
          fail(ParseErrorKind::UnbalancedBranch, tok.position,
               "branch closed but none open");
        if (pending)
          fail(ParseErrorKind::DanglingBond, pending_pos,
               "bond symbol before a branch close");
        prev_atom = branch_stack.back();
        branch_stack.pop_back();
        break;
      case TokenKind::RingClosure: {
        if (prev_atom < 0 || after_dot)
          fail(ParseErrorKind::UnmatchedRingClosure, tok.position,
               "ring closure with no current atom");
        const int digit = tok.text[0] == '%' ? std::stoi(tok.text.substr(1))
                                             : tok.text[0] - '0';
        auto it = open_rings.find(digit);
        if (it == open_rings.end()) {
          open_rings[digit] = {prev_atom, pending, tok.position};
        } else {
          RingOpening opening = it->second;
          open_rings.erase(it);
          std::optional<BondOrder> order;
          if (opening.order && pending && *opening.order != *pending)
            fail(ParseErrorKind::UnmatchedRingClosure, tok.position,
                 "ring closure bond order conflicts with its opening");
          order = opening.order ? opening.order : pending;
          add_bond(opening.atom, prev_atom, order, tok.position);
        }
        pending.reset();
        break;
      }
      case TokenKind::Dot:
        if (pending)
          fail(ParseErrorKind::DanglingBond, pending_pos,
               "bond symbol before a fragment separator");
        after_dot = true;
        break;
    }
  }

  if (!open_rings.empty())
    fail(ParseErrorKind::UnmatchedRingClosure, open_rings.begin()->second.position,
         "ring closure digit never paired");
  if (!branch_stack.empty())
    fail(ParseErrorKind::UnbalancedBranch, static_cast<int>(text.size()),
         "branch never closed");
  if (pending)
    fail(ParseErrorKind::DanglingBond, pending_pos, "trailing bond symbol");
  if (after_dot && !tokens.empty())
    fail(ParseErrorKind::UnknownCharacter, static_cast<int>(text.size()),
         "trailing fragment separator");

  // Implicit hydrogen assignment and structural validation.
  std::vector<int> aromatic_bond_count(atoms.size(), 0);
  std::vector<int> bond_sum(atoms.size(), 0);
  for (const Bond& b : bonds) {
    const int v = bond_order_value(b.order);
    bond_sum[static_cast<std::size_t>(b.a)] += v;
    bond_sum[static_cast<std::size_t>(b.b)] += v;
    if (b.order == BondOrder::Aromatic) {
      ++aromatic_bond_count[static_cast<std::size_t>(b.a)];
      ++aromatic_bond_count[static_cast<std::size_t>(b.b)];
    }
  }

  for (int i = 0; i < static_cast<int>(atoms.size()); ++i) {
    Atom& atom = atoms[static_cast<std::size_t>(i)];
    const int sum = bond_sum[static_cast<std::size_t>(i)];

    if (atom.aromatic && aromatic_bond_count[static_cast<std::size_t>(i)] < 2)
      fail(ParseErrorKind::ValenceViolation, i,
           "aromatic atom " + std::to_string(i) + " is not in an aromatic ring");

    if (atom.explicit_h >= 0) {
      atom.implicit_h = 0;  // bracket atoms carry their hydrogens explicitly
      continue;
    }

    if (atom.aromatic) {
      // Daylight convention for this subset: aromatic C with two ring
      // neighbors carries one H; all other aromatic atoms carry none.
      const int max_valence = atom.element == "C" ? 4 : (atom.element == "O" ? 2 : 3);
      if (sum > max_valence)
        fail(ParseErrorKind::ValenceViolation, i,
             "aromatic atom " + std::to_string(i) + " exceeds its valence");
      atom.implicit_h = (atom.element == "C" && sum == 2) ? 1 : 0;
      continue;
    }

    const auto& valences = allowed_valences(atom.element);
    if (valences.empty()) {
      atom.implicit_h = 0;  // not in the organic subset; cannot appear bare anyway
      continue;
    }
    if (atom.formal_charge != 0) {
      // Charged organic-subset atoms must be written in brackets; a bare atom
      // never carries charge, so this is unreachable from the grammar.
      atom.implicit_h = 0;
      continue;
    }
    int assigned = -1;
    for (int v : valences) {
      if (sum <= v) {
        assigned = v - sum;
        break;
      }
    }
    if (assigned < 0)
      fail(ParseErrorKind::ValenceViolation, i,
           "atom " + std::to_string(i) + " (" + atom.element + ") has bond order sum " +
               std::to_string(sum) + " above its maximum valence");
    atom.implicit_h = assigned;
  }

  return Molecule(std::move(atoms), std::move(bonds));
}

bool try_parse_smiles(std::string_view text, Molecule* out) {
  try {
    Molecule mol = parse_smiles(text);
    if (out) *out = std::move(mol);
    return true;
  } catch (const ParseError&) {
    return false;
  }
}

}  // namespace molopt::chem

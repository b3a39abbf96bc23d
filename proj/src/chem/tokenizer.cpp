//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "molopt/chem/tokenizer.hpp"

#include <cctype>

namespace molopt::chem {

const char* to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::UnknownCharacter: return "UnknownCharacter";
    case ParseErrorKind::UnterminatedBracket: return "UnterminatedBracket";
    case ParseErrorKind::UnmatchedRingClosure: return "UnmatchedRingClosure";
    case ParseErrorKind::UnbalancedBranch: return "UnbalancedBranch";
    case ParseErrorKind::ValenceViolation: return "ValenceViolation";
    case ParseErrorKind::UnsupportedFeature: return "UnsupportedFeature";
    case ParseErrorKind::DanglingBond: return "DanglingBond";
    case ParseErrorKind::DuplicateBond: return "DuplicateBond";
  }
  return "ParseError";
}

namespace {

[[noreturn]] void fail(ParseErrorKind kind, int pos, const std::string& what) {
  throw ParseError(kind, pos, what + " at position " + std::to_string(pos));
}

bool is_bond_char(char c) {
  return c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\';
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  if (text.empty())
    fail(ParseErrorKind::UnknownCharacter, 0, "empty SMILES string");

  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto push = [&](TokenKind kind, std::size_t begin, std::size_t len) {
    tokens.push_back(
        {kind, std::string(text.substr(begin, len)), static_cast<int>(begin)});
  };

  while (i < n) {
    const char c = text[i];
    const int pos = static_cast<int>(i);
    if (static_cast<unsigned char>(c) >= 0x80)
      fail(ParseErrorKind::UnknownCharacter, pos, "non-ASCII byte");

    if (c == '[') {
      std::size_t close = text.find(']', i + 1);
      if (close == std::string_view::npos)
        fail(ParseErrorKind::UnterminatedBracket, pos, "unterminated bracket");
      push(TokenKind::AtomBracket, i, close - i + 1);
      i = close + 1;
      continue;
    }
    if (c == '(') { push(TokenKind::BranchOpen, i, 1); ++i; continue; }
    if (c == ')') { push(TokenKind::BranchClose, i, 1); ++i; continue; }
    if (c == '.') { push(TokenKind::Dot, i, 1); ++i; continue; }
    if (is_bond_char(c)) { push(TokenKind::Bond, i, 1); ++i; continue; }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      push(TokenKind::RingClosure, i, 1);
      ++i;
      continue;
    }
    if (c == '%') {
      if (i + 2 >= n || !std::isdigit(static_cast<unsigned char>(text[i + 1])) ||
          !std::isdigit(static_cast<unsigned char>(text[i + 2])))
        fail(ParseErrorKind::UnknownCharacter, pos,
             "'%' must be followed by two digits");
      push(TokenKind::RingClosure, i, 3);
      i += 3;
      continue;
    }

    // Organic-subset atoms. Two-letter symbols (Cl, Br) take both letters.
    switch (c) {
      case 'C':
        if (i + 1 < n && text[i + 1] == 'l') {
          push(TokenKind::AtomOrganic, i, 2);
          i += 2;
        } else {
          push(TokenKind::AtomOrganic, i, 1);
          ++i;
        }
        continue;
      case 'B':
        if (i + 1 < n && text[i + 1] == 'r') {
          push(TokenKind::AtomOrganic, i, 2);
          i += 2;
        } else {
          push(TokenKind::AtomOrganic, i, 1);
          ++i;
        }
        continue;
      case 'N': case 'O': case 'P': case 'S': case 'F': case 'I':
      case 'b': case 'c': case 'n': case 'o': case 'p': case 's':
        push(TokenKind::AtomOrganic, i, 1);
        ++i;
        continue;
      default:
        fail(ParseErrorKind::UnknownCharacter, pos,
             std::string("unknown character '") + c + "'");
    }
  }
  return tokens;
}

}  // namespace molopt::chem

//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "molopt/common.hpp"

namespace molopt::chem {

enum class TokenKind {
  AtomOrganic,   // bare organic-subset atom: C, N, O, ..., Cl, Br, c, n, ...
  AtomBracket,   // full bracket expression "[...]", brackets included
  Bond,          // - = # : / '\'  (stereo slashes are rejected later, by the parser)
  BranchOpen,    // (
  BranchClose,   // )
  RingClosure,   // single digit or %NN
  Dot,           // fragment separator
};

struct Token {
  TokenKind kind;
  std::string text;  // exact source substring
  int position;      // byte offset into the input
};

enum class ParseErrorKind {
  UnknownCharacter,
  UnterminatedBracket,
  UnmatchedRingClosure,
  UnbalancedBranch,
  ValenceViolation,
  UnsupportedFeature,
  DanglingBond,
  DuplicateBond,
};

class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, int position, const std::string& message)
      : Error(message), kind_(kind), position_(position) {}
  ParseErrorKind kind() const { return kind_; }
  int position() const { return position_; }

 private:
  ParseErrorKind kind_;
  int position_;
};

const char* to_string(ParseErrorKind kind);

// Splits a SMILES string into tokens. Lossless: concatenating the token
// texts in order reproduces the input. Purely lexical — bracket contents and
// syntax (branch balance, ring pairing) are the parser's business.
std::vector<Token> tokenize(std::string_view text);

}  // namespace molopt::chem

//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace molopt::chem {

struct ElementInfo {
  const char* symbol;
  int z;
  double weight;  // IUPAC 2021 standard atomic weight (abridged).
};

// Lookup by symbol ("Cl") or atomic number. Returns nullptr when unknown.
const ElementInfo* element_by_symbol(std::string_view symbol);
const ElementInfo* element_by_z(int z);

inline bool is_known_element(std::string_view symbol) {
  return element_by_symbol(symbol) != nullptr;
}

}  // namespace molopt::chem

//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
// Atomic-contribution LogP (Wildman & Crippen scheme).  Each heavy atom is
// matched against an ordered list of structural classes — first match wins —
// and hydrogens are classed by the atom that carries them.  The class tests
// below transcribe the published SMARTS definitions into explicit graph
// predicates over our Molecule type.
//
#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "molopt/chem/elements.hpp"
#include "molopt/descriptors.hpp"

namespace molopt::desc {

namespace {

using chem::Atom;
using chem::Bond;
using chem::BondOrder;
using chem::Molecule;

// Contribution values per class.
constexpr double kC1 = 0.1441, kC2 = 0.0000, kC3 = -0.2035, kC4 = -0.2051;
constexpr double kC5 = -0.2783, kC6 = 0.1551, kC7 = 0.0017, kC8 = 0.08452;
constexpr double kC9 = -0.1444, kC10 = -0.0516, kC11 = 0.1193, kC12 = -0.0967;
constexpr double kC13 = -0.5443, kC14 = 0.0000, kC15 = 0.2450, kC16 = 0.1980;
constexpr double kC17 = 0.0000, kC18 = 0.1581, kC19 = 0.2955, kC20 = 0.2713;
constexpr double kC21 = 0.1360, kC22 = 0.4619, kC23 = 0.5437, kC24 = 0.1893;
constexpr double kC25 = -0.8186, kC26 = 0.2640, kC27 = 0.2148, kCS = 0.08129;
constexpr double kH1 = 0.1230, kH2 = -0.2677, kH3 = 0.2142, kH4 = 0.2980;
constexpr double kHS = 0.1125;
constexpr double kN1 = -1.0190, kN2 = -0.7096, kN3 = -1.0270, kN4 = -0.5188;
constexpr double kN5 = 0.08387, kN6 = 0.1836, kN7 = -0.3187, kN8 = -0.4458;
constexpr double kN9 = 0.01508, kN10 = -1.9500, kN11 = -0.3239, kN12 = -1.1190;
constexpr double kN13 = -0.3396, kN14 = 0.2887, kNS = -0.4806;
constexpr double kO1 = 0.1552, kO2 = -0.2893, kO3 = -0.0684, kO4 = -0.4195;
constexpr double kO5 = 0.0335, kO6 = -0.3339, kO7 = -1.1890, kO8 = 0.1788;
constexpr double kO9 = -0.1526, kO10 = 0.1129, kO11 = 0.4833, kO12 = -1.3260;
constexpr double kOS = -0.1188;
constexpr double kF = 0.4202, kCl = 0.6895, kBr = 0.8456, kI = 0.8857;
constexpr double kHal = -2.9960;
constexpr double kP = 0.8612;
constexpr double kS1 = 0.6482, kS2 = -0.0024, kS3 = 0.6237;
constexpr double kMe1 = -0.3808, kMe2 = -0.0025;

// A heavy atom together with the bond joining it to the atom being classed.
struct Nbr {
  const Atom* atom;
  BondOrder order;
  int index;
};

std::vector<Nbr> neighbors_of(const Molecule& mol, int i) {
  std::vector<Nbr> out;
  for (const auto& [nbr, bond] : mol.neighbors(i))
    out.push_back({&mol.atom(nbr), mol.bond(bond).order, nbr});
  return out;
}

bool is_halogen(const Atom& a) {
  return a.element == "F" || a.element == "Cl" || a.element == "Br" || a.element == "I";
}

// Aliphatic heteroatoms that pull a neighbouring sp3 carbon into C3/C4.
bool is_polar_aliphatic(const Atom& a) {
  if (a.aromatic) return false;
  return a.element == "N" || a.element == "O" || a.element == "P" ||
         a.element == "S" || is_halogen(a);
}

bool is_common_organic(const Atom& a) {
  return a.element == "C" || a.element == "N" || a.element == "O" ||
         a.element == "P" || a.element == "S" || is_halogen(a);
}

bool sp3_carbon(const Atom& a, const std::vector<Nbr>& nbrs) {
  if (a.aromatic) return false;
  return std::all_of(nbrs.begin(), nbrs.end(),
                     [](const Nbr& n) { return n.order == BondOrder::Single; });
}

CrippenType classify_carbon(const Atom& a, const std::vector<Nbr>& nbrs) {
  const int h = a.total_h();
  auto any = [&](auto pred) { return std::any_of(nbrs.begin(), nbrs.end(), pred); };
  auto all = [&](auto pred) { return std::all_of(nbrs.begin(), nbrs.end(), pred); };

  if (a.aromatic) {
    const int aromatic_bonds = static_cast<int>(std::count_if(
        nbrs.begin(), nbrs.end(), [](const Nbr& n) { return n.order == BondOrder::Aromatic; }));
    if (h == 0 && any([](const Nbr& n) {
          return n.order == BondOrder::Single && !n.atom->aromatic &&
                 !is_common_organic(*n.atom);
        }))
      return {"C13", kC13};
    if (any([](const Nbr& n) { return n.atom->element == "F"; })) return {"C14", kC14};
    if (any([](const Nbr& n) { return n.atom->element == "Cl"; })) return {"C15", kC15};
    if (any([](const Nbr& n) { return n.atom->element == "Br"; })) return {"C16", kC16};
    if (any([](const Nbr& n) { return n.atom->element == "I"; })) return {"C17", kC17};
    if (h >= 1) return {"C18", kC18};
    if (aromatic_bonds >= 3) return {"C19", kC19};
    if (any([](const Nbr& n) { return n.order == BondOrder::Single && n.atom->aromatic; }))
      return {"C20", kC20};
    if (any([](const Nbr& n) {
          return n.order == BondOrder::Single && !n.atom->aromatic && n.atom->element == "C";
        }))
      return {"C21", kC21};
    if (any([](const Nbr& n) {
          return n.order == BondOrder::Single && !n.atom->aromatic && n.atom->element == "N";
        }))
      return {"C22", kC22};
    if (any([](const Nbr& n) {
          return n.order == BondOrder::Single && !n.atom->aromatic && n.atom->element == "O";
        }))
      return {"C23", kC23};
    if (any([](const Nbr& n) {
          return n.order == BondOrder::Single && !n.atom->aromatic && n.atom->element == "S";
        }))
      return {"C24", kC24};
    if (any([](const Nbr& n) {
          return n.order == BondOrder::Double &&
                 (n.atom->element == "C" || n.atom->element == "N" || n.atom->element == "O");
        }))
      return {"C25", kC25};
    return {"CS", kCS};
  }

  const bool sp3 = sp3_carbon(a, nbrs);
  const bool all_aliphatic_c = all([](const Nbr& n) {
    return !n.atom->aromatic && n.atom->element == "C";
  });
  if (sp3 && all_aliphatic_c) return h >= 2 ? CrippenType{"C1", kC1} : CrippenType{"C2", kC2};
  if (sp3 && any([](const Nbr& n) { return is_polar_aliphatic(*n.atom); }))
    return h >= 2 ? CrippenType{"C3", kC3} : CrippenType{"C4", kC4};
  if (any([](const Nbr& n) {
        return n.order == BondOrder::Double && !n.atom->aromatic && n.atom->element != "C";
      }))
    return {"C5", kC5};
  if (any([](const Nbr& n) {
        return n.order == BondOrder::Double && !n.atom->aromatic && n.atom->element == "C";
      }) &&
      all([](const Nbr& n) { return !n.atom->aromatic; }))
    return {"C6", kC6};
  if (static_cast<int>(nbrs.size()) + h == 2 &&
      any([](const Nbr& n) { return n.order == BondOrder::Triple && !n.atom->aromatic; }))
    return {"C7", kC7};
  if (sp3 && h == 3 && any([](const Nbr& n) { return n.atom->aromatic; }))
    return nbrs.front().atom->element == "C" ? CrippenType{"C8", kC8}
                                             : CrippenType{"C9", kC9};
  if (sp3 && any([](const Nbr& n) { return n.atom->aromatic; })) {
    if (h == 2) return {"C10", kC10};
    if (h == 1) return {"C11", kC11};
    return {"C12", kC12};
  }
  if (any([](const Nbr& n) { return n.order == BondOrder::Double && n.atom->aromatic; }) ||
      (any([](const Nbr& n) {
        return n.order == BondOrder::Double && !n.atom->aromatic && n.atom->element == "C";
      }) &&
       any([](const Nbr& n) { return n.atom->aromatic; })))
    return {"C26", kC26};
  if (sp3 && any([](const Nbr& n) {
        return !n.atom->aromatic && !is_common_organic(*n.atom);
      }))
    return {"C27", kC27};
  return {"CS", kCS};
}

CrippenType classify_nitrogen(const Atom& a, const std::vector<Nbr>& nbrs) {
  const int h = a.total_h();
  auto any = [&](auto pred) { return std::any_of(nbrs.begin(), nbrs.end(), pred); };
  const bool has_aromatic_nbr = any([](const Nbr& n) { return n.atom->aromatic; });
  const bool has_double = any([](const Nbr& n) { return n.order == BondOrder::Double; });
  const bool has_triple = any([](const Nbr& n) { return n.order == BondOrder::Triple; });

  if (a.aromatic) return a.formal_charge > 0 ? CrippenType{"N12", kN12}
                                             : CrippenType{"N11", kN11};
  if (a.formal_charge > 0) {
    if (h >= 1) return {"N10", kN10};
    if (has_double || has_triple) return {"N14", kN14};
    if (nbrs.size() == 4) return {"N13", kN13};
    return {"NS", kNS};
  }
  if (a.formal_charge < 0) return {"NS", kNS};
  if (has_triple) return {"N9", kN9};
  if (has_double) return h >= 1 ? CrippenType{"N5", kN5} : CrippenType{"N6", kN6};
  if (h == 2) return has_aromatic_nbr ? CrippenType{"N3", kN3} : CrippenType{"N1", kN1};
  if (h == 1 && nbrs.size() == 2)
    return has_aromatic_nbr ? CrippenType{"N4", kN4} : CrippenType{"N2", kN2};
  if (h == 0 && nbrs.size() == 3)
    return has_aromatic_nbr ? CrippenType{"N8", kN8} : CrippenType{"N7", kN7};
  return {"NS", kNS};
}

CrippenType classify_oxygen(const Molecule& mol, const Atom& a, const std::vector<Nbr>& nbrs) {
  const int h = a.total_h();
  auto any = [&](auto pred) { return std::any_of(nbrs.begin(), nbrs.end(), pred); };

  if (a.aromatic) return {"O1", kO1};
  if (a.formal_charge < 0) {
    if (any([](const Nbr& n) { return n.atom->element == "N"; })) return {"O5", kO5};
    if (any([](const Nbr& n) { return n.atom->element == "S"; })) return {"O6", kO6};
    // Carboxylate oxygen outranks the generic anion class: an O⁻ whose carbon
    // also carries a double-bonded oxygen is part of a carboxylate group.
    const bool carboxylate = any([&](const Nbr& n) {
      if (n.atom->element != "C") return false;
      for (const auto& [nn, bb] : mol.neighbors(n.index)) {
        const Bond& b = mol.bond(bb);
        if (b.order == BondOrder::Double && mol.atom(nn).element == "O") return true;
      }
      return false;
    });
    if (carboxylate) return {"O12", kO12};
    return {"O7", kO7};
  }
  if (h >= 1) return {"O2", kO2};

  for (const Nbr& n : nbrs) {
    if (n.order != BondOrder::Double) continue;
    if (n.atom->aromatic && n.atom->element == "C") return {"O8", kO8};
    if (n.atom->element == "N" || n.atom->element == "O") return {"O5", kO5};
    if (n.atom->element == "C") {
      // Classify the carbonyl by the carbon's other substituents.
      std::vector<const Atom*> others;
      for (const auto& [nn, bb] : mol.neighbors(n.index))
        if (&mol.atom(nn) != &a) others.push_back(&mol.atom(nn));
      const bool both_hetero =
          others.size() == 2 &&
          std::all_of(others.begin(), others.end(), [](const Atom* o) {
            return o->element != "C";
          });
      if (both_hetero) return {"O11", kO11};
      const bool any_aromatic = std::any_of(others.begin(), others.end(),
                                            [](const Atom* o) { return o->aromatic; });
      if (any_aromatic) return {"O10", kO10};
      return {"O9", kO9};
    }
  }
  if (nbrs.size() == 2) {
    const bool any_aromatic = any([](const Nbr& n) { return n.atom->aromatic; });
    return any_aromatic ? CrippenType{"O4", kO4} : CrippenType{"O3", kO3};
  }
  return {"OS", kOS};
}

bool is_group_1_or_2(int z) {
  switch (z) {
    case 3: case 11: case 19: case 37: case 55: case 87:  // alkali
    case 4: case 12: case 20: case 38: case 56: case 88:  // alkaline earth
      return true;
    default:
      return false;
  }
}

CrippenType classify_heavy(const Molecule& mol, int i) {
  const Atom& a = mol.atom(i);
  const std::vector<Nbr> nbrs = neighbors_of(mol, i);

  if (a.element == "C") return classify_carbon(a, nbrs);
  if (a.element == "N") return classify_nitrogen(a, nbrs);
  if (a.element == "O") return classify_oxygen(mol, a, nbrs);
  if (a.element == "S") {
    if (a.aromatic) return {"S3", kS3};
    return a.formal_charge != 0 ? CrippenType{"S2", kS2} : CrippenType{"S1", kS1};
  }
  if (a.element == "P") return {"P", kP};
  if (is_halogen(a)) {
    if (a.formal_charge != 0) return {"Hal", kHal};
    if (a.element == "F") return {"F", kF};
    if (a.element == "Cl") return {"Cl", kCl};
    if (a.element == "Br") return {"Br", kBr};
    return {"I", kI};
  }
  if (a.element == "H") return {"HS", kHS};  // explicit [H] written as a heavy atom
  const int z = chem::element_by_symbol(a.element)->z;
  return is_group_1_or_2(z) ? CrippenType{"Me1", kMe1} : CrippenType{"Me2", kMe2};
}

// Class of one hydrogen sitting on the given heavy atom.
CrippenType hydrogen_type(const Molecule& mol, int heavy) {
  const Atom& a = mol.atom(heavy);
  if (a.element == "C") return {"H1", kH1};
  if (a.element == "N") return {"H3", kH3};
  if (a.element != "O") return {"H2", kH2};  // S-H, P-H, B-H, ... all class as H2

  // Hydroxyl hydrogens split by what else the oxygen touches.
  for (const auto& [nbr, bond] : mol.neighbors(heavy)) {
    const Atom& o = mol.atom(nbr);
    if (o.element == "N") return {"H3", kH3};                      // N–O–H
    if (o.element == "O" || o.element == "S") return {"H4", kH4};  // peroxide, O–S
    if (o.element == "C") {
      if (o.aromatic) return {"H2", kH2};                          // phenol
      bool unsaturated = false;
      for (const auto& [nn, bb] : mol.neighbors(nbr)) {
        const Bond& b = mol.bond(bb);
        const std::string& el = mol.atom(nn).element;
        if (b.order == BondOrder::Double &&
            (el == "C" || el == "N" || el == "O" || el == "S"))
          unsaturated = true;
      }
      if (unsaturated) return {"H4", kH4};                         // acid / enol
      return {"H2", kH2};                                          // alcohol
    }
  }
  return {"H2", kH2};  // bare water or O bonded only to exotic atoms
}

}  // namespace

std::vector<CrippenType> crippen_types(const Molecule& mol) {
  std::vector<CrippenType> out;
  out.reserve(static_cast<std::size_t>(mol.atom_count()));
  for (int i = 0; i < mol.atom_count(); ++i) out.push_back(classify_heavy(mol, i));
  return out;
}

double crippen_logp(const Molecule& mol) {
  // Accumulate integer counts per class, then sum count * value in label
  // order.  Class counts are rendering invariants, so the floating-point
  // total is bit-identical no matter how the input SMILES ordered the atoms.
  std::map<std::string, std::pair<double, int>> classes;
  for (int i = 0; i < mol.atom_count(); ++i) {
    const CrippenType heavy = classify_heavy(mol, i);
    auto& hc = classes[heavy.label];
    hc.first = heavy.value;
    hc.second += 1;
    const int h = mol.atom(i).total_h();
    if (h > 0) {
      const CrippenType hyd = hydrogen_type(mol, i);
      auto& yc = classes[hyd.label];
      yc.first = hyd.value;
      yc.second += h;
    }
  }
  double total = 0.0;
  for (const auto& [label, vc] : classes) total += vc.first * vc.second;
  return total;
}

}  // namespace molopt::desc

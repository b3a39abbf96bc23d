//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "molopt/chem/molecule.hpp"
#include "molopt/common.hpp"
#include "molopt/fingerprint.hpp"

namespace molopt::refstats {

struct EmptyCorpus : ValidationError {
  using ValidationError::ValidationError;
};
struct DegenerateStats : ValidationError {
  using ValidationError::ValidationError;
};
struct ParamMismatch : ValidationError {
  using ValidationError::ValidationError;
};
struct EmptyFingerprint : ValidationError {
  using ValidationError::ValidationError;
};

// Property statistics and observed-bit universe of a reference corpus.
// Everything downstream (property filter, de novo fraction, drift
// diagnostics) is measured against this snapshot.
struct ReferenceStats {
  double mw_mean = 0.0;
  double mw_std = 0.0;    // population standard deviation
  double logp_mean = 0.0;
  double logp_std = 0.0;
  int n_molecules = 0;    // parseable lines
  int skipped = 0;        // unparseable lines
  int fp_radius = 2;
  std::uint32_t fp_width = 2048;
  std::string source_digest;               // FNV-1a 64 of the corpus bytes, hex
  std::vector<std::uint32_t> bit_universe; // sorted union of corpus on-bits

  bool contains_bit(std::uint32_t bit) const;
};

// Hash of a file's raw bytes (FNV-1a 64, lowercase hex). Used to tie stats
// files and manifests to the exact corpus they were computed from.
std::string file_digest(const std::string& path);

// Population mean/std of MW and LogP plus the union of fingerprint on-bits
// over every parseable line of the corpus. Unparseable lines are skipped and
// counted. Throws EmptyCorpus (< 2 parseable molecules), DegenerateStats
// (zero variance in MW or LogP), IoFailure.
ReferenceStats build_stats(const std::string& corpus_path, int fp_radius = 2,
                           std::uint32_t fp_width = 2048);

// Same computation over in-memory lines; `source_digest` is caller-provided.
ReferenceStats build_stats_from_lines(const std::vector<std::string>& lines,
                                      const std::string& source_digest,
                                      int fp_radius = 2, std::uint32_t fp_width = 2048);

// Fraction of fp's on-bits absent from the reference universe.
// Throws ParamMismatch (width disagrees) or EmptyFingerprint.
double denovo_fraction(const fp::Fingerprint& fp, const ReferenceStats& stats);

struct FilterVerdict {
  bool pass = false;
  // Subset of {mw_low, mw_high, logp_low, logp_high, denovo_bits}; empty iff pass.
  std::vector<std::string> reasons;
};

// The reference property filter: MW and LogP within μ ± k_sigma·σ (closed
// intervals — boundary values pass) and de novo bit fraction ≤ denovo_max
// (again closed: exactly the threshold passes).
FilterVerdict property_filter(const chem::Molecule& mol, const ReferenceStats& stats,
                              double k_sigma = 4.0, double denovo_max = 0.10);

// JSON persistence. The file carries a version field and the source digest so
// downstream runs can refuse silently mismatched corpora.
void save_stats(const ReferenceStats& stats, const std::string& path);
ReferenceStats load_stats(const std::string& path);

}  // namespace molopt::refstats

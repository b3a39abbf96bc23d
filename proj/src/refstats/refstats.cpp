//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "molopt/refstats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "molopt/chem/canonical.hpp"
#include "molopt/chem/parser.hpp"
#include "molopt/descriptors.hpp"

namespace molopt::refstats {

namespace {

constexpr int kStatsVersion = 1;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // SMILES files may carry a name column after whitespace; keep field one.
    const std::size_t cut = line.find_first_of(" \t");
    if (cut != std::string::npos) line.resize(cut);
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

bool ReferenceStats::contains_bit(std::uint32_t bit) const {
  return std::binary_search(bit_universe.begin(), bit_universe.end(), bit);
}

std::string file_digest(const std::string& path) {
  const std::string bytes = read_file(path);
  return hex64(fnv1a64(bytes.data(), bytes.size()));
}

ReferenceStats build_stats_from_lines(const std::vector<std::string>& lines,
                                      const std::string& source_digest,
                                      int fp_radius, std::uint32_t fp_width) {
  ReferenceStats stats;
  stats.fp_radius = fp_radius;
  stats.fp_width = fp_width;
  stats.source_digest = source_digest;

  double mw_sum = 0.0, mw_sq = 0.0, lp_sum = 0.0, lp_sq = 0.0;
  std::set<std::uint32_t> universe;
  for (const std::string& line : lines) {
    chem::Molecule mol;
    if (!chem::try_parse_smiles(line, &mol)) {
      ++stats.skipped;
      continue;
    }
    const double mw = desc::mol_weight(mol);
    const double lp = desc::crippen_logp(mol);
    mw_sum += mw;
    mw_sq += mw * mw;
    lp_sum += lp;
    lp_sq += lp * lp;
    const fp::Fingerprint f = fp::ecfp(mol, fp_radius, fp_width);
    universe.insert(f.bits.begin(), f.bits.end());
    ++stats.n_molecules;
  }

  if (stats.n_molecules < 2)
    throw EmptyCorpus("reference corpus has " + std::to_string(stats.n_molecules) +
                      " parseable molecules; need at least 2");

  const double n = stats.n_molecules;
  stats.mw_mean = mw_sum / n;
  stats.logp_mean = lp_sum / n;
  const double mw_var = std::max(0.0, mw_sq / n - stats.mw_mean * stats.mw_mean);
  const double lp_var = std::max(0.0, lp_sq / n - stats.logp_mean * stats.logp_mean);
  stats.mw_std = std::sqrt(mw_var);
  stats.logp_std = std::sqrt(lp_var);
  if (stats.mw_std == 0.0 || stats.logp_std == 0.0)
    throw DegenerateStats("reference corpus has zero variance in MW or LogP");

  stats.bit_universe.assign(universe.begin(), universe.end());
  return stats;
}

ReferenceStats build_stats(const std::string& corpus_path, int fp_radius,
                           std::uint32_t fp_width) {
  const std::string bytes = read_file(corpus_path);
  const std::string digest = hex64(fnv1a64(bytes.data(), bytes.size()));
  return build_stats_from_lines(split_lines(bytes), digest, fp_radius, fp_width);
}

double denovo_fraction(const fp::Fingerprint& fp, const ReferenceStats& stats) {
  if (fp.width != stats.fp_width)
    throw ParamMismatch("fingerprint width " + std::to_string(fp.width) +
                        " does not match reference width " + std::to_string(stats.fp_width));
  if (fp.bits.empty()) throw EmptyFingerprint("cannot score an empty fingerprint");
  int novel = 0;
  for (std::uint32_t bit : fp.bits)
    if (!stats.contains_bit(bit)) ++novel;
  return static_cast<double>(novel) / static_cast<double>(fp.bits.size());
}

FilterVerdict property_filter(const chem::Molecule& mol, const ReferenceStats& stats,
                              double k_sigma, double denovo_max) {
  FilterVerdict verdict;
  const double mw = desc::mol_weight(mol);
  const double lp = desc::crippen_logp(mol);
  if (mw < stats.mw_mean - k_sigma * stats.mw_std) verdict.reasons.push_back("mw_low");
  if (mw > stats.mw_mean + k_sigma * stats.mw_std) verdict.reasons.push_back("mw_high");
  if (lp < stats.logp_mean - k_sigma * stats.logp_std) verdict.reasons.push_back("logp_low");
  if (lp > stats.logp_mean + k_sigma * stats.logp_std) verdict.reasons.push_back("logp_high");
  if (denovo_fraction(fp::ecfp(mol, stats.fp_radius, stats.fp_width), stats) > denovo_max)
    verdict.reasons.push_back("denovo_bits");
  verdict.pass = verdict.reasons.empty();
  return verdict;
}

void save_stats(const ReferenceStats& stats, const std::string& path) {
  nlohmann::json j;
  j["version"] = kStatsVersion;
  j["mw_mean"] = stats.mw_mean;
  j["mw_std"] = stats.mw_std;
  j["logp_mean"] = stats.logp_mean;
  j["logp_std"] = stats.logp_std;
  j["n_molecules"] = stats.n_molecules;
  j["skipped"] = stats.skipped;
  j["fp_radius"] = stats.fp_radius;
  j["fp_width"] = stats.fp_width;
  j["source_digest"] = stats.source_digest;
  j["bit_universe"] = stats.bit_universe;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write " + path);
  out << j.dump(2) << "\n";
}

ReferenceStats load_stats(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed stats file " + path + ": " + e.what());
  }
  if (!j.contains("version") || j["version"].get<int>() != kStatsVersion)
    throw ValidationError("stats file " + path + " has unsupported version");
  ReferenceStats stats;
  stats.mw_mean = j.at("mw_mean").get<double>();
  stats.mw_std = j.at("mw_std").get<double>();
  stats.logp_mean = j.at("logp_mean").get<double>();
  stats.logp_std = j.at("logp_std").get<double>();
  stats.n_molecules = j.at("n_molecules").get<int>();
  stats.skipped = j.at("skipped").get<int>();
  stats.fp_radius = j.at("fp_radius").get<int>();
  stats.fp_width = j.at("fp_width").get<std::uint32_t>();
  stats.source_digest = j.at("source_digest").get<std::string>();
  stats.bit_universe = j.at("bit_universe").get<std::vector<std::uint32_t>>();
  if (!std::is_sorted(stats.bit_universe.begin(), stats.bit_universe.end()))
    throw ValidationError("stats file " + path + " bit_universe is not sorted");
  return stats;
}

}  // namespace molopt::refstats

//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "molopt/common.hpp"
#include "molopt/policy/tape.hpp"

namespace molopt::policy {

struct UnknownToken : ValidationError {
  using ValidationError::ValidationError;
};

// Token inventory of the language model: the SMILES tokens observed in a
// training corpus plus the specials PAD (0), BOS (1), EOS (2).
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;

  Vocabulary() = default;
  // Tokenizes every line and collects the distinct token texts (sorted).
  static Vocabulary build(const std::vector<std::string>& corpus);
  // Reconstruction from a checkpoint's token list (index order, specials first).
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(int index) const { return tokens_[static_cast<std::size_t>(index)]; }
  int index(const std::string& token) const;  // throws UnknownToken

  // BOS + token indices + EOS.  Throws UnknownToken or propagates ParseError.
  std::vector<int> encode(const std::string& smiles) const;
  // Concatenated token texts, ignoring specials, stopping at EOS.
  std::string decode(const std::vector<int>& seq) const;

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// One GRU layer's parameter block.  Inputs are row vectors: W is in×H,
// U is H×H, biases are 1×H.
struct GruLayer {
  Mat Wz, Uz, Wr, Ur, Wh, Uh;
  Mat bz, br, bh;
};

// Per-sequence recurrent state (one row vector per layer).
struct StepState {
  std::vector<Eigen::RowVectorXd> h;
};

// Character-level autoregressive SMILES language model: token embedding,
// stacked GRU layers, linear softmax head.  Recurrence per layer:
//   z = σ(x·Wz + h·Uz + bz), r = σ(x·Wr + h·Ur + br),
//   h̃ = tanh(x·Wh + (r∘h)·Uh + bh), h' = (1−z)∘h + z∘h̃, h₀ = 0.
class GruLM {
 public:
  GruLM() = default;
  // Seeded uniform(−0.08, 0.08) weights, zero biases.
  static GruLM init(Vocabulary vocab, int embed_dim, int hidden, int layers,
                    std::uint64_t seed);

  const Vocabulary& vocab() const { return vocab_; }
  int embed_dim() const { return embed_dim_; }
  int hidden() const { return hidden_; }
  int layers() const { return static_cast<int>(gru_.size()); }

  // Fixed parameter enumeration shared by Adam, clone, checkpoints, and the
  // gradient store: embed, per layer {Wz,Uz,bz,Wr,Ur,br,Wh,Uh,bh}, Wo, bo.
  std::vector<Mat*> params();
  std::vector<const Mat*> params() const;
  std::vector<std::string> param_names() const;
  GruLM clone() const { return *this; }
  std::string param_digest() const;

  // Exact negative log-likelihood of one BOS…EOS sequence (length ≥ 2).
  double nll(const std::vector<int>& seq) const;

  struct Sample {
    std::vector<int> tokens;  // BOS … (EOS unless cut at max_len)
    double logprob = 0.0;     // == −nll(tokens) exactly
  };
  // Ancestral sampling at temperature 1.  PAD and BOS are excluded from the
  // draw; the log-probability is taken from the unmasked softmax, so it
  // matches nll() bit for bit.  Deterministic given the generator state.
  Sample sample(std::mt19937_64& rng, int max_len = 100) const;
  std::vector<Sample> sample_batch(int n, std::mt19937_64& rng, int max_len = 100) const;

  // Per-sequence total NLL for a batch (padded batched forward, no tape).
  std::vector<double> nll_batch(const std::vector<std::vector<int>>& seqs) const;

  // Single recurrent step used by nll()/sample(): consumes one token, returns
  // the logits row.  Exposed for incremental decoding.
  Eigen::RowVectorXd forward_step(StepState& state, int token) const;
  StepState initial_state() const;

 private:
  Vocabulary vocab_;
  int embed_dim_ = 0;
  int hidden_ = 0;
  Mat embed_;               // V×E
  std::vector<GruLayer> gru_;
  Mat Wo_;                  // H×V
  Mat bo_;                  // 1×V

  friend struct GraphBuilder;
};

// Gradient accumulators aligned with GruLM::params().
struct Gradients {
  std::vector<Mat> g;
  void reset(const GruLM& model);
};

// Batched NLL computation recorded on a tape.  `per_seq` is a B×1 node of
// per-sequence total NLLs; `token_count` counts non-pad target positions.
struct NllGraph {
  Tape tape;
  int per_seq = -1;
  int token_count = 0;
};
void build_nll_graph(const GruLM& model, Gradients& grads,
                     const std::vector<std::vector<int>>& seqs, NllGraph& out);

// Adam with bias correction; moments sized lazily on first step.
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(std::vector<Mat*> params, const std::vector<Mat>& grads);
  int steps_taken() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
  std::vector<Mat> m_, v_;
};

struct PretrainReport {
  std::vector<double> epoch_mean_nll;  // mean per-token NLL per epoch
  int skipped_too_long = 0;
};

// Maximum-likelihood training: seeded shuffles, fixed-size batches, Adam on
// the mean per-token NLL.  Corpus lines longer than max_len tokens (after
// encoding) are skipped and counted.
PretrainReport pretrain(GruLM& model, const std::vector<std::string>& corpus,
                        int epochs = 5, int batch = 128, double lr = 1e-3,
                        std::uint64_t seed = 0, int max_len = 100);

// Checkpoint I/O: versioned binary with a JSON header (vocabulary, dims,
// parameter shapes) followed by little-endian 64-bit float blocks.
void save_checkpoint(const GruLM& model, const std::string& path);
GruLM load_checkpoint(const std::string& path);

}  // namespace molopt::policy

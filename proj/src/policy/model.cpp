//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "molopt/policy/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "molopt/chem/tokenizer.hpp"
#include <json.hpp>

namespace molopt::policy {

namespace {

using nlohmann::json;

// Uniform draw in [0, 1) with 53 random bits; identical on every platform for
// a given generator state.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Stable log-sum-exp over a logits row.  nll() and sample() both normalize
// through this one function so their per-step terms agree bit for bit.
double log_sum_exp(const Eigen::RowVectorXd& x) {
  const double m = x.maxCoeff();
  return m + std::log((x.array() - m).exp().sum());
}

Eigen::ArrayXXd sigmoid_array(const Eigen::ArrayXXd& x) {
  return 1.0 / (1.0 + (-x).exp());
}

}  // namespace

// --- Vocabulary -------------------------------------------------------------

Vocabulary Vocabulary::build(const std::vector<std::string>& corpus) {
  std::set<std::string> texts;
  for (const auto& line : corpus) {
    for (const auto& tok : chem::tokenize(line)) texts.insert(tok.text);
  }
  std::vector<std::string> tokens = {"<pad>", "<bos>", "<eos>"};
  tokens.insert(tokens.end(), texts.begin(), texts.end());
  return from_tokens(std::move(tokens));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.size() < 3 || tokens[0] != "<pad>" || tokens[1] != "<bos>" ||
      tokens[2] != "<eos>") {
    throw ValidationError("vocabulary token list must start with <pad>, <bos>, <eos>");
  }
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  for (int i = 0; i < static_cast<int>(v.tokens_.size()); ++i) {
    if (!v.index_.emplace(v.tokens_[static_cast<std::size_t>(i)], i).second) {
      throw ValidationError("vocabulary contains a duplicate token: " +
                            v.tokens_[static_cast<std::size_t>(i)]);
    }
  }
  return v;
}

int Vocabulary::index(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) throw UnknownToken("token not in vocabulary: " + token);
  return it->second;
}

std::vector<int> Vocabulary::encode(const std::string& smiles) const {
  std::vector<int> out = {kBos};
  for (const auto& tok : chem::tokenize(smiles)) out.push_back(index(tok.text));
  out.push_back(kEos);
  return out;
}

std::string Vocabulary::decode(const std::vector<int>& seq) const {
  std::string out;
  for (int id : seq) {
    if (id < 0 || id >= size()) throw ValidationError("token index out of range");
    if (id == kEos) break;
    if (id == kPad || id == kBos) continue;
    out += tokens_[static_cast<std::size_t>(id)];
  }
  return out;
}

// --- GruLM ------------------------------------------------------------------

GruLM GruLM::init(Vocabulary vocab, int embed_dim, int hidden, int layers,
                  std::uint64_t seed) {
  if (vocab.size() < 4) throw ValidationError("vocabulary has no SMILES tokens");
  if (embed_dim < 1 || hidden < 1 || layers < 1) {
    throw ValidationError("model dimensions must be positive");
  }
  GruLM m;
  m.vocab_ = std::move(vocab);
  m.embed_dim_ = embed_dim;
  m.hidden_ = hidden;
  const int v = m.vocab_.size();
  m.embed_.resize(v, embed_dim);
  m.gru_.resize(static_cast<std::size_t>(layers));
  for (int l = 0; l < layers; ++l) {
    const int in = l == 0 ? embed_dim : hidden;
    auto& g = m.gru_[static_cast<std::size_t>(l)];
    g.Wz.resize(in, hidden);
    g.Uz.resize(hidden, hidden);
    g.Wr.resize(in, hidden);
    g.Ur.resize(hidden, hidden);
    g.Wh.resize(in, hidden);
    g.Uh.resize(hidden, hidden);
    g.bz = Mat::Zero(1, hidden);
    g.br = Mat::Zero(1, hidden);
    g.bh = Mat::Zero(1, hidden);
  }
  m.Wo_.resize(hidden, v);
  m.bo_ = Mat::Zero(1, v);

  // Weights uniform in (−0.08, 0.08), filled row-major in enumeration order;
  // biases stay zero and consume no draws.
  std::mt19937_64 rng(seed);
  auto fill = [&rng](Mat& w) {
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = (2.0 * unit_uniform(rng) - 1.0) * 0.08;
      }
    }
  };
  fill(m.embed_);
  for (auto& g : m.gru_) {
    fill(g.Wz);
    fill(g.Uz);
    fill(g.Wr);
    fill(g.Ur);
    fill(g.Wh);
    fill(g.Uh);
  }
  fill(m.Wo_);
  return m;
}

std::vector<Mat*> GruLM::params() {
  std::vector<Mat*> p = {&embed_};
  for (auto& g : gru_) {
    p.insert(p.end(), {&g.Wz, &g.Uz, &g.bz, &g.Wr, &g.Ur, &g.br, &g.Wh, &g.Uh, &g.bh});
  }
  p.push_back(&Wo_);
  p.push_back(&bo_);
  return p;
}

std::vector<const Mat*> GruLM::params() const {
  std::vector<const Mat*> p = {&embed_};
  for (const auto& g : gru_) {
    p.insert(p.end(), {&g.Wz, &g.Uz, &g.bz, &g.Wr, &g.Ur, &g.br, &g.Wh, &g.Uh, &g.bh});
  }
  p.push_back(&Wo_);
  p.push_back(&bo_);
  return p;
}

std::vector<std::string> GruLM::param_names() const {
  std::vector<std::string> names = {"embed"};
  for (int l = 0; l < layers(); ++l) {
    const std::string p = "gru" + std::to_string(l) + ".";
    for (const char* s : {"Wz", "Uz", "bz", "Wr", "Ur", "br", "Wh", "Uh", "bh"}) {
      names.push_back(p + s);
    }
  }
  names.push_back("Wo");
  names.push_back("bo");
  return names;
}

std::string GruLM::param_digest() const {
  std::uint64_t h = kFnvOffset;
  for (const Mat* m : params()) {
    h = fnv1a64_i32(static_cast<int>(m->rows()), h);
    h = fnv1a64_i32(static_cast<int>(m->cols()), h);
    for (Eigen::Index r = 0; r < m->rows(); ++r) {
      for (Eigen::Index c = 0; c < m->cols(); ++c) {
        h = fnv1a64_u64(std::bit_cast<std::uint64_t>((*m)(r, c)), h);
      }
    }
  }
  return hex64(h);
}

StepState GruLM::initial_state() const {
  StepState s;
  s.h.assign(gru_.size(), Eigen::RowVectorXd::Zero(hidden_));
  return s;
}

Eigen::RowVectorXd GruLM::forward_step(StepState& state, int token) const {
  if (token < 0 || token >= vocab_.size()) {
    throw ValidationError("forward_step: token index out of range");
  }
  Eigen::RowVectorXd x = embed_.row(token);
  for (std::size_t l = 0; l < gru_.size(); ++l) {
    const auto& g = gru_[l];
    Eigen::RowVectorXd& h = state.h[l];
    const Eigen::RowVectorXd z =
        sigmoid_array(((x * g.Wz + h * g.Uz) + g.bz).array()).matrix();
    const Eigen::RowVectorXd r =
        sigmoid_array(((x * g.Wr + h * g.Ur) + g.br).array()).matrix();
    const Eigen::RowVectorXd hc =
        (((x * g.Wh + (r.cwiseProduct(h)) * g.Uh) + g.bh).array()).tanh().matrix();
    h = ((1.0 - z.array()) * h.array() + z.array() * hc.array()).matrix();
    x = h;
  }
  return x * Wo_ + bo_;
}

double GruLM::nll(const std::vector<int>& seq) const {
  if (seq.size() < 2) throw ValidationError("nll: sequence needs at least two tokens");
  StepState state = initial_state();
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < seq.size(); ++t) {
    const Eigen::RowVectorXd logits = forward_step(state, seq[t]);
    total += log_sum_exp(logits) - logits(seq[t + 1]);
  }
  return total;
}

GruLM::Sample GruLM::sample(std::mt19937_64& rng, int max_len) const {
  Sample out;
  out.tokens.push_back(Vocabulary::kBos);
  StepState state = initial_state();
  int current = Vocabulary::kBos;
  for (int step = 0; step < max_len; ++step) {
    const Eigen::RowVectorXd logits = forward_step(state, current);
    const double lse = log_sum_exp(logits);
    // Draw from the softmax with PAD and BOS zeroed out (renormalized by the
    // scan itself); the recorded log-probability stays unmasked so the total
    // equals −nll(tokens) exactly.
    Eigen::ArrayXd probs = (logits.array() - lse).exp();
    probs(Vocabulary::kPad) = 0.0;
    probs(Vocabulary::kBos) = 0.0;
    const double total = probs.sum();
    if (!(total > 0.0)) throw Error("sample: degenerate next-token distribution");
    const double u = unit_uniform(rng) * total;
    int chosen = -1;
    double acc = 0.0;
    for (int i = 0; i < probs.size(); ++i) {
      if (probs(i) <= 0.0) continue;
      acc += probs(i);
      chosen = i;
      if (u < acc) break;
    }
    out.logprob += logits(chosen) - lse;
    out.tokens.push_back(chosen);
    if (chosen == Vocabulary::kEos) break;
    current = chosen;
  }
  return out;
}

std::vector<GruLM::Sample> GruLM::sample_batch(int n, std::mt19937_64& rng,
                                               int max_len) const {
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(sample(rng, max_len));
  return out;
}

std::vector<double> GruLM::nll_batch(const std::vector<std::vector<int>>& seqs) const {
  const int b = static_cast<int>(seqs.size());
  if (b == 0) return {};
  std::size_t max_len = 0;
  for (const auto& s : seqs) {
    if (s.size() < 2) throw ValidationError("nll_batch: sequence needs at least two tokens");
    max_len = std::max(max_len, s.size());
  }
  std::vector<Mat> h(gru_.size(), Mat::Zero(b, hidden_));
  std::vector<double> out(static_cast<std::size_t>(b), 0.0);
  Mat x(b, embed_dim_);
  for (std::size_t t = 0; t + 1 < max_len; ++t) {
    for (int i = 0; i < b; ++i) {
      const auto& s = seqs[static_cast<std::size_t>(i)];
      const int tok = t + 1 < s.size() ? s[t] : Vocabulary::kPad;
      x.row(i) = embed_.row(tok);
    }
    Mat in = x;
    for (std::size_t l = 0; l < gru_.size(); ++l) {
      const auto& g = gru_[l];
      const Mat z =
          sigmoid_array(((in * g.Wz + h[l] * g.Uz).rowwise() + g.bz.row(0)).array())
              .matrix();
      const Mat r =
          sigmoid_array(((in * g.Wr + h[l] * g.Ur).rowwise() + g.br.row(0)).array())
              .matrix();
      const Mat hc = ((in * g.Wh + r.cwiseProduct(h[l]) * g.Uh).rowwise() + g.bh.row(0))
                         .array()
                         .tanh()
                         .matrix();
      h[l] = ((1.0 - z.array()) * h[l].array() + z.array() * hc.array()).matrix();
      in = h[l];
    }
    const Mat logits = (in * Wo_).rowwise() + bo_.row(0);
    for (int i = 0; i < b; ++i) {
      const auto& s = seqs[static_cast<std::size_t>(i)];
      if (t + 1 >= s.size()) continue;
      const Eigen::RowVectorXd row = logits.row(i);
      out[static_cast<std::size_t>(i)] += log_sum_exp(row) - row(s[t + 1]);
    }
  }
  return out;
}

// --- Batched training graph --------------------------------------------------

void Gradients::reset(const GruLM& model) {
  const auto ps = model.params();
  g.resize(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    g[i] = Mat::Zero(ps[i]->rows(), ps[i]->cols());
  }
}

void build_nll_graph(const GruLM& model, Gradients& grads,
                     const std::vector<std::vector<int>>& seqs, NllGraph& out) {
  if (seqs.empty()) throw ValidationError("build_nll_graph: empty batch");
  grads.reset(model);
  out.tape = Tape();
  out.per_seq = -1;
  out.token_count = 0;
  Tape& tp = out.tape;

  const auto ps = const_cast<GruLM&>(model).params();
  std::vector<int> leaf_ids(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    leaf_ids[i] = tp.leaf(*ps[i], &grads.g[i]);
  }
  const int embed_node = leaf_ids[0];
  const int layers = model.layers();
  auto layer_leaf = [&](int l, int k) { return leaf_ids[static_cast<std::size_t>(1 + l * 9 + k)]; };
  const int wo_node = leaf_ids[static_cast<std::size_t>(1 + layers * 9)];
  const int bo_node = leaf_ids[static_cast<std::size_t>(2 + layers * 9)];

  const int b = static_cast<int>(seqs.size());
  std::size_t max_len = 0;
  for (const auto& s : seqs) {
    if (s.size() < 2) throw ValidationError("build_nll_graph: sequence needs at least two tokens");
    max_len = std::max(max_len, s.size());
  }

  std::vector<int> h(static_cast<std::size_t>(layers),
                     tp.constant(Mat::Zero(b, model.hidden())));
  for (std::size_t t = 0; t + 1 < max_len; ++t) {
    std::vector<int> rows(static_cast<std::size_t>(b));
    std::vector<int> targets(static_cast<std::size_t>(b), 0);
    std::vector<char> mask(static_cast<std::size_t>(b), 0);
    for (int i = 0; i < b; ++i) {
      const auto& s = seqs[static_cast<std::size_t>(i)];
      const bool live = t + 1 < s.size();
      rows[static_cast<std::size_t>(i)] = live ? s[t] : Vocabulary::kPad;
      if (live) {
        targets[static_cast<std::size_t>(i)] = s[t + 1];
        mask[static_cast<std::size_t>(i)] = 1;
        ++out.token_count;
      }
    }
    int x = tp.gather(embed_node, rows);
    for (int l = 0; l < layers; ++l) {
      const int z = tp.sigmoid(tp.add_row(
          tp.add(tp.matmul(x, layer_leaf(l, 0)), tp.matmul(h[static_cast<std::size_t>(l)], layer_leaf(l, 1))),
          layer_leaf(l, 2)));
      const int r = tp.sigmoid(tp.add_row(
          tp.add(tp.matmul(x, layer_leaf(l, 3)), tp.matmul(h[static_cast<std::size_t>(l)], layer_leaf(l, 4))),
          layer_leaf(l, 5)));
      const int hc = tp.tanh(tp.add_row(
          tp.add(tp.matmul(x, layer_leaf(l, 6)),
                 tp.matmul(tp.mul(r, h[static_cast<std::size_t>(l)]), layer_leaf(l, 7))),
          layer_leaf(l, 8)));
      h[static_cast<std::size_t>(l)] =
          tp.add(tp.mul(tp.affine(z, -1.0, 1.0), h[static_cast<std::size_t>(l)]),
                 tp.mul(z, hc));
      x = h[static_cast<std::size_t>(l)];
    }
    const int logits = tp.add_row(tp.matmul(x, wo_node), bo_node);
    const int ce = tp.ce_mask(logits, targets, mask);
    out.per_seq = out.per_seq < 0 ? ce : tp.add(out.per_seq, ce);
  }
}

// --- Adam ---------------------------------------------------------------------

Adam::Adam(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::step(std::vector<Mat*> params, const std::vector<Mat>& grads) {
  if (params.size() != grads.size()) throw ValidationError("adam: parameter/gradient count mismatch");
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = Mat::Zero(params[i]->rows(), params[i]->cols());
      v_[i] = Mat::Zero(params[i]->rows(), params[i]->cols());
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->rows() != grads[i].rows() || params[i]->cols() != grads[i].cols()) {
      throw ValidationError("adam: gradient shape mismatch");
    }
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = (beta2_ * v_[i].array() + (1.0 - beta2_) * grads[i].array().square()).matrix();
    params[i]->array() -=
        lr_ * (m_[i].array() / bc1) / ((v_[i].array() / bc2).sqrt() + eps_);
  }
}

// --- Pretraining ----------------------------------------------------------------

PretrainReport pretrain(GruLM& model, const std::vector<std::string>& corpus,
                        int epochs, int batch, double lr, std::uint64_t seed,
                        int max_len) {
  if (batch < 1) throw ValidationError("pretrain: batch size must be positive");
  if (epochs < 0) throw ValidationError("pretrain: negative epoch count");
  PretrainReport report;
  std::vector<std::vector<int>> seqs;
  seqs.reserve(corpus.size());
  for (const auto& line : corpus) {
    auto seq = model.vocab().encode(line);
    if (static_cast<int>(seq.size()) > max_len) {
      ++report.skipped_too_long;
      continue;
    }
    seqs.push_back(std::move(seq));
  }
  if (seqs.empty()) throw ValidationError("pretrain: no usable corpus lines");
  if (epochs == 0) return report;

  Adam opt(lr);
  Gradients grads;
  NllGraph graph;
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(seqs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng() % i]);
    }
    double nll_sum = 0.0;
    long long token_sum = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(batch));
      std::vector<std::vector<int>> bs;
      bs.reserve(stop - start);
      for (std::size_t i = start; i < stop; ++i) bs.push_back(seqs[order[i]]);
      build_nll_graph(model, grads, bs, graph);
      nll_sum += graph.tape.value(graph.per_seq).sum();
      token_sum += graph.token_count;
      // Loss is the mean per-token NLL: rescale the per-sequence mean.
      const int loss = graph.tape.affine(
          graph.tape.mean_all(graph.per_seq),
          static_cast<double>(bs.size()) / static_cast<double>(graph.token_count), 0.0);
      graph.tape.backward(loss);
      opt.step(model.params(), grads.g);
    }
    report.epoch_mean_nll.push_back(nll_sum / static_cast<double>(token_sum));
  }
  return report;
}

// --- Checkpoint I/O ---------------------------------------------------------------

namespace {
constexpr char kMagic[8] = {'M', 'O', 'P', 'T', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCheckpointVersion = 1;
}  // namespace

void save_checkpoint(const GruLM& model, const std::string& path) {
  json header;
  header["version"] = kCheckpointVersion;
  header["embed_dim"] = model.embed_dim();
  header["hidden"] = model.hidden();
  header["layers"] = model.layers();
  header["tokens"] = model.vocab().tokens();
  json shapes = json::array();
  const auto names = model.param_names();
  const auto ps = model.params();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    shapes.push_back({{"name", names[i]},
                      {"rows", ps[i]->rows()},
                      {"cols", ps[i]->cols()}});
  }
  header["params"] = shapes;
  const std::string head = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open checkpoint for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  const std::uint32_t version = kCheckpointVersion;
  const std::uint64_t head_len = head.size();
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&head_len), sizeof(head_len));
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  for (const Mat* m : ps) {
    for (Eigen::Index r = 0; r < m->rows(); ++r) {
      for (Eigen::Index c = 0; c < m->cols(); ++c) {
        const double x = (*m)(r, c);
        out.write(reinterpret_cast<const char*>(&x), sizeof(x));
      }
    }
  }
  if (!out) throw IoFailure("failed writing checkpoint: " + path);
}

GruLM load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ValidationError("not a model checkpoint: " + path);
  }
  std::uint32_t version = 0;
  std::uint64_t head_len = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&head_len), sizeof(head_len));
  if (!in || version != kCheckpointVersion) {
    throw ValidationError("unsupported checkpoint version in " + path);
  }
  std::string head(head_len, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head_len));
  if (!in) throw ValidationError("truncated checkpoint header in " + path);

  json header;
  try {
    header = json::parse(head);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed checkpoint header: ") + e.what());
  }
  Vocabulary vocab = Vocabulary::from_tokens(header.at("tokens").get<std::vector<std::string>>());
  GruLM model = GruLM::init(std::move(vocab), header.at("embed_dim").get<int>(),
                            header.at("hidden").get<int>(),
                            header.at("layers").get<int>(), /*seed=*/0);
  const auto ps = model.params();
  const auto names = model.param_names();
  const auto& shapes = header.at("params");
  if (shapes.size() != ps.size()) throw ValidationError("checkpoint parameter list mismatch");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto& s = shapes[i];
    if (s.at("name").get<std::string>() != names[i] ||
        s.at("rows").get<Eigen::Index>() != ps[i]->rows() ||
        s.at("cols").get<Eigen::Index>() != ps[i]->cols()) {
      throw ValidationError("checkpoint parameter shape mismatch at " + names[i]);
    }
    for (Eigen::Index r = 0; r < ps[i]->rows(); ++r) {
      for (Eigen::Index c = 0; c < ps[i]->cols(); ++c) {
        double x = 0.0;
        in.read(reinterpret_cast<char*>(&x), sizeof(x));
        (*ps[i])(r, c) = x;
      }
    }
  }
  if (!in) throw ValidationError("truncated checkpoint payload in " + path);
  return model;
}

}  // namespace molopt::policy

//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#include "molopt/policy/tape.hpp"

#include <cmath>
#include <utility>

#include "molopt/common.hpp"

namespace molopt::policy {

int Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size()) - 1;
}

Mat& Tape::grad_of(int i) {
  Node& n = nodes_[static_cast<std::size_t>(i)];
  if (n.grad.size() == 0) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

int Tape::leaf(const Mat& value, Mat* grad_sink) {
  if (grad_sink->size() == 0) *grad_sink = Mat::Zero(value.rows(), value.cols());
  Node n;
  n.op = Op::Leaf;
  n.value = value;
  n.needs_grad = true;
  n.grad_sink = grad_sink;
  return push(std::move(n));
}

int Tape::constant(Mat value) {
  Node n;
  n.op = Op::Const;
  n.value = std::move(value);
  n.needs_grad = false;
  return push(std::move(n));
}

#define MOLOPT_PARENT(i) nodes_[static_cast<std::size_t>(i)]

int Tape::matmul(int a, int b) {
  Node n;
  n.op = Op::MatMul;
  n.a = a;
  n.b = b;
  n.value = MOLOPT_PARENT(a).value * MOLOPT_PARENT(b).value;
  n.needs_grad = MOLOPT_PARENT(a).needs_grad || MOLOPT_PARENT(b).needs_grad;
  return push(std::move(n));
}

int Tape::add(int a, int b) {
  Node n;
  n.op = Op::Add;
  n.a = a;
  n.b = b;
  n.value = MOLOPT_PARENT(a).value + MOLOPT_PARENT(b).value;
  n.needs_grad = MOLOPT_PARENT(a).needs_grad || MOLOPT_PARENT(b).needs_grad;
  return push(std::move(n));
}

int Tape::add_row(int a, int row) {
  Node n;
  n.op = Op::AddRow;
  n.a = a;
  n.b = row;
  n.value = MOLOPT_PARENT(a).value.rowwise() + MOLOPT_PARENT(row).value.row(0);
  n.needs_grad = MOLOPT_PARENT(a).needs_grad || MOLOPT_PARENT(row).needs_grad;
  return push(std::move(n));
}

int Tape::mul(int a, int b) {
  Node n;
  n.op = Op::Mul;
  n.a = a;
  n.b = b;
  n.value = MOLOPT_PARENT(a).value.cwiseProduct(MOLOPT_PARENT(b).value);
  n.needs_grad = MOLOPT_PARENT(a).needs_grad || MOLOPT_PARENT(b).needs_grad;
  return push(std::move(n));
}

int Tape::affine(int a, double scale, double shift) {
  Node n;
  n.op = Op::Affine;
  n.a = a;
  n.scale = scale;
  n.shift = shift;
  n.value = (MOLOPT_PARENT(a).value.array() * scale + shift).matrix();
  n.needs_grad = MOLOPT_PARENT(a).needs_grad;
  return push(std::move(n));
}

int Tape::sigmoid(int a) {
  Node n;
  n.op = Op::Sigmoid;
  n.a = a;
  n.value = (1.0 / (1.0 + (-MOLOPT_PARENT(a).value.array()).exp())).matrix();
  n.needs_grad = MOLOPT_PARENT(a).needs_grad;
  return push(std::move(n));
}

int Tape::tanh(int a) {
  Node n;
  n.op = Op::Tanh;
  n.a = a;
  n.value = MOLOPT_PARENT(a).value.array().tanh().matrix();
  n.needs_grad = MOLOPT_PARENT(a).needs_grad;
  return push(std::move(n));
}

int Tape::gather(int table, std::vector<int> rows) {
  Node n;
  n.op = Op::Gather;
  n.a = table;
  const Mat& t = MOLOPT_PARENT(table).value;
  n.value.resize(static_cast<Eigen::Index>(rows.size()), t.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    n.value.row(static_cast<Eigen::Index>(i)) = t.row(rows[i]);
  n.rows = std::move(rows);
  n.needs_grad = MOLOPT_PARENT(table).needs_grad;
  return push(std::move(n));
}

int Tape::ce_mask(int logits, std::vector<int> targets, std::vector<char> mask) {
  const Mat& x = MOLOPT_PARENT(logits).value;
  const Eigen::Index rows = x.rows();
  if (static_cast<Eigen::Index>(targets.size()) != rows ||
      static_cast<Eigen::Index>(mask.size()) != rows)
    throw Error("ce_mask: targets/mask length must equal the batch dimension");

  Node n;
  n.op = Op::CeMask;
  n.a = logits;
  n.value = Mat::Zero(rows, 1);
  n.softmax = Mat::Zero(rows, x.cols());
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    const double m = x.row(i).maxCoeff();
    const double lse = m + std::log((x.row(i).array() - m).exp().sum());
    n.value(i, 0) = lse - x(i, targets[static_cast<std::size_t>(i)]);
    n.softmax.row(i) = (x.row(i).array() - lse).exp();
  }
  n.targets = std::move(targets);
  n.mask = std::move(mask);
  n.needs_grad = MOLOPT_PARENT(logits).needs_grad;
  return push(std::move(n));
}

int Tape::mean_all(int a) {
  Node n;
  n.op = Op::MeanAll;
  n.a = a;
  n.value = Mat::Constant(1, 1, MOLOPT_PARENT(a).value.mean());
  n.needs_grad = MOLOPT_PARENT(a).needs_grad;
  return push(std::move(n));
}

void Tape::backward(int node) {
  if (value(node).rows() != 1 || value(node).cols() != 1)
    throw Error("backward requires a scalar node");
  grad_of(node)(0, 0) = 1.0;

  for (int i = node; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (!n.needs_grad || n.grad.size() == 0) continue;
    const Mat& g = n.grad;
    switch (n.op) {
      case Op::Leaf:
        *n.grad_sink += g;
        break;
      case Op::Const:
        break;
      case Op::MatMul: {
        Node& pa = MOLOPT_PARENT(n.a);
        Node& pb = MOLOPT_PARENT(n.b);
        if (pa.needs_grad) grad_of(n.a).noalias() += g * pb.value.transpose();
        if (pb.needs_grad) grad_of(n.b).noalias() += pa.value.transpose() * g;
        break;
      }
      case Op::Add:
        if (MOLOPT_PARENT(n.a).needs_grad) grad_of(n.a) += g;
        if (MOLOPT_PARENT(n.b).needs_grad) grad_of(n.b) += g;
        break;
      case Op::AddRow:
        if (MOLOPT_PARENT(n.a).needs_grad) grad_of(n.a) += g;
        if (MOLOPT_PARENT(n.b).needs_grad) grad_of(n.b).row(0) += g.colwise().sum();
        break;
      case Op::Mul:
        if (MOLOPT_PARENT(n.a).needs_grad)
          grad_of(n.a) += g.cwiseProduct(MOLOPT_PARENT(n.b).value);
        if (MOLOPT_PARENT(n.b).needs_grad)
          grad_of(n.b) += g.cwiseProduct(MOLOPT_PARENT(n.a).value);
        break;
      case Op::Affine:
        grad_of(n.a) += n.scale * g;
        break;
      case Op::Sigmoid:
        grad_of(n.a).array() +=
            g.array() * n.value.array() * (1.0 - n.value.array());
        break;
      case Op::Tanh:
        grad_of(n.a).array() += g.array() * (1.0 - n.value.array().square());
        break;
      case Op::Gather: {
        Mat& tg = grad_of(n.a);
        for (std::size_t r = 0; r < n.rows.size(); ++r)
          tg.row(n.rows[r]) += g.row(static_cast<Eigen::Index>(r));
        break;
      }
      case Op::CeMask: {
        Mat& lg = grad_of(n.a);
        for (Eigen::Index r = 0; r < n.value.rows(); ++r) {
          if (!n.mask[static_cast<std::size_t>(r)]) continue;
          const double w = g(r, 0);
          if (w == 0.0) continue;
          lg.row(r) += w * n.softmax.row(r);
          lg(r, n.targets[static_cast<std::size_t>(r)]) -= w;
        }
        break;
      }
      case Op::MeanAll: {
        const Mat& av = MOLOPT_PARENT(n.a).value;
        grad_of(n.a).array() += g(0, 0) / static_cast<double>(av.size());
        break;
      }
    }
    n.grad.resize(0, 0);  // free as soon as this node's contribution is spent
  }
}

#undef MOLOPT_PARENT

}  // namespace molopt::policy

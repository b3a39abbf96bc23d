//
// molopt — Copyright 2026 the molopt authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <vector>

#include <Eigen/Dense>

namespace molopt::policy {

using Mat = Eigen::MatrixXd;

// Reverse-mode gradient tape over dense matrices.  The op set is the minimum
// a GRU language model needs: matmul, elementwise add/mul (plus row-broadcast
// bias add and scalar affine), sigmoid, tanh, embedding gather, a fused
// masked softmax-cross-entropy, and a mean reduction for loss terminals.
//
// Usage: build the graph through the factory methods (each returns a node
// id), read forward results via value(), then call backward() on a scalar
// node.  Gradients for parameter leaves accumulate into the external
// matrices registered with leaf(); everything else is internal.  A Tape is
// single-use: build, backward once, discard.
class Tape {
 public:
  // Trainable parameter: value is copied, gradients accumulate into *grad_sink
  // (sized/zeroed here if empty).
  int leaf(const Mat& value, Mat* grad_sink);
  // Non-differentiable input.
  int constant(Mat value);

  int matmul(int a, int b);
  int add(int a, int b);                 // same shape
  int add_row(int a, int row);           // broadcast a 1×N node over rows of a
  int mul(int a, int b);                 // elementwise
  int affine(int a, double scale, double shift);  // scale·x + shift elementwise
  int sigmoid(int a);
  int tanh(int a);
  // Rows of a table node stacked into a new matrix (embedding lookup).
  int gather(int table, std::vector<int> rows);
  // Per-row −log softmax(logits)[target], as a B×1 column; rows with mask 0
  // contribute 0 and receive no gradient.
  int ce_mask(int logits, std::vector<int> targets, std::vector<char> mask);
  // Scalar mean over all entries (loss terminal).
  int mean_all(int a);

  const Mat& value(int node) const { return nodes_[static_cast<std::size_t>(node)].value; }
  double scalar(int node) const { return value(node)(0, 0); }

  // Reverse pass from a 1×1 node.  Call at most once per tape.
  void backward(int node);

 private:
  enum class Op {
    Leaf, Const, MatMul, Add, AddRow, Mul, Affine, Sigmoid, Tanh, Gather, CeMask, MeanAll
  };
  struct Node {
    Op op;
    int a = -1, b = -1;
    Mat value;
    Mat grad;                    // sized on first contribution, freed after use
    bool needs_grad = false;
    double scale = 1.0, shift = 0.0;  // Affine
    std::vector<int> rows;            // Gather
    std::vector<int> targets;         // CeMask
    std::vector<char> mask;           // CeMask
    Mat softmax;                      // CeMask saved probabilities
    Mat* grad_sink = nullptr;         // Leaf
  };

  int push(Node node);
  Mat& grad_of(int i);

  std::vector<Node> nodes_;
};

}  // namespace molopt::policy

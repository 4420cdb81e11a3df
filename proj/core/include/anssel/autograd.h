// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

// Reverse-mode differentiation over a dynamically recorded graph. Every op in
// namespace `ad` computes its forward value with the Tensor math of
// numerics.h and registers a vector-Jacobian product. Calling backward() on a
// scalar result accumulates gradients into every Var that requires them.

#ifndef ANSSEL_AUTOGRAD_H_
#define ANSSEL_AUTOGRAD_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "anssel/numerics.h"
#include "anssel/tensor.h"

namespace anssel {

using Rng = std::mt19937_64;

namespace detail {

struct Node {
  Tensor value;
  Tensor grad;  // empty until something flows back into this node
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  Tensor& grad_buffer();
  void accumulate(const Tensor& g);
};

}  // namespace detail

// Handle to a graph node. Copies share the node.
class Var {
 public:
  Var() = default;
  explicit Var(Tensor value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Tensor& value() const { return node_->value; }
  // Direct write access for optimizers and checkpoint loading; never use on
  // a node that is part of a live graph.
  Tensor& mutable_value() { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }
  bool requires_grad() const { return node_->requires_grad; }

  bool has_grad() const { return !node_->grad.empty(); }
  // Zero tensor of the value's shape when no gradient has accumulated.
  Tensor grad() const;
  void zero_grad() { node_->grad = Tensor(); }

  // Seeds d(self)/d(self) = 1; the value must hold a single element.
  void backward() const;
  void backward(const Tensor& seed) const;

  const std::shared_ptr<detail::Node>& node() const { return node_; }
  static Var from_node(std::shared_ptr<detail::Node> n);

 private:
  std::shared_ptr<detail::Node> node_;
};

namespace ad {

Var constant(Tensor value);

Var matmul(const Var& a, const Var& b);
Var transpose(const Var& x);
Var add(const Var& a, const Var& b);
Var scale(const Var& x, double factor);
// x[m×n] + b[n] on every row.
Var add_bias(const Var& x, const Var& bias);
// x[m×in] · Wᵀ + b with W[out×in], b[out].
Var linear(const Var& x, const Var& weight, const Var& bias);
Var reshape(const Var& x, Shape shape);

Var softmax_rows(const Var& x);
Var masked_softmax_rows(const Var& x, std::vector<int> key_mask);
Var activation(Activation kind, const Var& x);
inline Var relu(const Var& x) { return activation(Activation::kRelu, x); }
inline Var gelu(const Var& x) { return activation(Activation::kGelu, x); }
inline Var tanh(const Var& x) { return activation(Activation::kTanh, x); }

// Per-row layer normalisation with affine gamma/beta of length n.
Var layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps = 1e-12);

// Matrices with equal row counts, joined left to right.
Var concat_cols(std::span<const Var> parts);
Var slice_rows(const Var& x, std::size_t begin, std::size_t end);
// Row ids[i] of `table` becomes row i of the result.
Var gather_rows(const Var& table, std::span<const std::size_t> ids);

// Column sums as a [1×n] row. Rows are added in lexicographic order of their
// contents, so any permutation of the rows yields bit-identical sums.
Var sum_rows(const Var& x);
// Column maxima as a [1×n] row; the first maximal row receives the gradient.
Var max_rows(const Var& x);

// Sliding windows for a 1-D convolution along the row axis: x[n×d] is
// zero-padded with `padding` rows on both ends and row t of the result is the
// concatenation of padded rows t..t+window-1, shape [(n+2·padding-window+1) ×
// window·d].
Var window_rows(const Var& x, std::size_t window, std::size_t padding);

// Inverted dropout; identity when rate == 0.
Var dropout(const Var& x, double rate, Rng& rng);

// Scalar -ln(max(p[class_index(label)], floor)); zero gradient when clamped.
Var cross_entropy(const Var& probabilities, int label);
Var mean(std::span<const Var> scalars);

}  // namespace ad
}  // namespace anssel

#endif  // ANSSEL_AUTOGRAD_H_

// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/autograd.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "anssel/error.h"

namespace anssel {
namespace detail {

Tensor& Node::grad_buffer() {
  if (grad.empty()) grad = Tensor(value.shape());
  return grad;
}

void Node::accumulate(const Tensor& g) {
  Tensor& buf = grad_buffer();
  if (g.size() != buf.size()) {
    throw ShapeError("gradient " + shape_str(g.shape()) + " for value " +
                     shape_str(value.shape()));
  }
  for (std::size_t i = 0; i < g.size(); ++i) buf[i] += g[i];
}

}  // namespace detail

using detail::Node;
using NodePtr = std::shared_ptr<Node>;

Var::Var(Tensor value, bool requires_grad) : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

Var Var::from_node(NodePtr n) {
  Var v;
  v.node_ = std::move(n);
  return v;
}

Tensor Var::grad() const {
  return node_->grad.empty() ? Tensor(node_->value.shape()) : node_->grad;
}

void Var::backward() const {
  if (node_->value.size() != 1) {
    throw ShapeError("backward() without a seed needs a scalar, got " +
                     shape_str(node_->value.shape()));
  }
  backward(Tensor(node_->value.shape(), 1.0));
}

void Var::backward(const Tensor& seed) const {
  if (!node_->requires_grad) return;
  // Iterative post-order DFS gives a topological order with inputs first.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{node_.get(), 0}};
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->inputs.size()) {
      Node* child = n->inputs[next++].get();
      if (child->requires_grad && seen.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }
  node_->accumulate(seed);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward && !n->grad.empty()) n->backward(*n);
  }
}

namespace ad {
namespace {

// Builds a result node; the backward closure is kept only when some input
// needs a gradient.
Var make(Tensor value, std::vector<Var> inputs, std::function<void(Node&)> backward) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  for (const Var& in : inputs) n->requires_grad = n->requires_grad || in.requires_grad();
  if (n->requires_grad) {
    for (Var& in : inputs) n->inputs.push_back(in.node());
    n->backward = std::move(backward);
  }
  return Var::from_node(std::move(n));
}

Node& in(Node& self, std::size_t i) { return *self.inputs[i]; }

Tensor column_sums(const Tensor& g) {
  Tensor out({g.cols()});
  for (std::size_t r = 0; r < g.rows(); ++r) {
    auto row = g.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j];
  }
  return out;
}

void require_matrix(const Var& x, const char* op) {
  if (x.value().rank() != 2) {
    throw ShapeError(std::string(op) + " expects a matrix, got " + shape_str(x.shape()));
  }
}

}  // namespace

Var constant(Tensor value) { return Var(std::move(value), false); }

Var matmul(const Var& a, const Var& b) {
  return make(anssel::matmul(a.value(), b.value()), {a, b}, [](Node& self) {
    Node& na = in(self, 0);
    Node& nb = in(self, 1);
    if (na.requires_grad) na.accumulate(anssel::matmul(self.grad, anssel::transpose(nb.value)));
    if (nb.requires_grad) nb.accumulate(anssel::matmul(anssel::transpose(na.value), self.grad));
  });
}

Var transpose(const Var& x) {
  return make(anssel::transpose(x.value()), {x}, [](Node& self) {
    in(self, 0).accumulate(anssel::transpose(self.grad));
  });
}

Var add(const Var& a, const Var& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("add: " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return make(std::move(out), {a, b}, [](Node& self) {
    for (std::size_t i = 0; i < 2; ++i)
      if (in(self, i).requires_grad) in(self, i).accumulate(self.grad);
  });
}

Var scale(const Var& x, double factor) {
  Tensor out = x.value();
  for (double& v : out.data()) v *= factor;
  return make(std::move(out), {x}, [factor](Node& self) {
    Tensor g = self.grad;
    for (double& v : g.data()) v *= factor;
    in(self, 0).accumulate(g);
  });
}

Var add_bias(const Var& x, const Var& bias) {
  if (bias.value().size() != x.value().cols()) {
    throw ShapeError("add_bias: bias " + shape_str(bias.shape()) + " for input " +
                     shape_str(x.shape()));
  }
  Tensor out = x.value();
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += bias.value()[j];
  }
  return make(std::move(out), {x, bias}, [](Node& self) {
    if (in(self, 0).requires_grad) in(self, 0).accumulate(self.grad);
    if (in(self, 1).requires_grad) {
      in(self, 1).accumulate(column_sums(self.grad).reshaped(in(self, 1).value.shape()));
    }
  });
}

Var linear(const Var& x, const Var& weight, const Var& bias) {
  require_matrix(x, "linear");
  require_matrix(weight, "linear");
  if (weight.value().cols() != x.value().cols() || bias.value().size() != weight.value().rows()) {
    throw ShapeError("linear: input " + shape_str(x.shape()) + ", weight " +
                     shape_str(weight.shape()) + ", bias " + shape_str(bias.shape()));
  }
  const Tensor& w = weight.value();
  const Tensor& xv = x.value();
  Tensor out({xv.rows(), w.rows()});
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    auto xr = xv.row(r);
    for (std::size_t o = 0; o < w.rows(); ++o) {
      auto wr = w.row(o);
      double acc = bias.value()[o];
      for (std::size_t j = 0; j < xr.size(); ++j) acc += xr[j] * wr[j];
      out(r, o) = acc;
    }
  }
  return make(std::move(out), {x, weight, bias}, [](Node& self) {
    Node& nx = in(self, 0);
    Node& nw = in(self, 1);
    Node& nb = in(self, 2);
    if (nx.requires_grad) nx.accumulate(anssel::matmul(self.grad, nw.value));
    if (nw.requires_grad) nw.accumulate(anssel::matmul(anssel::transpose(self.grad), nx.value));
    if (nb.requires_grad) nb.accumulate(column_sums(self.grad).reshaped(nb.value.shape()));
  });
}

Var reshape(const Var& x, Shape shape) {
  return make(x.value().reshaped(std::move(shape)), {x}, [](Node& self) {
    in(self, 0).accumulate(self.grad.reshaped(in(self, 0).value.shape()));
  });
}

namespace {

// dx = y ⊙ (dy − <dy, y>) row by row; shared by both softmax variants.
Tensor softmax_vjp(const Tensor& y, const Tensor& dy) {
  Tensor dx(y.shape());
  for (std::size_t r = 0; r < y.rows(); ++r) {
    auto yr = y.row(r);
    auto gr = dy.row(r);
    double dot = 0.0;
    for (std::size_t j = 0; j < yr.size(); ++j) dot += yr[j] * gr[j];
    auto out = dx.row(r);
    for (std::size_t j = 0; j < yr.size(); ++j) out[j] = yr[j] * (gr[j] - dot);
  }
  return dx;
}

}  // namespace

Var softmax_rows(const Var& x) {
  return make(anssel::softmax_rows(x.value()), {x}, [](Node& self) {
    in(self, 0).accumulate(softmax_vjp(self.value, self.grad));
  });
}

Var masked_softmax_rows(const Var& x, std::vector<int> key_mask) {
  return make(anssel::masked_softmax_rows(x.value(), key_mask), {x}, [](Node& self) {
    in(self, 0).accumulate(softmax_vjp(self.value, self.grad));
  });
}

Var activation(Activation kind, const Var& x) {
  return make(anssel::activation(kind, x.value()), {x}, [kind](Node& self) {
    const Tensor& xv = in(self, 0).value;
    Tensor g = self.grad;
    for (std::size_t i = 0; i < g.size(); ++i) {
      switch (kind) {
        case Activation::kRelu: g[i] *= xv[i] > 0.0 ? 1.0 : 0.0; break;
        case Activation::kGelu: g[i] *= gelu_derivative(xv[i]); break;
        case Activation::kTanh: g[i] *= 1.0 - self.value[i] * self.value[i]; break;
      }
    }
    in(self, 0).accumulate(g);
  });
}

Var layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps) {
  require_matrix(x, "layer_norm");
  const Tensor& xv = x.value();
  const std::size_t n = xv.cols();
  if (gamma.value().size() != n || beta.value().size() != n) {
    throw ShapeError("layer_norm: affine parameters do not match " + shape_str(x.shape()));
  }
  Tensor normed(xv.shape());
  std::vector<double> inv_std(xv.rows());
  Tensor out(xv.shape());
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    auto row = xv.row(r);
    const double mu = std::accumulate(row.begin(), row.end(), 0.0) / n;
    double var = 0.0;
    for (double v : row) var += (v - mu) * (v - mu);
    var /= n;
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      normed(r, j) = (row[j] - mu) * inv_std[r];
      out(r, j) = gamma.value()[j] * normed(r, j) + beta.value()[j];
    }
  }
  return make(std::move(out), {x, gamma, beta},
              [normed = std::move(normed), inv_std = std::move(inv_std)](Node& self) {
                const std::size_t rows = normed.rows(), n = normed.cols();
                Node& nx = in(self, 0);
                Node& ng = in(self, 1);
                Node& nb = in(self, 2);
                if (ng.requires_grad || nb.requires_grad) {
                  Tensor dg(ng.value.shape()), db(nb.value.shape());
                  for (std::size_t r = 0; r < rows; ++r)
                    for (std::size_t j = 0; j < n; ++j) {
                      dg[j] += self.grad(r, j) * normed(r, j);
                      db[j] += self.grad(r, j);
                    }
                  if (ng.requires_grad) ng.accumulate(dg);
                  if (nb.requires_grad) nb.accumulate(db);
                }
                if (!nx.requires_grad) return;
                Tensor dx(normed.shape());
                for (std::size_t r = 0; r < rows; ++r) {
                  double mean_g = 0.0, mean_gx = 0.0;
                  for (std::size_t j = 0; j < n; ++j) {
                    const double g = self.grad(r, j) * ng.value[j];
                    mean_g += g;
                    mean_gx += g * normed(r, j);
                  }
                  mean_g /= n;
                  mean_gx /= n;
                  for (std::size_t j = 0; j < n; ++j) {
                    const double g = self.grad(r, j) * ng.value[j];
                    dx(r, j) = inv_std[r] * (g - mean_g - normed(r, j) * mean_gx);
                  }
                }
                nx.accumulate(dx);
              });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols of nothing");
  const std::size_t rows = parts[0].value().rows();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Var& p : parts) {
    if (p.value().rows() != rows) {
      throw ShapeError("concat_cols: row counts differ (" + shape_str(parts[0].shape()) +
                       " vs " + shape_str(p.shape()) + ")");
    }
    widths.push_back(p.value().cols());
    total += widths.back();
  }
  Tensor out({rows, total});
  std::size_t offset = 0;
  for (const Var& p : parts) {
    for (std::size_t r = 0; r < rows; ++r) {
      auto src = p.value().row(r);
      std::copy(src.begin(), src.end(), out.row(r).begin() + offset);
    }
    offset += p.value().cols();
  }
  return make(std::move(out), std::vector<Var>(parts.begin(), parts.end()),
              [widths](Node& self) {
                std::size_t off = 0;
                for (std::size_t i = 0; i < widths.size(); ++i) {
                  Node& n = in(self, i);
                  if (n.requires_grad) {
                    Tensor g(n.value.shape());
                    const std::size_t w = widths[i];
                    for (std::size_t r = 0; r < self.grad.rows(); ++r) {
                      auto src = self.grad.row(r).subspan(off, w);
                      std::copy(src.begin(), src.end(), g.data().begin() + r * w);
                    }
                    n.accumulate(g);
                  }
                  off += widths[i];
                }
              });
}

Var slice_rows(const Var& x, std::size_t begin, std::size_t end) {
  require_matrix(x, "slice_rows");
  if (begin >= end || end > x.value().rows()) {
    throw ShapeError("slice_rows [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") of " + shape_str(x.shape()));
  }
  const std::size_t cols = x.value().cols();
  auto src = x.value().data().subspan(begin * cols, (end - begin) * cols);
  Tensor out({end - begin, cols}, std::vector<double>(src.begin(), src.end()));
  return make(std::move(out), {x}, [begin, cols](Node& self) {
    Tensor& g = in(self, 0).grad_buffer();
    for (std::size_t i = 0; i < self.grad.size(); ++i) g[begin * cols + i] += self.grad[i];
  });
}

Var gather_rows(const Var& table, std::span<const std::size_t> ids) {
  require_matrix(table, "gather_rows");
  const std::size_t cols = table.value().cols();
  if (ids.empty()) throw ShapeError("gather_rows with no ids");
  Tensor out({ids.size(), cols});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= table.value().rows()) {
      throw DataError("row id " + std::to_string(ids[i]) + " out of range for table " +
                      shape_str(table.shape()));
    }
    auto src = table.value().row(ids[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return make(std::move(out), {table},
              [ids = std::vector<std::size_t>(ids.begin(), ids.end()), cols](Node& self) {
                Tensor& g = in(self, 0).grad_buffer();
                for (std::size_t i = 0; i < ids.size(); ++i)
                  for (std::size_t j = 0; j < cols; ++j) g(ids[i], j) += self.grad(i, j);
              });
}

Var sum_rows(const Var& x) {
  const Tensor& xv = x.value();
  std::vector<std::size_t> order(xv.rows());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto ra = xv.row(a), rb = xv.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  Tensor out({1, xv.cols()});
  for (std::size_t r : order) {
    auto row = xv.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j];
  }
  return make(std::move(out), {x}, [](Node& self) {
    Tensor& g = in(self, 0).grad_buffer();
    for (std::size_t r = 0; r < g.rows(); ++r) {
      auto row = g.row(r);
      for (std::size_t j = 0; j < row.size(); ++j) row[j] += self.grad[j];
    }
  });
}

Var max_rows(const Var& x) {
  const Tensor& xv = x.value();
  const std::size_t cols = xv.cols();
  Tensor out({1, cols});
  std::vector<std::size_t> argmax(cols, 0);
  for (std::size_t j = 0; j < cols; ++j) {
    out[j] = xv(0, j);
    for (std::size_t r = 1; r < xv.rows(); ++r) {
      if (xv(r, j) > out[j]) {
        out[j] = xv(r, j);
        argmax[j] = r;
      }
    }
  }
  return make(std::move(out), {x}, [argmax = std::move(argmax)](Node& self) {
    Tensor& g = in(self, 0).grad_buffer();
    for (std::size_t j = 0; j < argmax.size(); ++j) g(argmax[j], j) += self.grad[j];
  });
}

Var window_rows(const Var& x, std::size_t window, std::size_t padding) {
  require_matrix(x, "window_rows");
  const std::size_t n = x.value().rows(), d = x.value().cols();
  if (window == 0 || n + 2 * padding < window) {
    throw ShapeError("window_rows: window " + std::to_string(window) + " over " +
                     std::to_string(n) + " rows with padding " + std::to_string(padding));
  }
  const std::size_t out_rows = n + 2 * padding - window + 1;
  Tensor out({out_rows, window * d});
  // Padded row p maps to source row p - padding when in range.
  for (std::size_t t = 0; t < out_rows; ++t) {
    for (std::size_t k = 0; k < window; ++k) {
      const std::size_t p = t + k;
      if (p < padding || p >= padding + n) continue;
      auto src = x.value().row(p - padding);
      std::copy(src.begin(), src.end(), out.row(t).begin() + k * d);
    }
  }
  return make(std::move(out), {x}, [window, padding, n, d](Node& self) {
    Tensor& g = in(self, 0).grad_buffer();
    for (std::size_t t = 0; t < self.grad.rows(); ++t) {
      for (std::size_t k = 0; k < window; ++k) {
        const std::size_t p = t + k;
        if (p < padding || p >= padding + n) continue;
        auto src = self.grad.row(t).subspan(k * d, d);
        auto dst = g.row(p - padding);
        for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
      }
    }
  });
}

Var dropout(const Var& x, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout rate must be in [0, 1)");
  if (rate == 0.0) return x;
  std::bernoulli_distribution keep(1.0 - rate);
  const double kept_scale = 1.0 / (1.0 - rate);
  Tensor mask(x.shape());
  for (double& m : mask.data()) m = keep(rng) ? kept_scale : 0.0;
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return make(std::move(out), {x}, [mask = std::move(mask)](Node& self) {
    Tensor g = self.grad;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= mask[i];
    in(self, 0).accumulate(g);
  });
}

Var cross_entropy(const Var& probabilities, int label) {
  const double loss = anssel::cross_entropy(probabilities.value(), label);
  const std::size_t idx = class_index(label);
  return make(Tensor::scalar(loss), {probabilities}, [idx](Node& self) {
    const Tensor& p = in(self, 0).value;
    Tensor g(p.shape());
    if (p[idx] > kProbabilityFloor) g[idx] = -self.grad[0] / p[idx];
    in(self, 0).accumulate(g);
  });
}

Var mean(std::span<const Var> scalars) {
  if (scalars.empty()) throw ShapeError("mean of no values");
  double total = 0.0;
  for (const Var& s : scalars) {
    if (s.value().size() != 1) throw ShapeError("mean expects scalars, got " + shape_str(s.shape()));
    total += s.value()[0];
  }
  const double n = static_cast<double>(scalars.size());
  return make(Tensor::scalar(total / n), std::vector<Var>(scalars.begin(), scalars.end()),
              [n](Node& self) {
                const Tensor g = Tensor::scalar(self.grad[0] / n);
                for (auto& input : self.inputs)
                  if (input->requires_grad) input->accumulate(g.reshaped(input->value.shape()));
              });
}

}  // namespace ad
}  // namespace anssel

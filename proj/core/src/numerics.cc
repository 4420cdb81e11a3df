// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/numerics.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "anssel/error.h"

namespace anssel {

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "gelu") return Activation::kGelu;
  if (name == "tanh") return Activation::kTanh;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

std::size_t class_index(int label) {
  if (label != 0 && label != 1) {
    throw DataError("label must be 0 or 1, got " + std::to_string(label));
  }
  return label == 1 ? 0 : 1;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    throw ShapeError("matmul: cannot multiply " + shape_str(a.shape()) + " by " +
                     shape_str(b.shape()));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor c({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = &c(i, 0);
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a(i, p);
      if (aip == 0.0) continue;
      const double* brow = b.data().data() + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
  return c;
}

Tensor transpose(const Tensor& x) {
  if (x.rank() != 2) throw ShapeError("transpose expects a matrix, got " + shape_str(x.shape()));
  Tensor t({x.cols(), x.rows()});
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) t(j, i) = x(i, j);
  return t;
}

Tensor softmax_rows(const Tensor& x) {
  x.check_finite("softmax_rows input");
  Tensor y(x.shape());
  const std::size_t n = x.cols();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto in = x.row(r);
    auto out = y.row(r);
    const double mx = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += (out[j] = std::exp(in[j] - mx));
    for (std::size_t j = 0; j < n; ++j) out[j] /= total;
  }
  return y;
}

Tensor masked_softmax_rows(const Tensor& x, std::span<const int> key_mask) {
  x.check_finite("masked_softmax_rows input");
  const std::size_t n = x.cols();
  if (key_mask.size() != n) {
    throw ShapeError("mask of length " + std::to_string(key_mask.size()) +
                     " for scores " + shape_str(x.shape()));
  }
  Tensor y(x.shape());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto in = x.row(r);
    auto out = y.row(r);
    double mx = -INFINITY;
    for (std::size_t j = 0; j < n; ++j)
      if (key_mask[j]) mx = std::max(mx, in[j]);
    if (mx == -INFINITY) continue;  // every key masked: zero row
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (key_mask[j]) total += (out[j] = std::exp(in[j] - mx));
    for (std::size_t j = 0; j < n; ++j) out[j] /= total;
  }
  return y;
}

double gelu(double x) { return 0.5 * x * std::erfc(-x / std::numbers::sqrt2); }

double gelu_derivative(double x) {
  const double cdf = 0.5 * std::erfc(-x / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * x * x) * std::numbers::inv_sqrtpi / std::numbers::sqrt2;
  return cdf + x * pdf;
}

Tensor activation(Activation kind, const Tensor& x) {
  x.check_finite("activation input");
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    switch (kind) {
      case Activation::kRelu: y[i] = x[i] > 0.0 ? x[i] : 0.0; break;
      case Activation::kGelu: y[i] = gelu(x[i]); break;
      case Activation::kTanh: y[i] = std::tanh(x[i]); break;
    }
  }
  return y;
}

double cross_entropy(const Tensor& probabilities, int label) {
  const std::size_t idx = class_index(label);
  if (probabilities.size() != 2) {
    throw ShapeError("cross_entropy expects 2 probabilities, got " +
                     shape_str(probabilities.shape()));
  }
  probabilities.check_finite("cross_entropy input");
  if (std::abs(probabilities[0] + probabilities[1] - 1.0) > 1e-6) {
    throw NumericError("cross_entropy: probabilities do not sum to 1");
  }
  return -std::log(std::max(probabilities[idx], kProbabilityFloor));
}

}  // namespace anssel

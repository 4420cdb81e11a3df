// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

// Forward-only dense math on Tensor values. The differentiable counterparts
// live in autograd.h and delegate their forward pass to these functions.

#ifndef ANSSEL_NUMERICS_H_
#define ANSSEL_NUMERICS_H_

#include <span>
#include <string_view>

#include "anssel/tensor.h"

namespace anssel {

enum class Activation { kRelu, kGelu, kTanh };

// "relu" | "gelu" | "tanh"; anything else is a ConfigError.
Activation parse_activation(std::string_view name);

// Floor applied to the labelled probability before taking the log.
inline constexpr double kProbabilityFloor = 1e-12;

// Label 1 ("correct") is output index 0, label 0 is index 1.
std::size_t class_index(int label);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& x);

// Row-wise softmax, stabilised by subtracting the row maximum.
Tensor softmax_rows(const Tensor& x);

// Softmax over the columns whose key_mask entry is non-zero. Masked columns
// get probability exactly 0; a row with every column masked is all zeros.
Tensor masked_softmax_rows(const Tensor& x, std::span<const int> key_mask);

// Exact GELU, x * Phi(x) with Phi from erfc.
double gelu(double x);
double gelu_derivative(double x);

Tensor activation(Activation kind, const Tensor& x);

// -ln(max(p[class_index(label)], floor)). `probabilities` holds two entries
// summing to one within 1e-6.
double cross_entropy(const Tensor& probabilities, int label);

}  // namespace anssel

#endif  // ANSSEL_NUMERICS_H_

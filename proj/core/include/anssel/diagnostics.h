// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end gradient check of a small model: random pair encodings, mean
// cross-entropy, dropout off, every trainable coordinate perturbed.

#ifndef ANSSEL_DIAGNOSTICS_H_
#define ANSSEL_DIAGNOSTICS_H_

#include <cstddef>
#include <cstdint>
#include <string>

#include "anssel/grad_check.h"
#include "anssel/model.h"

namespace anssel {

struct ModelGradCheckOptions {
  HeadKind kind = HeadKind::kBaseline;
  std::size_t layers = 2;
  std::size_t hidden = 8;
  std::size_t heads = 2;
  std::size_t max_len = 16;
  std::size_t vocab_size = 24;
  std::size_t head_hidden = 16;
  std::size_t cnn_filters = 6;
  bool bert_compat = false;
  std::size_t pairs = 2;
  // Parameters are redrawn from U(-bound, bound) when positive; a negative
  // value selects sqrt(3 / hidden), which keeps activations at unit scale
  // away from ReLU and max-pool kinks. Zero keeps the model's own init.
  double uniform_bound = -1.0;
  double step = 1e-5;
  std::uint64_t seed = 1;
};

ModelConfig toy_model_config(const ModelGradCheckOptions& options);

struct ModelGradCheckReport {
  GradCheckResult result;
  std::string worst_parameter;
  double seconds = 0.0;
};

ModelGradCheckReport model_grad_check(const ModelGradCheckOptions& options);

}  // namespace anssel

#endif  // ANSSEL_DIAGNOSTICS_H_

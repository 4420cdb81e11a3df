// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

// Classifier heads mapping an EncodedPair to two class probabilities.
// Index 0 is the probability that the candidate answers the question.

#ifndef ANSSEL_HEADS_H_
#define ANSSEL_HEADS_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "anssel/encoder.h"

namespace anssel {

enum class HeadKind { kBaseline, kBow, kCnn, kRnn };

std::string_view to_string(HeadKind kind);
// "baseline", "bow", "cnn" or "rnn"; ConfigError otherwise.
HeadKind parse_head_kind(std::string_view name);

struct HeadConfig {
  HeadKind kind = HeadKind::kBaseline;
  std::size_t hidden = 1024;
  std::size_t cnn_filters = 200;
  std::size_t cnn_window = 3;  // zero padding is window - 1 per side
  std::size_t rnn_layers = 2;
  double dropout = 0.2;

  // Width of the classifier input for an encoder of width `h`.
  std::size_t input_size(std::size_t h) const;
  void validate() const;
};

struct RnnLayerWeights {
  Var w_x;  // h × h (out × in)
  Var w_h;  // h × h
  Var b;    // h
};

struct HeadWeights {
  Var w_h1;  // hidden × in
  Var b_h1;  // hidden
  Var w_h2;  // 2 × hidden
  Var b_h2;  // 2
  Var cnn_filters;  // filters × (window·h)
  Var cnn_bias;     // filters
  std::vector<RnnLayerWeights> rnn;

  static HeadWeights create(const HeadConfig& cfg, std::size_t h, ParameterStore& store,
                            Rng& rng, const WeightInit& init = {},
                            const std::string& prefix = "head");
};

// Closed-form count of head scalars for encoder width `h`.
std::size_t head_parameter_count(const HeadConfig& cfg, std::size_t h, bool include_biases = true);

// softmax(W_h2 · relu(W_h1 · I + b_h1) + b_h2), with dropout on I in training.
Var classify(const Var& input, const HeadWeights& w, const HeadConfig& cfg,
             const ForwardContext& ctx);

// Stream features. An undefined (empty) stream yields zeros.
Var bow_features(const Var& stream, std::size_t h);
Var cnn_features(const Var& stream, const HeadWeights& w, const HeadConfig& cfg);
Var rnn_features(const Var& stream, const HeadWeights& w, std::size_t h);

Var bb_baseline(const EncodedPair& p, const HeadWeights& w, const HeadConfig& cfg,
                const ForwardContext& ctx);
Var bb_bow(const EncodedPair& p, const HeadWeights& w, const HeadConfig& cfg,
           const ForwardContext& ctx);
Var bb_cnn(const EncodedPair& p, const HeadWeights& w, const HeadConfig& cfg,
           const ForwardContext& ctx);
Var bb_rnn(const EncodedPair& p, const HeadWeights& w, const HeadConfig& cfg,
           const ForwardContext& ctx);

// Dispatches on cfg.kind. Returns a length-2 probability vector.
Var head_forward(const EncodedPair& p, const HeadWeights& w, const HeadConfig& cfg,
                 const ForwardContext& ctx);

}  // namespace anssel

#endif  // ANSSEL_HEADS_H_

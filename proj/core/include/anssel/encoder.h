// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

// Transformer encoder stack. Each layer is, per head i,
//
//   Q_i = X W_Q_i,  K_i = X W_K_i,  V_i = X W_V_i
//   Z_i = softmax(Q_i K_iᵀ / sqrt(head_dim)) V_i
//
// followed by Z = [Z_1 … Z_A] W_O and X_new = Z W_F + b_F. There is no
// residual path or normalisation unless `bert_compat` is set, in which case
// X1 = LN(X + Z) and X_new = LN(X1 + gelu(X1 W_F + b_F)).

#ifndef ANSSEL_ENCODER_H_
#define ANSSEL_ENCODER_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "anssel/autograd.h"
#include "anssel/parameter.h"
#include "anssel/tokenizer.h"

namespace anssel {

struct EncoderConfig {
  std::size_t layers = 12;
  std::size_t hidden = 768;
  std::size_t heads = 12;
  std::size_t vocab_size = 30522;
  std::size_t max_len = kDefaultMaxLen;
  double dropout = 0.2;
  bool bert_compat = false;

  std::size_t head_dim() const { return hidden / heads; }
  // Throws ConfigError unless all sizes are positive and heads divides hidden.
  void validate() const;
};

// Closed-form count of encoder scalars.
std::size_t encoder_parameter_count(const EncoderConfig& cfg);

struct HeadProjection {
  Var wq, wk, wv;  // hidden × head_dim
};

struct LayerWeights {
  std::vector<HeadProjection> heads;
  Var wo;  // hidden × hidden
  Var wf;  // hidden × hidden
  Var bf;  // hidden
  // bert_compat only.
  Var ln1_gamma, ln1_beta, ln2_gamma, ln2_beta;
};

struct EncoderWeights {
  Var token_embedding;     // vocab_size × hidden
  Var position_embedding;  // max_len × hidden
  Var segment_embedding;   // 2 × hidden
  std::vector<LayerWeights> layers;

  // Registers every tensor in `store` under `prefix`.
  static EncoderWeights create(const EncoderConfig& cfg, ParameterStore& store, Rng& rng,
                               const WeightInit& init = {}, const std::string& prefix = "encoder");
};

// Training switches dropout on; `rng` must be set when it is.
struct ForwardContext {
  bool training = false;
  Rng* rng = nullptr;

  Var dropout(const Var& x, double rate) const;
};

// Rows after the final layer: [CLS], question span, answer span. [SEP] and
// [PAD] rows are dropped. An empty span leaves its Var undefined.
struct EncodedPair {
  Var cls;  // 1 × hidden
  Var question;
  Var answer;
  std::size_t question_len = 0;
  std::size_t answer_len = 0;
};

// token_emb[id_t] + pos_emb[t] + seg_emb[segment_t] for every position,
// shape max_len × hidden.
Var embed(const PairEncoding& enc, const EncoderWeights& w, const ForwardContext& ctx,
          double dropout = 0.0);

struct HeadOutput {
  Var z;          // n × head_dim
  Var attention;  // n × n
};

// Masked positions (mask 0) are excluded as keys.
HeadOutput self_attention_head(const Var& x, const HeadProjection& head,
                               std::span<const int> mask);

Var encoder_layer(const Var& x, const LayerWeights& lw, std::span<const int> mask,
                  const EncoderConfig& cfg, const ForwardContext& ctx);

// Embeds, runs the layer stack over the non-pad prefix and splits the rows.
// The pad suffix is cut before the stack; masked keys never influence the
// unmasked rows, so this is the same as running over max_len positions.
EncodedPair encode(const PairEncoding& enc, const EncoderWeights& w, const EncoderConfig& cfg,
                   const ForwardContext& ctx);

}  // namespace anssel

#endif  // ANSSEL_ENCODER_H_

// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

// Encoder plus classifier head, and the text-to-score pipeline around it.

#ifndef ANSSEL_MODEL_H_
#define ANSSEL_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "anssel/encoder.h"
#include "anssel/heads.h"
#include "anssel/parameter.h"
#include "anssel/preprocess.h"
#include "anssel/tokenizer.h"

namespace anssel {

struct ModelConfig {
  EncoderConfig encoder;
  HeadConfig head;
  WeightInit init;
  Precision precision = Precision::kFloat64;

  void validate() const;
};

class Model {
 public:
  Model(const ModelConfig& cfg, std::uint64_t seed);

  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;
  Model(Model&&) = default;
  Model& operator=(Model&&) = default;

  const ModelConfig& config() const { return cfg_; }
  ParameterStore& parameters() { return store_; }
  const ParameterStore& parameters() const { return store_; }
  const EncoderWeights& encoder() const { return encoder_; }
  const HeadWeights& head() const { return head_; }

  // Length-2 class probabilities.
  Var forward(const PairEncoding& enc, const ForwardContext& ctx) const;
  // Probability of class 0 (correct) with dropout off.
  double score(const PairEncoding& enc) const;

  // Refills every trainable tensor from U(-bound, bound).
  void reinitialize_uniform(double bound, Rng& rng);

 private:
  ModelConfig cfg_;
  ParameterStore store_;
  EncoderWeights encoder_;
  HeadWeights head_;
};

struct ParameterCounts {
  std::size_t encoder = 0;
  std::size_t head = 0;
  std::size_t head_without_biases = 0;
  std::size_t total = 0;
  std::size_t encoder_closed_form = 0;
  std::size_t head_closed_form = 0;

  bool consistent() const {
    return encoder == encoder_closed_form && head == head_closed_form && total == encoder + head;
  }
};

// Enumerates trainable scalars and computes the closed forms alongside.
ParameterCounts count_parameters(const Model& model);

// Text in, class-0 probability out: highlight, wordpiece, pair template,
// encoder, head.
class Scorer {
 public:
  Scorer(const Model& model, const Vocabulary& vocab, const Preprocessor& preprocessor);

  PairEncoding prepare(std::string_view question, std::string_view answer) const;
  double score_pair(std::string_view question, std::string_view answer) const;

  const Model& model() const { return *model_; }

 private:
  const Model* model_;
  const Vocabulary* vocab_;
  const Preprocessor* preprocessor_;
};

// Wordpiece both sides of an already preprocessed pair and lay out the
// template.
PairEncoding encode_text_pair(std::string_view question, std::string_view answer,
                              const Vocabulary& vocab, std::size_t max_len);

}  // namespace anssel

#endif  // ANSSEL_MODEL_H_

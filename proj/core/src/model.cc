// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/model.h"

#include <random>

#include "anssel/error.h"

namespace anssel {

void ModelConfig::validate() const {
  encoder.validate();
  head.validate();
  if (!(init.std > 0.0)) throw ConfigError("init_std must be positive");
}

Model::Model(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(seed);
  encoder_ = EncoderWeights::create(cfg_.encoder, store_, rng, cfg_.init);
  head_ = HeadWeights::create(cfg_.head, cfg_.encoder.hidden, store_, rng, cfg_.init);
  store_.apply_precision(cfg_.precision);
}

Var Model::forward(const PairEncoding& enc, const ForwardContext& ctx) const {
  return head_forward(encode(enc, encoder_, cfg_.encoder, ctx), head_, cfg_.head, ctx);
}

double Model::score(const PairEncoding& enc) const {
  return forward(enc, ForwardContext{}).value()[0];
}

void Model::reinitialize_uniform(double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (const Parameter& p : store_.all()) {
    if (!p.trainable) continue;
    Var v = p.var;
    for (double& x : v.mutable_value().data()) x = dist(rng);
  }
  store_.apply_precision(cfg_.precision);
}

ParameterCounts count_parameters(const Model& model) {
  ParameterCounts c;
  for (const Parameter& p : model.parameters().all()) {
    if (!p.trainable) continue;
    const std::size_t n = p.var.value().size();
    if (p.name.starts_with("encoder.")) {
      c.encoder += n;
    } else {
      c.head += n;
      if (p.role != ParamRole::kBias) c.head_without_biases += n;
    }
  }
  c.total = model.parameters().count_scalars();
  const ModelConfig& cfg = model.config();
  c.encoder_closed_form = encoder_parameter_count(cfg.encoder);
  c.head_closed_form = head_parameter_count(cfg.head, cfg.encoder.hidden);
  return c;
}

PairEncoding encode_text_pair(std::string_view question, std::string_view answer,
                              const Vocabulary& vocab, std::size_t max_len) {
  return build_pair_input(wordpiece_tokenize(question, vocab), wordpiece_tokenize(answer, vocab),
                          vocab, max_len);
}

Scorer::Scorer(const Model& model, const Vocabulary& vocab, const Preprocessor& preprocessor)
    : model_(&model), vocab_(&vocab), preprocessor_(&preprocessor) {
  if (vocab.size() != model.config().encoder.vocab_size) {
    throw ConfigError("vocabulary has " + std::to_string(vocab.size()) +
                      " tokens but the model expects " +
                      std::to_string(model.config().encoder.vocab_size));
  }
}

PairEncoding Scorer::prepare(std::string_view question, std::string_view answer) const {
  const PreprocessedPair pp = (*preprocessor_)(question, answer);
  return encode_text_pair(pp.question, pp.answer, *vocab_, model_->config().encoder.max_len);
}

double Scorer::score_pair(std::string_view question, std::string_view answer) const {
  return model_->score(prepare(question, answer));
}

}  // namespace anssel

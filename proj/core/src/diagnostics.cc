// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/diagnostics.h"

#include <chrono>
#include <cmath>
#include <random>

#include "anssel/error.h"

namespace anssel {

ModelConfig toy_model_config(const ModelGradCheckOptions& options) {
  ModelConfig cfg;
  cfg.encoder.layers = options.layers;
  cfg.encoder.hidden = options.hidden;
  cfg.encoder.heads = options.heads;
  cfg.encoder.max_len = options.max_len;
  cfg.encoder.vocab_size = options.vocab_size;
  cfg.encoder.bert_compat = options.bert_compat;
  cfg.head.kind = options.kind;
  cfg.head.hidden = options.head_hidden;
  cfg.head.cnn_filters = options.cnn_filters;
  cfg.precision = Precision::kFloat64;
  return cfg;
}

namespace {

// Random question/answer lengths that leave at least one pad position.
PairEncoding random_encoding(std::size_t vocab_size, std::size_t max_len, Rng& rng) {
  std::uniform_int_distribution<std::size_t> word(5, vocab_size - 1);
  std::uniform_int_distribution<std::size_t> qlen(1, (max_len - 4) / 2);
  std::uniform_int_distribution<std::size_t> alen(1, (max_len - 4) / 2);
  const std::size_t nq = qlen(rng), na = alen(rng);
  PairEncoding e;
  e.token_ids.assign(max_len, 0);
  e.segment_ids.assign(max_len, 0);
  e.attention_mask.assign(max_len, 0);
  std::size_t t = 0;
  auto push = [&](std::size_t id, int segment) {
    e.token_ids[t] = id;
    e.segment_ids[t] = segment;
    e.attention_mask[t] = 1;
    ++t;
  };
  push(2, 0);
  e.question_span.begin = t;
  for (std::size_t i = 0; i < nq; ++i) push(word(rng), 0);
  e.question_span.end = t;
  push(3, 0);
  e.answer_span.begin = t;
  for (std::size_t i = 0; i < na; ++i) push(word(rng), 1);
  e.answer_span.end = t;
  push(3, 1);
  return e;
}

}  // namespace

ModelGradCheckReport model_grad_check(const ModelGradCheckOptions& options) {
  if (options.vocab_size < 6) throw ConfigError("gradient check needs a vocabulary of at least 6");
  if (options.max_len < 8) throw ConfigError("gradient check needs max_len >= 8");
  const auto start = std::chrono::steady_clock::now();
  Model model(toy_model_config(options), options.seed);
  Rng rng(options.seed + 1);
  const double bound = options.uniform_bound < 0.0
                           ? std::sqrt(3.0 / static_cast<double>(options.hidden))
                           : options.uniform_bound;
  if (bound > 0.0) model.reinitialize_uniform(bound, rng);

  std::vector<PairEncoding> inputs;
  std::vector<int> labels;
  for (std::size_t i = 0; i < options.pairs; ++i) {
    inputs.push_back(random_encoding(options.vocab_size, options.max_len, rng));
    labels.push_back(static_cast<int>(i % 2 == 0));
  }
  auto objective = [&] {
    std::vector<Var> losses;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      losses.push_back(ad::cross_entropy(model.forward(inputs[i], ForwardContext{}), labels[i]));
    }
    return ad::mean(losses);
  };

  std::vector<Var> vars = model.parameters().trainable_vars();
  ModelGradCheckReport report;
  report.result = grad_check(objective, vars, options.step);
  std::size_t k = 0;
  for (const Parameter& p : model.parameters().all()) {
    if (!p.trainable) continue;
    if (k++ == report.result.worst_var) report.worst_parameter = p.name;
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace anssel

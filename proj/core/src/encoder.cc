// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/encoder.h"

#include <cmath>

#include "anssel/error.h"

namespace anssel {

void EncoderConfig::validate() const {
  if (hidden == 0 || heads == 0 || vocab_size == 0 || max_len == 0) {
    throw ConfigError("encoder sizes must be positive");
  }
  if (hidden % heads != 0) {
    throw ConfigError("hidden size " + std::to_string(hidden) + " is not divisible by " +
                      std::to_string(heads) + " heads");
  }
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("encoder dropout must be in [0, 1)");
}

std::size_t encoder_parameter_count(const EncoderConfig& cfg) {
  const std::size_t h = cfg.hidden;
  std::size_t per_layer = 3 * h * cfg.head_dim() * cfg.heads + h * h + h * h + h;
  if (cfg.bert_compat) per_layer += 4 * h;
  return cfg.vocab_size * h + cfg.max_len * h + 2 * h + cfg.layers * per_layer;
}

EncoderWeights EncoderWeights::create(const EncoderConfig& cfg, ParameterStore& store, Rng& rng,
                                      const WeightInit& init, const std::string& prefix) {
  cfg.validate();
  const std::size_t h = cfg.hidden, d = cfg.head_dim();
  EncoderWeights w;
  w.token_embedding = store.add(prefix + ".embeddings.token", init.embedding({cfg.vocab_size, h}, rng),
                                ParamRole::kEmbedding);
  w.position_embedding = store.add(prefix + ".embeddings.position", init.embedding({cfg.max_len, h}, rng),
                                   ParamRole::kEmbedding);
  w.segment_embedding =
      store.add(prefix + ".embeddings.segment", init.embedding({2, h}, rng), ParamRole::kEmbedding);
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const std::string lp = prefix + ".layer" + std::to_string(l);
    LayerWeights lw;
    for (std::size_t i = 0; i < cfg.heads; ++i) {
      const std::string hs = ".head" + std::to_string(i);
      HeadProjection hp;
      hp.wq = store.add(lp + ".wq" + hs, init.matrix({h, d}, h, rng), ParamRole::kMatrix);
      hp.wk = store.add(lp + ".wk" + hs, init.matrix({h, d}, h, rng), ParamRole::kMatrix);
      hp.wv = store.add(lp + ".wv" + hs, init.matrix({h, d}, h, rng), ParamRole::kMatrix);
      lw.heads.push_back(hp);
    }
    lw.wo = store.add(lp + ".wo", init.matrix({h, h}, h, rng), ParamRole::kMatrix);
    lw.wf = store.add(lp + ".wf", init.matrix({h, h}, h, rng), ParamRole::kMatrix);
    lw.bf = store.add(lp + ".bf", Tensor({h}), ParamRole::kBias);
    if (cfg.bert_compat) {
      lw.ln1_gamma = store.add(lp + ".ln1.gamma", Tensor({h}, 1.0), ParamRole::kNorm);
      lw.ln1_beta = store.add(lp + ".ln1.beta", Tensor({h}), ParamRole::kNorm);
      lw.ln2_gamma = store.add(lp + ".ln2.gamma", Tensor({h}, 1.0), ParamRole::kNorm);
      lw.ln2_beta = store.add(lp + ".ln2.beta", Tensor({h}), ParamRole::kNorm);
    }
    w.layers.push_back(std::move(lw));
  }
  return w;
}

Var ForwardContext::dropout(const Var& x, double rate) const {
  if (!training || rate == 0.0) return x;
  if (!rng) throw ConfigError("training forward pass without a random generator");
  return ad::dropout(x, rate, *rng);
}

Var embed(const PairEncoding& enc, const EncoderWeights& w, const ForwardContext& ctx,
          double dropout) {
  const std::size_t n = enc.token_ids.size();
  if (n > w.position_embedding.value().rows()) {
    throw DataError("sequence of " + std::to_string(n) + " positions exceeds the position table");
  }
  std::vector<std::size_t> positions(n), segments(n);
  for (std::size_t t = 0; t < n; ++t) {
    positions[t] = t;
    if (enc.segment_ids[t] != 0 && enc.segment_ids[t] != 1) {
      throw DataError("segment id must be 0 or 1");
    }
    segments[t] = static_cast<std::size_t>(enc.segment_ids[t]);
  }
  Var x = ad::add(ad::gather_rows(w.token_embedding, enc.token_ids),
                  ad::gather_rows(w.position_embedding, positions));
  x = ad::add(x, ad::gather_rows(w.segment_embedding, segments));
  return ctx.dropout(x, dropout);
}

HeadOutput self_attention_head(const Var& x, const HeadProjection& head,
                               std::span<const int> mask) {
  if (x.value().rows() != mask.size()) {
    throw ShapeError("attention mask of length " + std::to_string(mask.size()) + " for input " +
                     shape_str(x.shape()));
  }
  const Var q = ad::matmul(x, head.wq);
  const Var k = ad::matmul(x, head.wk);
  const Var v = ad::matmul(x, head.wv);
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(head.wk.value().cols()));
  const Var scores = ad::scale(ad::matmul(q, ad::transpose(k)), inv_sqrt_d);
  const Var attention = ad::masked_softmax_rows(scores, std::vector<int>(mask.begin(), mask.end()));
  return {ad::matmul(attention, v), attention};
}

Var encoder_layer(const Var& x, const LayerWeights& lw, std::span<const int> mask,
                  const EncoderConfig& cfg, const ForwardContext& ctx) {
  if (x.value().rank() != 2 || x.value().cols() != cfg.hidden) {
    throw ShapeError("encoder layer expects n×" + std::to_string(cfg.hidden) + ", got " +
                     shape_str(x.shape()));
  }
  std::vector<Var> zs;
  zs.reserve(lw.heads.size());
  for (const HeadProjection& hp : lw.heads) zs.push_back(self_attention_head(x, hp, mask).z);
  const Var z = ad::matmul(ad::concat_cols(zs), lw.wo);
  if (!cfg.bert_compat) {
    return ctx.dropout(ad::add_bias(ad::matmul(z, lw.wf), lw.bf), cfg.dropout);
  }
  const Var x1 = ad::layer_norm(ad::add(x, z), lw.ln1_gamma, lw.ln1_beta);
  const Var ff = ctx.dropout(ad::gelu(ad::add_bias(ad::matmul(x1, lw.wf), lw.bf)), cfg.dropout);
  return ad::layer_norm(ad::add(x1, ff), lw.ln2_gamma, lw.ln2_beta);
}

EncodedPair encode(const PairEncoding& enc, const EncoderWeights& w, const EncoderConfig& cfg,
                   const ForwardContext& ctx) {
  const std::size_t n = enc.length();
  Var x = embed(enc, w, ctx, cfg.dropout);
  if (n < x.value().rows()) x = ad::slice_rows(x, 0, n);
  const std::vector<int> mask(enc.attention_mask.begin(), enc.attention_mask.begin() + n);
  for (const LayerWeights& lw : w.layers) x = encoder_layer(x, lw, mask, cfg, ctx);

  EncodedPair out;
  out.cls = ad::slice_rows(x, 0, 1);
  out.question_len = enc.question_span.size();
  out.answer_len = enc.answer_span.size();
  if (out.question_len) out.question = ad::slice_rows(x, enc.question_span.begin, enc.question_span.end);
  if (out.answer_len) out.answer = ad::slice_rows(x, enc.answer_span.begin, enc.answer_span.end);
  return out;
}

}  // namespace anssel

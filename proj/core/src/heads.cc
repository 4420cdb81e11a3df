// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/heads.h"

#include <array>

#include "anssel/error.h"

namespace anssel {

std::string_view to_string(HeadKind kind) {
  switch (kind) {
    case HeadKind::kBow: return "bow";
    case HeadKind::kCnn: return "cnn";
    case HeadKind::kRnn: return "rnn";
    case HeadKind::kBaseline: break;
  }
  return "baseline";
}

HeadKind parse_head_kind(std::string_view name) {
  if (name == "baseline") return HeadKind::kBaseline;
  if (name == "bow") return HeadKind::kBow;
  if (name == "cnn") return HeadKind::kCnn;
  if (name == "rnn") return HeadKind::kRnn;
  throw ConfigError("unknown head '" + std::string(name) + "' (expected baseline|bow|cnn|rnn)");
}

std::size_t HeadConfig::input_size(std::size_t h) const {
  switch (kind) {
    case HeadKind::kBow:
    case HeadKind::kRnn: return 3 * h;
    case HeadKind::kCnn: return h + 2 * cnn_filters;
    case HeadKind::kBaseline: break;
  }
  return h;
}

void HeadConfig::validate() const {
  if (hidden == 0) throw ConfigError("head hidden size must be positive");
  if (kind == HeadKind::kCnn && (cnn_filters == 0 || cnn_window == 0)) {
    throw ConfigError("cnn filters and window must be positive");
  }
  if (kind == HeadKind::kRnn && rnn_layers == 0) throw ConfigError("rnn needs at least one layer");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("head dropout must be in [0, 1)");
}

HeadWeights HeadWeights::create(const HeadConfig& cfg, std::size_t h, ParameterStore& store,
                                Rng& rng, const WeightInit& init, const std::string& prefix) {
  cfg.validate();
  HeadWeights w;
  if (cfg.kind == HeadKind::kCnn) {
    w.cnn_filters = store.add(prefix + ".cnn.filters",
                              init.matrix({cfg.cnn_filters, cfg.cnn_window * h}, cfg.cnn_window * h, rng), ParamRole::kMatrix);
    w.cnn_bias = store.add(prefix + ".cnn.bias", Tensor({cfg.cnn_filters}), ParamRole::kBias);
  }
  if (cfg.kind == HeadKind::kRnn) {
    for (std::size_t l = 0; l < cfg.rnn_layers; ++l) {
      const std::string lp = prefix + ".rnn.layer" + std::to_string(l);
      RnnLayerWeights rl;
      rl.w_x = store.add(lp + ".w_x", init.matrix({h, h}, h, rng), ParamRole::kMatrix);
      rl.w_h = store.add(lp + ".w_h", init.matrix({h, h}, h, rng), ParamRole::kMatrix);
      rl.b = store.add(lp + ".b", Tensor({h}), ParamRole::kBias);
      w.rnn.push_back(rl);
    }
  }
  w.w_h1 = store.add(prefix + ".w_h1", init.matrix({cfg.hidden, cfg.input_size(h)}, cfg.input_size(h), rng), ParamRole::kMatrix);
  w.b_h1 = store.add(prefix + ".b_h1", Tensor({cfg.hidden}), ParamRole::kBias);
  w.w_h2 = store.add(prefix + ".w_h2", init.matrix({2, cfg.hidden}, cfg.hidden, rng), ParamRole::kMatrix);
  w.b_h2 = store.add(prefix + ".b_h2", Tensor({2}), ParamRole::kBias);
  return w;
}

std::size_t head_parameter_count(const HeadConfig& cfg, std::size_t h, bool include_biases) {
  const std::size_t b = include_biases ? 1 : 0;
  std::size_t n = cfg.input_size(h) * cfg.hidden + b * cfg.hidden + 2 * cfg.hidden + b * 2;
  if (cfg.kind == HeadKind::kCnn) n += cfg.cnn_filters * cfg.cnn_window * h + b * cfg.cnn_filters;
  if (cfg.kind == HeadKind::kRnn) n += cfg.rnn_layers * (2 * h * h + b * h);
  return n;
}

Var classify(const Var& input, const HeadWeights& w, const HeadConfig& cfg,
             const ForwardContext& ctx) {
  const Var in = ctx.dropout(input, cfg.dropout);
  const Var hidden = ad::relu(ad::linear(in, w.w_h1, w.b_h1));
  return ad::reshape(ad::softmax_rows(ad::linear(hidden, w.w_h2, w.b_h2)), {2});
}

Var bow_features(const Var& stream, std::size_t h) {
  if (!stream.defined()) return ad::constant(Tensor({1, h}));
  return ad::sum_rows(stream);
}

Var cnn_features(const Var& stream, const HeadWeights& w, const HeadConfig& cfg) {
  if (!stream.defined()) return ad::constant(Tensor({1, cfg.cnn_filters}));
  const Var windows = ad::window_rows(stream, cfg.cnn_window, cfg.cnn_window - 1);
  return ad::max_rows(ad::linear(windows, w.cnn_filters, w.cnn_bias));
}

Var rnn_features(const Var& stream, const HeadWeights& w, std::size_t h) {
  if (!stream.defined()) return ad::constant(Tensor({1, h}));
  const std::size_t n = stream.value().rows();
  std::vector<Var> inputs;
  inputs.reserve(n);
  for (std::size_t t = 0; t < n; ++t) inputs.push_back(ad::slice_rows(stream, t, t + 1));
  for (const RnnLayerWeights& layer : w.rnn) {
    Var state = ad::constant(Tensor({1, h}));
    for (Var& x : inputs) {
      state = ad::tanh(ad::add(ad::linear(x, layer.w_x, layer.b), ad::matmul(state, ad::transpose(layer.w_h))));
      x = state;
    }
  }
  return inputs.back();
}

namespace {

Var classify_concat(const std::array<Var, 3>& parts, const HeadWeights& w, const HeadConfig& cfg,
                    const ForwardContext& ctx) {
  return classify(ad::concat_cols(parts), w, cfg, ctx);
}

}  // namespace

Var bb_baseline(const EncodedPair& p, const HeadWeights& w, const HeadConfig& cfg,
                const ForwardContext& ctx) {
  return classify(p.cls, w, cfg, ctx);
}

Var bb_bow(const EncodedPair& p, const HeadWeights& w, const HeadConfig& cfg,
           const ForwardContext& ctx) {
  const std::size_t h = p.cls.value().cols();
  return classify_concat({p.cls, bow_features(p.question, h), bow_features(p.answer, h)}, w, cfg,
                         ctx);
}

Var bb_cnn(const EncodedPair& p, const HeadWeights& w, const HeadConfig& cfg,
           const ForwardContext& ctx) {
  return classify_concat(
      {p.cls, cnn_features(p.question, w, cfg), cnn_features(p.answer, w, cfg)}, w, cfg, ctx);
}

Var bb_rnn(const EncodedPair& p, const HeadWeights& w, const HeadConfig& cfg,
           const ForwardContext& ctx) {
  const std::size_t h = p.cls.value().cols();
  return classify_concat({p.cls, rnn_features(p.question, w, h), rnn_features(p.answer, w, h)}, w,
                         cfg, ctx);
}

Var head_forward(const EncodedPair& p, const HeadWeights& w, const HeadConfig& cfg,
                 const ForwardContext& ctx) {
  switch (cfg.kind) {
    case HeadKind::kBow: return bb_bow(p, w, cfg, ctx);
    case HeadKind::kCnn: return bb_cnn(p, w, cfg, ctx);
    case HeadKind::kRnn: return bb_rnn(p, w, cfg, ctx);
    case HeadKind::kBaseline: break;
  }
  return bb_baseline(p, w, cfg, ctx);
}

}  // namespace anssel

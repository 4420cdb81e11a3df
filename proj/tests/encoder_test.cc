// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/encoder.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "anssel/error.h"
#include "anssel/grad_check.h"
#include "anssel/numerics.h"

namespace anssel {
namespace {

void fill(Var v, const Tensor& t) { v.mutable_value() = t; }

void fill_random(Var v, Rng& rng, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (double& x : v.mutable_value().data()) x = dist(rng);
}

Tensor random_tensor(Shape shape, Rng& rng, double scale = 1.0) {
  Var v(Tensor(std::move(shape)));
  fill_random(v, rng, scale);
  return v.value();
}

EncoderConfig toy_config(std::size_t layers = 2, std::size_t hidden = 8, std::size_t heads = 2) {
  EncoderConfig cfg;
  cfg.layers = layers;
  cfg.hidden = hidden;
  cfg.heads = heads;
  cfg.vocab_size = 20;
  cfg.max_len = 24;
  cfg.dropout = 0.0;
  return cfg;
}

// Builds an encoding directly from ids so tests control every position.
PairEncoding make_encoding(const std::vector<std::size_t>& q, const std::vector<std::size_t>& a,
                           std::size_t max_len) {
  PairEncoding enc;
  enc.token_ids.push_back(2);
  enc.token_ids.insert(enc.token_ids.end(), q.begin(), q.end());
  enc.token_ids.push_back(3);
  enc.token_ids.insert(enc.token_ids.end(), a.begin(), a.end());
  enc.token_ids.push_back(3);
  const std::size_t n = enc.token_ids.size();
  enc.segment_ids.assign(n, 0);
  for (std::size_t i = q.size() + 2; i < n; ++i) enc.segment_ids[i] = 1;
  enc.attention_mask.assign(n, 1);
  enc.token_ids.resize(max_len, 0);
  enc.segment_ids.resize(max_len, 0);
  enc.attention_mask.resize(max_len, 0);
  enc.question_span = {1, 1 + q.size()};
  enc.answer_span = {q.size() + 2, q.size() + 2 + a.size()};
  return enc;
}

TEST(EncoderConfigTest, Validation) {
  EncoderConfig cfg = toy_config();
  EXPECT_NO_THROW(cfg.validate());
  cfg.heads = 3;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = toy_config();
  cfg.hidden = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(EncoderWeightsTest, ShapesAndNames) {
  ParameterStore store;
  Rng rng(1);
  const EncoderConfig cfg = toy_config();
  const EncoderWeights w = EncoderWeights::create(cfg, store, rng);
  EXPECT_EQ(w.token_embedding.shape(), (Shape{20, 8}));
  EXPECT_EQ(w.position_embedding.shape(), (Shape{24, 8}));
  EXPECT_EQ(w.segment_embedding.shape(), (Shape{2, 8}));
  ASSERT_EQ(w.layers.size(), 2u);
  EXPECT_EQ(w.layers[1].heads[1].wq.shape(), (Shape{8, 4}));
  EXPECT_EQ(w.layers[0].wo.shape(), (Shape{8, 8}));
  EXPECT_EQ(w.layers[0].bf.shape(), (Shape{8}));
  EXPECT_NE(store.find("encoder.layer1.wv.head0"), nullptr);
  EXPECT_EQ(store.find("encoder.layer0.ln1.gamma"), nullptr);
  EXPECT_EQ(store.count_scalars(), encoder_parameter_count(cfg));
}

TEST(EmbedTest, ZeroTablesGiveZeros) {
  ParameterStore store;
  Rng rng(1);
  const EncoderWeights w = EncoderWeights::create(toy_config(), store, rng);
  for (const Var& t : {w.token_embedding, w.position_embedding, w.segment_embedding}) {
    fill(t, Tensor(t.shape()));
  }
  const Tensor x = embed(make_encoding({5}, {6}, 10), w, ForwardContext{}).value();
  EXPECT_EQ(x, Tensor({10, 8}));
}

TEST(EmbedTest, RowIsSumOfTableRows) {
  ParameterStore store;
  Rng rng(2);
  const EncoderWeights w = EncoderWeights::create(toy_config(), store, rng);
  const PairEncoding enc = make_encoding({7}, {9}, 10);
  const Tensor x = embed(enc, w, ForwardContext{}).value();
  for (std::size_t t = 0; t < 10; ++t) {
    for (std::size_t c = 0; c < 8; ++c) {
      const double expected = w.token_embedding.value()(enc.token_ids[t], c) +
                              w.position_embedding.value()(t, c) +
                              w.segment_embedding.value()(enc.segment_ids[t], c);
      EXPECT_EQ(x(t, c), expected);
    }
  }
  EXPECT_EQ(embed(enc, w, ForwardContext{}).value(), x);
}

TEST(EmbedTest, OutOfRangeIdIsDataError) {
  ParameterStore store;
  Rng rng(2);
  const EncoderWeights w = EncoderWeights::create(toy_config(), store, rng);
  EXPECT_THROW(embed(make_encoding({99}, {5}, 10), w, ForwardContext{}), DataError);
}

TEST(AttentionTest, SingleTokenCopiesValue) {
  Rng rng(3);
  HeadProjection hp{Var(random_tensor({3, 2}, rng)), Var(random_tensor({3, 2}, rng)),
                    Var(random_tensor({3, 2}, rng))};
  const Var x = ad::constant(random_tensor({1, 3}, rng));
  const std::vector<int> mask = {1};
  const HeadOutput out = self_attention_head(x, hp, mask);
  EXPECT_EQ(out.attention.value(), Tensor::matrix({{1.0}}));
  EXPECT_LE(max_abs_diff(out.z.value(), matmul(x.value(), hp.wv.value())), 1e-15);
}

TEST(AttentionTest, HandTracedTwoTokens) {
  const HeadProjection hp{Var(Tensor::identity(2)), Var(Tensor::identity(2)),
                          Var(Tensor::identity(2))};
  const std::vector<int> mask = {1, 1};
  const HeadOutput out = self_attention_head(ad::constant(Tensor::identity(2)), hp, mask);
  // Scores are I / sqrt(2); row 0 is softmax([1/sqrt(2), 0]).
  const double e = std::exp(1.0 / std::sqrt(2.0));
  EXPECT_NEAR(out.attention.value()(0, 0), e / (e + 1.0), 1e-12);
  EXPECT_NEAR(out.attention.value()(0, 0), 0.6698, 1e-4);
  EXPECT_NEAR(out.attention.value()(0, 1), 0.3302, 1e-4);
  EXPECT_NEAR(out.z.value()(0, 0), 0.6698, 1e-4);
  EXPECT_NEAR(out.z.value()(0, 1), 0.3302, 1e-4);
}

TEST(AttentionTest, MaskedKeyGetsNoWeight) {
  Rng rng(4);
  HeadProjection hp{Var(random_tensor({2, 2}, rng, 5.0)), Var(random_tensor({2, 2}, rng, 5.0)),
                    Var(random_tensor({2, 2}, rng))};
  const std::vector<int> mask = {1, 0};
  const HeadOutput out = self_attention_head(ad::constant(random_tensor({2, 2}, rng, 5.0)), hp, mask);
  EXPECT_EQ(out.attention.value()(0, 0), 1.0);
  EXPECT_EQ(out.attention.value()(0, 1), 0.0);
  EXPECT_EQ(out.attention.value()(1, 1), 0.0);
}

TEST(AttentionTest, RowsSumToOne) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 9;
    HeadProjection hp{Var(random_tensor({6, 3}, rng, 2.0)), Var(random_tensor({6, 3}, rng, 2.0)),
                      Var(random_tensor({6, 3}, rng, 2.0))};
    std::vector<int> mask(n, 1);
    for (std::size_t i = 1 + trial % 3; i < n; i += 2) mask[i] = 0;
    const HeadOutput out = self_attention_head(ad::constant(random_tensor({n, 6}, rng, 3.0)), hp, mask);
    for (std::size_t r = 0; r < n; ++r) {
      double sum = 0.0;
      for (double p : out.attention.value().row(r)) sum += p;
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(EncoderLayerTest, ZeroWeightsGiveBias) {
  ParameterStore store;
  Rng rng(6);
  const EncoderConfig cfg = toy_config(1);
  const EncoderWeights w = EncoderWeights::create(cfg, store, rng);
  for (const Parameter& p : store.all()) fill(p.var, Tensor(p.var.shape()));
  Tensor bias({8});
  for (std::size_t i = 0; i < 8; ++i) bias[i] = 0.5 * static_cast<double>(i) - 1.0;
  fill(w.layers[0].bf, bias);
  const std::vector<int> mask(3, 1);
  const Tensor out =
      encoder_layer(ad::constant(random_tensor({3, 8}, rng)), w.layers[0], mask, cfg, {}).value();
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 8; ++c) EXPECT_EQ(out(r, c), bias[c]);
  }
}

// Independent loop-based trace of one layer with a single head.
TEST(EncoderLayerTest, MatchesHandTrace) {
  ParameterStore store;
  Rng rng(7);
  const EncoderConfig cfg = toy_config(1, 2, 1);
  const EncoderWeights w = EncoderWeights::create(cfg, store, rng);
  const LayerWeights& lw = w.layers[0];
  fill(lw.heads[0].wq, Tensor::matrix({{0.5, -1.0}, {0.25, 2.0}}));
  fill(lw.heads[0].wk, Tensor::matrix({{1.5, 0.0}, {-0.5, 1.0}}));
  fill(lw.heads[0].wv, Tensor::matrix({{1.0, 2.0}, {3.0, -1.0}}));
  fill(lw.wo, Tensor::matrix({{0.0, 1.0}, {1.0, 0.5}}));
  fill(lw.wf, Tensor::matrix({{2.0, -1.0}, {0.5, 1.0}}));
  fill(lw.bf, Tensor::vector({0.1, -0.2}));
  const double x[2][2] = {{1.0, 0.5}, {-0.5, 2.0}};

  const auto mm = [](const double a[2][2], const Tensor& b, double out[2][2]) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) out[i][j] = a[i][0] * b(0, j) + a[i][1] * b(1, j);
    }
  };
  double q[2][2], k[2][2], v[2][2];
  mm(x, lw.heads[0].wq.value(), q);
  mm(x, lw.heads[0].wk.value(), k);
  mm(x, lw.heads[0].wv.value(), v);
  double z[2][2];
  for (int i = 0; i < 2; ++i) {
    double s[2];
    for (int j = 0; j < 2; ++j) s[j] = (q[i][0] * k[j][0] + q[i][1] * k[j][1]) / std::sqrt(2.0);
    const double m = std::max(s[0], s[1]);
    const double e0 = std::exp(s[0] - m), e1 = std::exp(s[1] - m);
    for (int c = 0; c < 2; ++c) z[i][c] = (e0 * v[0][c] + e1 * v[1][c]) / (e0 + e1);
  }
  double zo[2][2], out[2][2];
  mm(z, lw.wo.value(), zo);
  mm(zo, lw.wf.value(), out);

  const std::vector<int> mask = {1, 1};
  const Tensor got =
      encoder_layer(ad::constant(Tensor::matrix({{1.0, 0.5}, {-0.5, 2.0}})), lw, mask, cfg, {})
          .value();
  for (int i = 0; i < 2; ++i) {
    for (int c = 0; c < 2; ++c) EXPECT_NEAR(got(i, c), out[i][c] + lw.bf.value()[c], 1e-10);
  }
}

TEST(EncoderLayerTest, PaddingRowsDoNotLeak) {
  ParameterStore store;
  Rng rng(8);
  const EncoderConfig cfg = toy_config(1);
  const EncoderWeights w = EncoderWeights::create(cfg, store, rng);
  const Tensor x = random_tensor({4, 8}, rng, 2.0);
  Tensor padded({7, 8});
  for (std::size_t r = 0; r < 7; ++r) {
    for (std::size_t c = 0; c < 8; ++c) padded(r, c) = r < 4 ? x(r, c) : 10.0 * (c + 1.0);
  }
  const std::vector<int> short_mask(4, 1);
  const std::vector<int> long_mask = {1, 1, 1, 1, 0, 0, 0};
  const Tensor a = encoder_layer(ad::constant(x), w.layers[0], short_mask, cfg, {}).value();
  const Tensor b = encoder_layer(ad::constant(padded), w.layers[0], long_mask, cfg, {}).value();
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 8; ++c) EXPECT_NEAR(a(r, c), b(r, c), 1e-10);
  }
}

TEST(EncodeTest, EmptyStackReturnsEmbeddings) {
  ParameterStore store;
  Rng rng(9);
  const EncoderConfig cfg = toy_config(0);
  const EncoderWeights w = EncoderWeights::create(cfg, store, rng);
  const PairEncoding enc = make_encoding({5, 6}, {7, 8, 9}, 12);
  const EncodedPair p = encode(enc, w, cfg, {});
  const Tensor x = embed(enc, w, {}).value();
  EXPECT_EQ(p.cls.value(), ad::slice_rows(ad::constant(x), 0, 1).value());
  EXPECT_EQ(p.question.value(), ad::slice_rows(ad::constant(x), 1, 3).value());
  EXPECT_EQ(p.answer.value(), ad::slice_rows(ad::constant(x), 4, 7).value());
}

TEST(EncodeTest, TelephoneExampleSpanShapes) {
  // Whitespace-level toy tokenization: 4 question and 7 answer tokens.
  ParameterStore store;
  Rng rng(10);
  const EncoderConfig cfg = toy_config();
  const EncoderWeights w = EncoderWeights::create(cfg, store, rng);
  const EncodedPair p =
      encode(make_encoding({5, 6, 7, 8}, {9, 10, 7, 11, 12, 13, 4}, 16), w, cfg, {});
  EXPECT_EQ(p.cls.shape(), (Shape{1, 8}));
  EXPECT_EQ(p.question.shape(), (Shape{4, 8}));
  EXPECT_EQ(p.answer.shape(), (Shape{7, 8}));
  EXPECT_EQ(p.question_len, 4u);
  EXPECT_EQ(p.answer_len, 7u);
}

TEST(EncodeTest, EmptyAnswerHasNoStream) {
  ParameterStore store;
  Rng rng(11);
  const EncoderConfig cfg = toy_config();
  const EncoderWeights w = EncoderWeights::create(cfg, store, rng);
  const EncodedPair p = encode(make_encoding({5}, {}, 8), w, cfg, {});
  EXPECT_FALSE(p.answer.defined());
  EXPECT_EQ(p.answer_len, 0u);
}

TEST(EncodeTest, PermutationEquivariantWithoutPositions) {
  Rng rng(12);
  for (bool compat : {false, true}) {
    EncoderConfig cfg = toy_config();
    cfg.bert_compat = compat;
    ParameterStore s;
    const EncoderWeights w = EncoderWeights::create(cfg, s, rng);
    fill(w.position_embedding, Tensor(w.position_embedding.shape()));
    const std::vector<std::size_t> q = {5, 6, 7, 8, 9};
    const std::vector<std::size_t> perm = {3, 0, 4, 2, 1};
    std::vector<std::size_t> q_perm(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) q_perm[i] = q[perm[i]];
    const EncodedPair a = encode(make_encoding(q, {10, 11}, 16), w, cfg, {});
    const EncodedPair b = encode(make_encoding(q_perm, {10, 11}, 16), w, cfg, {});
    for (std::size_t i = 0; i < q.size(); ++i) {
      for (std::size_t c = 0; c < cfg.hidden; ++c) {
        EXPECT_NEAR(b.question.value()(i, c), a.question.value()(perm[i], c), 1e-10);
      }
    }
    EXPECT_LE(max_abs_diff(a.cls.value(), b.cls.value()), 1e-10);
    EXPECT_LE(max_abs_diff(a.answer.value(), b.answer.value()), 1e-10);
  }
}

TEST(EncodeTest, PaddingInvariant) {
  ParameterStore store;
  Rng rng(13);
  const EncoderConfig cfg = toy_config();
  const EncoderWeights w = EncoderWeights::create(cfg, store, rng);
  const EncodedPair a = encode(make_encoding({5, 6}, {7, 8, 9}, 8), w, cfg, {});
  const EncodedPair b = encode(make_encoding({5, 6}, {7, 8, 9}, 24), w, cfg, {});
  EXPECT_LE(max_abs_diff(a.cls.value(), b.cls.value()), 1e-10);
  EXPECT_LE(max_abs_diff(a.question.value(), b.question.value()), 1e-10);
  EXPECT_LE(max_abs_diff(a.answer.value(), b.answer.value()), 1e-10);
}

TEST(EncodeTest, DropoutOnlyInTraining) {
  ParameterStore store;
  Rng init(14);
  EncoderConfig cfg = toy_config();
  cfg.dropout = 0.5;
  const EncoderWeights w = EncoderWeights::create(cfg, store, init);
  const PairEncoding enc = make_encoding({5, 6}, {7}, 8);
  const Tensor eval1 = encode(enc, w, cfg, {}).cls.value();
  const Tensor eval2 = encode(enc, w, cfg, {}).cls.value();
  EXPECT_EQ(eval1, eval2);
  Rng rng(1);
  const Tensor train = encode(enc, w, cfg, ForwardContext{true, &rng}).cls.value();
  EXPECT_NE(train, eval1);
  EXPECT_THROW(encode(enc, w, cfg, ForwardContext{true, nullptr}), ConfigError);
}

TEST(EncodeTest, CompatVariantAddsNormParameters) {
  EncoderConfig cfg = toy_config();
  cfg.bert_compat = true;
  ParameterStore store;
  Rng rng(15);
  const EncoderWeights w = EncoderWeights::create(cfg, store, rng);
  EXPECT_NE(store.find("encoder.layer1.ln2.beta"), nullptr);
  EXPECT_EQ(store.count_scalars(), encoder_parameter_count(cfg));
  const EncodedPair p = encode(make_encoding({5, 6}, {7}, 8), w, cfg, {});
  // Layer-normalized rows have zero mean under unit gamma and zero beta.
  const Tensor& cls = p.cls.value();
  EXPECT_NEAR(std::accumulate(cls.data().begin(), cls.data().end(), 0.0), 0.0, 1e-10);
}

TEST(EncodeTest, GradientsThroughStack) {
  for (bool compat : {false, true}) {
    EncoderConfig cfg = toy_config();
    cfg.bert_compat = compat;
    ParameterStore store;
    Rng rng(16);
    const EncoderWeights w = EncoderWeights::create(cfg, store, rng);
    for (const Parameter& p : store.all()) fill_random(p.var, rng, 0.6);
    std::vector<Var> vars = store.trainable_vars();
    const PairEncoding enc = make_encoding({5, 6, 7}, {8, 9}, 10);
    const Var readout = ad::constant(random_tensor({24, 1}, rng));
    const auto f = [&] {
      const EncodedPair p = encode(enc, w, cfg, {});
      const Var pooled = ad::concat_cols(std::vector<Var>{p.cls, ad::sum_rows(p.question),
                                                          ad::sum_rows(p.answer)});
      return ad::matmul(pooled, readout);
    };
    const GradCheckResult r = grad_check(f, vars);
    EXPECT_LE(r.max_relative_error, 1e-4) << (compat ? "compat" : "literal");
  }
}

}  // namespace
}  // namespace anssel

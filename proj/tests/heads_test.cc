// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/heads.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "anssel/diagnostics.h"
#include "anssel/error.h"
#include "anssel/model.h"

namespace anssel {
namespace {

void fill(Var v, const Tensor& t) { v.mutable_value() = t; }

Tensor random_tensor(Shape shape, Rng& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Tensor t(std::move(shape));
  for (double& x : t.data()) x = dist(rng);
  return t;
}

HeadConfig head_config(HeadKind kind, std::size_t hidden = 6) {
  HeadConfig cfg;
  cfg.kind = kind;
  cfg.hidden = hidden;
  cfg.cnn_filters = 4;
  cfg.dropout = 0.0;
  return cfg;
}

EncodedPair random_pair(std::size_t h, std::size_t nq, std::size_t na, Rng& rng) {
  EncodedPair p;
  p.cls = ad::constant(random_tensor({1, h}, rng));
  p.question_len = nq;
  p.answer_len = na;
  if (nq) p.question = ad::constant(random_tensor({nq, h}, rng));
  if (na) p.answer = ad::constant(random_tensor({na, h}, rng));
  return p;
}

EncodedPair with_answer(const EncodedPair& p, const Tensor& answer) {
  EncodedPair q = p;
  q.answer = ad::constant(answer);
  q.answer_len = answer.rows();
  return q;
}

Tensor reversed_rows(const Tensor& t) {
  Tensor out(t.shape());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    std::copy(t.row(r).begin(), t.row(r).end(), out.row(t.rows() - 1 - r).begin());
  }
  return out;
}

TEST(HeadConfigTest, InputSizesAtFullScale) {
  HeadConfig cfg;
  EXPECT_EQ(cfg.hidden, 1024u);
  cfg.kind = HeadKind::kBaseline;
  EXPECT_EQ(cfg.input_size(768), 768u);
  cfg.kind = HeadKind::kBow;
  EXPECT_EQ(cfg.input_size(768), 2304u);
  cfg.kind = HeadKind::kCnn;
  EXPECT_EQ(cfg.input_size(768), 1168u);
  cfg.kind = HeadKind::kRnn;
  EXPECT_EQ(cfg.input_size(768), 2304u);
}

TEST(HeadConfigTest, ParseKind) {
  EXPECT_EQ(parse_head_kind("rnn"), HeadKind::kRnn);
  EXPECT_EQ(to_string(HeadKind::kCnn), "cnn");
  EXPECT_THROW(parse_head_kind("lstm"), ConfigError);
}

TEST(ParameterCountTest, FullScaleFixtures) {
  HeadConfig cfg;
  cfg.kind = HeadKind::kBaseline;
  EXPECT_EQ(head_parameter_count(cfg, 768, false), 788480u);
  EXPECT_EQ(head_parameter_count(cfg, 768, true), 789506u);
  cfg.kind = HeadKind::kBow;
  EXPECT_EQ(head_parameter_count(cfg, 768, false), 2361344u);
}

TEST(ParameterCountTest, ClosedFormMatchesEnumeration) {
  Rng rng(31);
  std::uniform_int_distribution<std::size_t> small(1, 4);
  const HeadKind kinds[] = {HeadKind::kBaseline, HeadKind::kBow, HeadKind::kCnn, HeadKind::kRnn};
  for (int trial = 0; trial < 20; ++trial) {
    ModelConfig cfg;
    cfg.encoder.heads = small(rng);
    cfg.encoder.hidden = cfg.encoder.heads * small(rng) * 2;
    cfg.encoder.layers = small(rng) - 1;
    cfg.encoder.vocab_size = 10 + small(rng);
    cfg.encoder.max_len = 8 + small(rng);
    cfg.encoder.bert_compat = trial % 3 == 0;
    cfg.head.kind = kinds[trial % 4];
    cfg.head.hidden = 3 + small(rng);
    cfg.head.cnn_filters = small(rng);
    cfg.head.cnn_window = small(rng);
    cfg.head.rnn_layers = small(rng);
    const Model model(cfg, static_cast<std::uint64_t>(trial));
    const ParameterCounts c = count_parameters(model);
    EXPECT_TRUE(c.consistent()) << "trial " << trial;
    EXPECT_EQ(c.head_without_biases, head_parameter_count(cfg.head, cfg.encoder.hidden, false));
  }
}

TEST(BaselineTest, ZeroWeightsGiveHalf) {
  ParameterStore store;
  Rng rng(1);
  const HeadConfig cfg = head_config(HeadKind::kBaseline);
  const HeadWeights w = HeadWeights::create(cfg, 4, store, rng);
  for (const Parameter& p : store.all()) fill(p.var, Tensor(p.var.shape()));
  const Tensor out = bb_baseline(random_pair(4, 2, 2, rng), w, cfg, {}).value();
  EXPECT_EQ(out, Tensor::vector({0.5, 0.5}));
}

TEST(BaselineTest, HandTrace) {
  ParameterStore store;
  Rng rng(2);
  const HeadConfig cfg = head_config(HeadKind::kBaseline, 2);
  const HeadWeights w = HeadWeights::create(cfg, 2, store, rng);
  fill(w.w_h1, Tensor::matrix({{1.0, -2.0}, {0.5, 0.25}}));
  fill(w.b_h1, Tensor::vector({0.1, -0.3}));
  fill(w.w_h2, Tensor::matrix({{2.0, -1.0}, {-0.5, 1.5}}));
  fill(w.b_h2, Tensor::vector({0.05, -0.05}));
  EncodedPair p;
  p.cls = ad::constant(Tensor::matrix({{0.8, -0.4}}));
  // Hidden: relu([0.8 + 0.8 + 0.1, 0.4 - 0.1 - 0.3]) = [1.7, 0].
  const double l0 = 2.0 * 1.7 + 0.05, l1 = -0.5 * 1.7 - 0.05;
  const double p0 = 1.0 / (1.0 + std::exp(l1 - l0));
  const Tensor out = bb_baseline(p, w, cfg, {}).value();
  EXPECT_NEAR(out[0], p0, 1e-10);
  EXPECT_NEAR(out[1], 1.0 - p0, 1e-10);
}

TEST(BowTest, SingleTokenFeatureIsTheToken) {
  Rng rng(3);
  const Tensor v = random_tensor({1, 5}, rng);
  EXPECT_EQ(bow_features(ad::constant(v), 5).value(), v);
  EXPECT_EQ(bow_features(Var(), 5).value(), Tensor({1, 5}));
}

TEST(BowTest, HandTrace) {
  ParameterStore store;
  Rng rng(4);
  const HeadConfig cfg = head_config(HeadKind::kBow, 1);
  const HeadWeights w = HeadWeights::create(cfg, 1, store, rng);
  fill(w.w_h1, Tensor::matrix({{1.0, 0.5, -0.25}}));
  fill(w.b_h1, Tensor::vector({0.2}));
  fill(w.w_h2, Tensor::matrix({{1.0}, {-1.0}}));
  fill(w.b_h2, Tensor::vector({0.0, 0.0}));
  EncodedPair p;
  p.cls = ad::constant(Tensor::matrix({{0.3}}));
  p.question = ad::constant(Tensor::matrix({{1.0}, {2.0}}));
  p.answer = ad::constant(Tensor::matrix({{-1.0}, {0.5}, {0.5}}));
  p.question_len = 2;
  p.answer_len = 3;
  // Input [0.3, 3, 0]; hidden relu(0.3 + 1.5 + 0 + 0.2) = 2.0; logits [2, -2].
  const double p0 = 1.0 / (1.0 + std::exp(-4.0));
  EXPECT_NEAR(bb_bow(p, w, cfg, {}).value()[0], p0, 1e-10);
}

TEST(BowTest, PermutationInvariant) {
  ParameterStore store;
  Rng rng(5);
  const HeadConfig cfg = head_config(HeadKind::kBow);
  const HeadWeights w = HeadWeights::create(cfg, 4, store, rng);
  for (int trial = 0; trial < 50; ++trial) {
    const EncodedPair p = random_pair(4, 3, 6, rng);
    const Tensor base = bb_bow(p, w, cfg, {}).value();
    std::vector<std::size_t> order(6);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Tensor permuted({6, 4});
    for (std::size_t r = 0; r < 6; ++r) {
      const auto src = p.answer.value().row(order[r]);
      std::copy(src.begin(), src.end(), permuted.row(r).begin());
    }
    EXPECT_LE(max_abs_diff(bb_bow(with_answer(p, permuted), w, cfg, {}).value(), base), 1e-9);
  }
}

TEST(CnnTest, ZeroFiltersGiveBiasFeatures) {
  ParameterStore store;
  Rng rng(6);
  const HeadConfig cfg = head_config(HeadKind::kCnn);
  const HeadWeights w = HeadWeights::create(cfg, 4, store, rng);
  fill(w.cnn_filters, Tensor(w.cnn_filters.shape()));
  const Tensor f = cnn_features(ad::constant(random_tensor({5, 4}, rng)), w, cfg).value();
  EXPECT_EQ(f, Tensor({1, 4}));
}

TEST(CnnTest, SummingFilterOverOneToken) {
  ParameterStore store;
  Rng rng(7);
  HeadConfig cfg = head_config(HeadKind::kCnn);
  cfg.cnn_filters = 1;
  const HeadWeights w = HeadWeights::create(cfg, 2, store, rng);
  fill(w.cnn_filters, Tensor({1, 6}, 1.0));
  // Padding 2 per side gives windows [0,0,v], [0,v,0], [v,0,0]; each sums v.
  const Tensor f = cnn_features(ad::constant(Tensor::matrix({{0.75, -0.25}})), w, cfg).value();
  EXPECT_EQ(f, Tensor::matrix({{0.5}}));
  // Two tokens: windows [0,0,a], [0,a,b], [a,b,0], [b,0,0].
  Tensor weights({1, 6});
  weights(0, 0) = 1.0;  // first slot, first channel
  weights(0, 3) = 2.0;  // second slot, second channel
  fill(w.cnn_filters, weights);
  const Tensor g =
      cnn_features(ad::constant(Tensor::matrix({{1.0, 3.0}, {-2.0, 4.0}})), w, cfg).value();
  // Window responses: 0, 6, 1 + 8, -2 -> max 9.
  EXPECT_EQ(g, Tensor::matrix({{9.0}}));
}

TEST(CnnTest, OrderSensitive) {
  ParameterStore store;
  Rng rng(8);
  const HeadConfig cfg = head_config(HeadKind::kCnn);
  const HeadWeights w = HeadWeights::create(cfg, 4, store, rng);
  bool differs = false;
  for (int trial = 0; trial < 20 && !differs; ++trial) {
    const EncodedPair p = random_pair(4, 2, 4, rng);
    const Tensor a = bb_cnn(p, w, cfg, {}).value();
    const Tensor b = bb_cnn(with_answer(p, reversed_rows(p.answer.value())), w, cfg, {}).value();
    differs = max_abs_diff(a, b) > 1e-9;
  }
  EXPECT_TRUE(differs);
}

TEST(CnnTest, MaxPoolMonotoneUnderDominatingToken) {
  ParameterStore store;
  Rng rng(9);
  HeadConfig cfg = head_config(HeadKind::kCnn);
  const HeadWeights w = HeadWeights::create(cfg, 3, store, rng);
  // Non-negative filters make a larger all-positive token raise every window.
  Tensor filters = w.cnn_filters.value();
  for (double& x : filters.data()) x = std::abs(x);
  fill(w.cnn_filters, filters);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor stream = random_tensor({3, 3}, rng);
    Tensor extended({4, 3});
    for (std::size_t r = 0; r < 3; ++r) {
      std::copy(stream.row(r).begin(), stream.row(r).end(), extended.row(r).begin());
    }
    for (double& x : extended.row(3)) x = 5.0;
    const Tensor before = cnn_features(ad::constant(stream), w, cfg).value();
    const Tensor after = cnn_features(ad::constant(extended), w, cfg).value();
    for (std::size_t i = 0; i < before.size(); ++i) EXPECT_GE(after[i], before[i]);
  }
}

TEST(RnnTest, ZeroWeightsGiveZeroState) {
  ParameterStore store;
  Rng rng(10);
  const HeadConfig cfg = head_config(HeadKind::kRnn);
  const HeadWeights w = HeadWeights::create(cfg, 4, store, rng);
  for (const RnnLayerWeights& l : w.rnn) {
    for (const Var& v : {l.w_x, l.w_h, l.b}) fill(v, Tensor(v.shape()));
  }
  EXPECT_EQ(rnn_features(ad::constant(random_tensor({3, 4}, rng)), w, 4).value(), Tensor({1, 4}));
}

TEST(RnnTest, SingleTokenHandTrace) {
  ParameterStore store;
  Rng rng(11);
  const HeadConfig cfg = head_config(HeadKind::kRnn);
  const HeadWeights w = HeadWeights::create(cfg, 2, store, rng);
  ASSERT_EQ(w.rnn.size(), 2u);
  fill(w.rnn[0].w_x, Tensor::matrix({{1.0, 0.5}, {-0.5, 2.0}}));
  fill(w.rnn[0].b, Tensor::vector({0.1, 0.0}));
  fill(w.rnn[1].w_x, Tensor::matrix({{0.3, 0.0}, {1.0, -1.0}}));
  fill(w.rnn[1].b, Tensor::vector({0.0, 0.2}));
  // With one step the recurrent weights only see the zero initial state.
  const Tensor x = Tensor::matrix({{0.4, -0.6}});
  const double h0 = std::tanh(0.4 - 0.3 + 0.1), h1 = std::tanh(-0.2 - 1.2);
  const double top0 = std::tanh(0.3 * h0), top1 = std::tanh(h0 - h1 + 0.2);
  const Tensor out = rnn_features(ad::constant(x), w, 2).value();
  EXPECT_NEAR(out(0, 0), top0, 1e-10);
  EXPECT_NEAR(out(0, 1), top1, 1e-10);
}

TEST(RnnTest, OrderSensitive) {
  ParameterStore store;
  Rng rng(12);
  const HeadConfig cfg = head_config(HeadKind::kRnn);
  const HeadWeights w = HeadWeights::create(cfg, 4, store, rng);
  bool differs = false;
  for (int trial = 0; trial < 20 && !differs; ++trial) {
    const EncodedPair p = random_pair(4, 2, 4, rng);
    const Tensor a = bb_rnn(p, w, cfg, {}).value();
    const Tensor b = bb_rnn(with_answer(p, reversed_rows(p.answer.value())), w, cfg, {}).value();
    differs = max_abs_diff(a, b) > 1e-9;
  }
  EXPECT_TRUE(differs);
}

class AllHeadsTest : public ::testing::TestWithParam<HeadKind> {};

TEST_P(AllHeadsTest, OutputIsDistribution) {
  ParameterStore store;
  Rng rng(13);
  const HeadConfig cfg = head_config(GetParam());
  const HeadWeights w = HeadWeights::create(cfg, 4, store, rng);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor out =
        head_forward(random_pair(4, 1 + trial % 5, trial % 4, rng), w, cfg, {}).value();
    ASSERT_EQ(out.shape(), (Shape{2}));
    EXPECT_NEAR(out[0] + out[1], 1.0, 1e-12);
    EXPECT_GT(out[0], 0.0);
    EXPECT_LT(out[0], 1.0);
  }
}

TEST_P(AllHeadsTest, GradientCheckThroughEncoder) {
  ModelGradCheckOptions options;
  options.kind = GetParam();
  const ModelGradCheckReport r = model_grad_check(options);
  EXPECT_LT(r.result.max_relative_error, 1e-4) << r.worst_parameter;
  options.bert_compat = true;
  const ModelGradCheckReport compat = model_grad_check(options);
  EXPECT_LT(compat.result.max_relative_error, 1e-4) << compat.worst_parameter;
}

TEST_P(AllHeadsTest, ZeroHeadScoresHalf) {
  const Vocabulary vocab = Vocabulary::from_tokens(
      {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "SPECIAL_TOKEN", "who", "is", "it", "?", "."});
  ModelConfig sized = toy_model_config(ModelGradCheckOptions{GetParam()});
  sized.encoder.vocab_size = vocab.size();
  Model small(sized, 3);
  for (const Parameter& p : small.parameters().all()) {
    if (p.name.starts_with("head.")) fill(p.var, Tensor(p.var.shape()));
  }
  const Preprocessor pre;
  const Scorer scorer(small, vocab, pre);
  EXPECT_EQ(scorer.score_pair("Who is it?", "It is."), 0.5);
  EXPECT_EQ(scorer.score_pair("Who?", ""), 0.5);
}

INSTANTIATE_TEST_SUITE_P(Kinds, AllHeadsTest,
                         ::testing::Values(HeadKind::kBaseline, HeadKind::kBow, HeadKind::kCnn,
                                           HeadKind::kRnn),
                         [](const auto& info) { return std::string(to_string(info.param)); });

}  // namespace
}  // namespace anssel

// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "anssel/metrics.h"
#include "anssel/model.h"
#include "anssel/numerics.h"
#include "anssel/training.h"

namespace anssel {
namespace {

Tensor random_tensor(Shape shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Tensor t(std::move(shape));
  for (double& x : t.data()) x = dist(rng);
  return t;
}

ModelConfig bench_config(std::size_t hidden) {
  ModelConfig cfg;
  cfg.encoder.layers = 2;
  cfg.encoder.hidden = hidden;
  cfg.encoder.heads = 4;
  cfg.encoder.vocab_size = 100;
  cfg.encoder.max_len = 64;
  cfg.head.kind = HeadKind::kBow;
  cfg.head.hidden = 64;
  return cfg;
}

PairEncoding bench_pair(std::size_t max_len) {
  PairEncoding enc;
  const std::size_t used = max_len / 2;
  for (std::size_t i = 0; i < max_len; ++i) {
    enc.token_ids.push_back(i < used ? 4 + i % 90 : 0);
    enc.segment_ids.push_back(i >= used / 2 && i < used ? 1 : 0);
    enc.attention_mask.push_back(i < used ? 1 : 0);
  }
  enc.token_ids[0] = 2;
  enc.token_ids[used / 2 - 1] = 3;
  enc.token_ids[used - 1] = 3;
  enc.question_span = {1, used / 2 - 1};
  enc.answer_span = {used / 2, used - 1};
  return enc;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const Tensor a = random_tensor({n, n}, rng);
  const Tensor b = random_tensor({n, n}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(64)->Arg(128);

void BM_ModelForward(benchmark::State& state) {
  const Model model(bench_config(static_cast<std::size_t>(state.range(0))), 1);
  const PairEncoding enc = bench_pair(64);
  for (auto _ : state) benchmark::DoNotOptimize(model.score(enc));
}
BENCHMARK(BM_ModelForward)->Arg(32)->Arg(64);

void BM_TrainStep(benchmark::State& state) {
  Model model(bench_config(32), 1);
  std::vector<TrainingExample> examples;
  for (int i = 0; i < 8; ++i) examples.push_back({bench_pair(64), i % 2});
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 8;
  cfg.use_schedule = false;
  for (auto _ : state) benchmark::DoNotOptimize(train(examples, model, cfg));
}
BENCHMARK(BM_TrainStep);

void BM_Metrics(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::bernoulli_distribution relevant(0.2);
  std::vector<std::vector<double>> scores(static_cast<std::size_t>(state.range(0)));
  std::vector<std::vector<int>> labels(scores.size());
  for (std::size_t q = 0; q < scores.size(); ++q) {
    for (int c = 0; c < 40; ++c) {
      scores[q].push_back(score(rng));
      labels[q].push_back(c == 0 || relevant(rng) ? 1 : 0);
    }
  }
  for (auto _ : state) {
    std::vector<RankedList> lists;
    for (std::size_t q = 0; q < scores.size(); ++q) {
      lists.push_back(rank_candidates(scores[q], labels[q]));
    }
    benchmark::DoNotOptimize(summarize(lists));
  }
}
BENCHMARK(BM_Metrics)->Arg(100)->Arg(1000);

}  // namespace
}  // namespace anssel

BENCHMARK_MAIN();

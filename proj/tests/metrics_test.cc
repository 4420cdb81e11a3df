// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/metrics.h"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>
#include <vector>

namespace anssel {
namespace {

RankedList ranked(std::vector<int> labels_in_rank_order) {
  std::vector<double> scores;
  for (std::size_t i = 0; i < labels_in_rank_order.size(); ++i) {
    scores.push_back(1.0 - 0.01 * static_cast<double>(i));
  }
  return rank_candidates(scores, labels_in_rank_order);
}

// Independent oracle: order by (score desc, index asc), then precision at
// every cutoff recomputed from scratch.
std::tuple<std::optional<double>, std::optional<double>> oracle(const std::vector<double>& scores,
                                                                const std::vector<int>& labels) {
  std::vector<std::pair<double, std::size_t>> keyed;
  for (std::size_t i = 0; i < scores.size(); ++i) keyed.push_back({-scores[i], i});
  std::sort(keyed.begin(), keyed.end());
  std::vector<int> rel;
  for (const auto& [neg, i] : keyed) rel.push_back(labels[i]);
  const auto total = std::count(rel.begin(), rel.end(), 1);
  if (total == 0) return {std::nullopt, std::nullopt};
  double ap = 0.0;
  std::optional<double> rr;
  for (std::size_t k = 1; k <= rel.size(); ++k) {
    if (rel[k - 1] != 1) continue;
    const auto in_top = std::count(rel.begin(), rel.begin() + static_cast<long>(k), 1);
    ap += static_cast<double>(in_top) / static_cast<double>(k);
    if (!rr) rr = 1.0 / static_cast<double>(k);
  }
  return {ap / static_cast<double>(total), rr};
}

TEST(RankTest, OrdersByDescendingScore) {
  const std::vector<double> scores = {0.2, 0.9, 0.5};
  const std::vector<int> labels = {0, 1, 0};
  const RankedList r = rank_candidates(scores, labels, "q");
  ASSERT_EQ(r.candidates.size(), 3u);
  EXPECT_EQ(r.candidates[0].index, 1u);
  EXPECT_EQ(r.candidates[1].index, 2u);
  EXPECT_EQ(r.candidates[2].index, 0u);
  EXPECT_EQ(r.question_id, "q");
}

TEST(RankTest, TiesKeepInputOrder) {
  const std::vector<double> scores = {0.5, 0.7, 0.5, 0.5};
  const std::vector<int> labels = {1, 0, 0, 1};
  const RankedList r = rank_candidates(scores, labels);
  EXPECT_EQ(r.candidates[0].index, 1u);
  EXPECT_EQ(r.candidates[1].index, 0u);
  EXPECT_EQ(r.candidates[2].index, 2u);
  EXPECT_EQ(r.candidates[3].index, 3u);
}

TEST(RankTest, Errors) {
  const std::vector<double> scores = {0.1, 0.2};
  const std::vector<int> labels = {1};
  EXPECT_THROW(rank_candidates(scores, labels), DataError);
  EXPECT_THROW(rank_candidates({}, {}), DataError);
}

TEST(AveragePrecisionTest, Fixtures) {
  EXPECT_NEAR(*average_precision(ranked({1, 0, 1})), 5.0 / 6.0, 1e-15);
  EXPECT_DOUBLE_EQ(*average_precision(ranked({1, 1, 1})), 1.0);
  EXPECT_DOUBLE_EQ(*average_precision(ranked({0, 1})), 0.5);
  EXPECT_FALSE(average_precision(ranked({0, 0, 0})).has_value());
}

TEST(ReciprocalRankTest, Fixtures) {
  EXPECT_NEAR(*reciprocal_rank(ranked({0, 0, 1, 1})), 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(*reciprocal_rank(ranked({1, 0})), 1.0);
  EXPECT_FALSE(reciprocal_rank(ranked({0})).has_value());
}

TEST(MetricsTest, MatchesOracleOnRandomLists) {
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<std::size_t> len(1, 30);
  std::uniform_int_distribution<int> coarse(0, 9);
  std::bernoulli_distribution relevant(0.3);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = len(rng);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = coarse(rng) / 10.0;  // coarse grid forces ties
      labels[i] = relevant(rng) ? 1 : 0;
    }
    const RankedList r = rank_candidates(scores, labels);
    const auto [ap, rr] = oracle(scores, labels);
    ASSERT_EQ(average_precision(r).has_value(), ap.has_value());
    if (ap) {
      EXPECT_NEAR(*average_precision(r), *ap, 1e-12);
      EXPECT_NEAR(*reciprocal_rank(r), *rr, 1e-12);
    }
  }
}

TEST(SummarizeTest, MeansOverQuestions) {
  const std::vector<RankedList> lists = {ranked({1, 0}), ranked({0, 1})};
  const MetricsReport m = summarize(lists);
  EXPECT_DOUBLE_EQ(m.map, 0.75);
  EXPECT_DOUBLE_EQ(m.mrr, 0.75);
  EXPECT_EQ(m.evaluated, 2u);
  EXPECT_EQ(m.skipped, 0u);
}

TEST(SummarizeTest, SkipsQuestionsWithoutRelevantCandidates) {
  const std::vector<RankedList> lists = {ranked({1, 0}), ranked({0, 0})};
  const MetricsReport m = summarize(lists);
  EXPECT_DOUBLE_EQ(m.map, 1.0);
  EXPECT_EQ(m.skipped, 1u);
  MetricsOptions zero;
  zero.include_empty_as_zero = true;
  const MetricsReport z = summarize(lists, zero);
  EXPECT_DOUBLE_EQ(z.map, 0.5);
  EXPECT_DOUBLE_EQ(z.mrr, 0.5);
  EXPECT_EQ(z.evaluated, 2u);
}

TEST(SummarizeTest, NothingEvaluableIsError) {
  const std::vector<RankedList> lists = {ranked({0, 0})};
  try {
    summarize(lists);
    FAIL() << "expected an error";
  } catch (const NoEvaluableQuestionsError& e) {
    EXPECT_EQ(e.skipped(), 1u);
  }
}

// A strictly increasing transform of the scores keeps every metric.
TEST(SummarizeTest, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::bernoulli_distribution relevant(0.4);
  std::vector<RankedList> plain, mapped;
  for (int q = 0; q < 50; ++q) {
    std::vector<double> s(8), t(8);
    std::vector<int> l(8);
    for (std::size_t i = 0; i < 8; ++i) {
      s[i] = u(rng);
      t[i] = 1.0 / (1.0 + std::exp(-s[i]));
      l[i] = relevant(rng) ? 1 : 0;
    }
    l[0] = 1;
    plain.push_back(rank_candidates(s, l));
    mapped.push_back(rank_candidates(t, l));
  }
  const MetricsReport a = summarize(plain), b = summarize(mapped);
  EXPECT_EQ(a.map, b.map);
  EXPECT_EQ(a.mrr, b.mrr);
  std::reverse(plain.begin(), plain.end());
  const MetricsReport c = summarize(plain);
  EXPECT_NEAR(a.map, c.map, 1e-12);
  EXPECT_NEAR(a.mrr, c.mrr, 1e-12);
}

TEST(ReportTest, JsonHasExpectedKeys) {
  const std::vector<RankedList> lists = {rank_candidates(std::vector<double>{0.1, 0.9},
                                                         std::vector<int>{1, 0}, "q7")};
  const auto j = nlohmann::json::parse(summarize(lists).to_json());
  EXPECT_DOUBLE_EQ(j.at("map").get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(j.at("mrr").get<double>(), 0.5);
  EXPECT_EQ(j.at("evaluated").get<int>(), 1);
  EXPECT_EQ(j.at("skipped").get<int>(), 0);
  ASSERT_EQ(j.at("per_question").size(), 1u);
  EXPECT_EQ(j["per_question"][0].at("question_id"), "q7");
  EXPECT_EQ(j["per_question"][0].at("relevant"), 1);
}

TEST(ReportTest, TableHasHeaderAndRow) {
  const std::vector<RankedList> lists = {ranked({1})};
  const std::string t = summarize(lists).to_table("bow");
  EXPECT_NE(t.find("MAP"), std::string::npos);
  EXPECT_NE(t.find("bow"), std::string::npos);
  EXPECT_NE(t.find("1.000"), std::string::npos);
}

}  // namespace
}  // namespace anssel

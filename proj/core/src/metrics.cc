// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/metrics.h"

#include <fmt/format.h>

#include <algorithm>
#include <nlohmann/json.hpp>

#include "anssel/error.h"

namespace anssel {

RankedList rank_candidates(std::span<const double> scores, std::span<const int> labels,
                           std::string question_id) {
  if (scores.size() != labels.size()) {
    throw DataError(fmt::format("{} scores for {} labels", scores.size(), labels.size()));
  }
  if (scores.empty()) throw DataError("cannot rank an empty candidate list");
  RankedList r{std::move(question_id), {}};
  r.candidates.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) r.candidates.push_back({i, scores[i], labels[i]});
  std::stable_sort(r.candidates.begin(), r.candidates.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) { return a.score > b.score; });
  return r;
}

std::optional<double> average_precision(const RankedList& r) {
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t k = 0; k < r.candidates.size(); ++k) {
    if (r.candidates[k].label != 1) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  if (hits == 0) return std::nullopt;
  return sum / static_cast<double>(hits);
}

std::optional<double> reciprocal_rank(const RankedList& r) {
  for (std::size_t k = 0; k < r.candidates.size(); ++k) {
    if (r.candidates[k].label == 1) return 1.0 / static_cast<double>(k + 1);
  }
  return std::nullopt;
}

NoEvaluableQuestionsError::NoEvaluableQuestionsError(std::size_t skipped)
    : DataError(fmt::format("no question has a relevant candidate; MAP/MRR undefined ({} skipped)",
                            skipped)),
      skipped_(skipped) {}

MetricsReport summarize(std::span<const RankedList> lists, const MetricsOptions& options) {
  MetricsReport report;
  double ap_sum = 0.0, rr_sum = 0.0;
  for (const RankedList& r : lists) {
    QuestionMetrics q{r.question_id, r.candidates.size(), 0, average_precision(r),
                      reciprocal_rank(r)};
    for (const RankedCandidate& c : r.candidates) q.relevant += c.label == 1 ? 1 : 0;
    if (!q.ap && options.include_empty_as_zero) {
      q.ap = 0.0;
      q.rr = 0.0;
    }
    if (q.ap) {
      ++report.evaluated;
      ap_sum += *q.ap;
      rr_sum += *q.rr;
    } else {
      ++report.skipped;
    }
    report.per_question.push_back(std::move(q));
  }
  if (report.evaluated == 0) throw NoEvaluableQuestionsError(report.skipped);
  report.map = ap_sum / static_cast<double>(report.evaluated);
  report.mrr = rr_sum / static_cast<double>(report.evaluated);
  return report;
}

MetricsReport evaluate_map_mrr(const Scorer& scorer, const QADataset& data,
                               const MetricsOptions& options) {
  if (data.empty()) throw DataError("cannot evaluate an empty dataset");
  std::vector<RankedList> lists;
  lists.reserve(data.question_count());
  for (const QAQuestion& q : data.questions) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (const QAInstance& c : q.candidates) {
      scores.push_back(scorer.score_pair(c.question, c.answer));
      labels.push_back(c.label);
    }
    lists.push_back(rank_candidates(scores, labels, q.id));
  }
  return summarize(lists, options);
}

std::string MetricsReport::to_json(int indent) const {
  nlohmann::ordered_json j;
  j["map"] = map;
  j["mrr"] = mrr;
  j["evaluated"] = evaluated;
  j["skipped"] = skipped;
  auto& rows = j["per_question"] = nlohmann::ordered_json::array();
  for (const QuestionMetrics& q : per_question) {
    nlohmann::ordered_json row;
    row["question_id"] = q.question_id;
    row["candidates"] = q.candidates;
    row["relevant"] = q.relevant;
    row["ap"] = q.ap ? nlohmann::ordered_json(*q.ap) : nlohmann::ordered_json(nullptr);
    row["rr"] = q.rr ? nlohmann::ordered_json(*q.rr) : nlohmann::ordered_json(nullptr);
    rows.push_back(std::move(row));
  }
  return j.dump(indent);
}

std::string MetricsReport::to_table(const std::string& model_name) const {
  const std::size_t width = std::max<std::size_t>(model_name.size(), 5);
  std::string out = fmt::format("{:<{}}  {:>6}  {:>6}  {:>9}  {:>7}\n", "Model", width, "MAP",
                                "MRR", "evaluated", "skipped");
  out += fmt::format("{:<{}}  {:>6.3f}  {:>6.3f}  {:>9}  {:>7}\n", model_name, width, map, mrr,
                     evaluated, skipped);
  return out;
}

}  // namespace anssel

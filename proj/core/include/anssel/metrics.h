// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

// Ranking and MAP/MRR evaluation. Ranks are 1-based.

#ifndef ANSSEL_METRICS_H_
#define ANSSEL_METRICS_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anssel/dataset.h"
#include "anssel/error.h"
#include "anssel/model.h"

namespace anssel {

struct RankedCandidate {
  std::size_t index = 0;  // position in the original candidate list
  double score = 0.0;
  int label = 0;
};

struct RankedList {
  std::string question_id;
  std::vector<RankedCandidate> candidates;  // descending score, ties in input order
};

// Throws DataError when lengths differ or are zero.
RankedList rank_candidates(std::span<const double> scores, std::span<const int> labels,
                           std::string question_id = {});

// nullopt when the list holds no relevant candidate.
std::optional<double> average_precision(const RankedList& r);
std::optional<double> reciprocal_rank(const RankedList& r);

struct QuestionMetrics {
  std::string question_id;
  std::size_t candidates = 0;
  std::size_t relevant = 0;
  std::optional<double> ap;
  std::optional<double> rr;
};

struct MetricsReport {
  double map = 0.0;
  double mrr = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::vector<QuestionMetrics> per_question;

  std::string to_json(int indent = 2) const;
  // Aligned plain-text summary.
  std::string to_table(const std::string& model_name = "model") const;
};

struct MetricsOptions {
  // Score questions without a relevant candidate as 0 instead of skipping.
  bool include_empty_as_zero = false;
};

// Thrown when no question can be evaluated; carries the skip count.
class NoEvaluableQuestionsError : public DataError {
 public:
  explicit NoEvaluableQuestionsError(std::size_t skipped);
  std::size_t skipped() const { return skipped_; }

 private:
  std::size_t skipped_;
};

MetricsReport summarize(std::span<const RankedList> lists, const MetricsOptions& options = {});

// Scores every candidate with dropout off, ranks per question and
// aggregates. Throws DataError on an empty dataset.
MetricsReport evaluate_map_mrr(const Scorer& scorer, const QADataset& data,
                               const MetricsOptions& options = {});

}  // namespace anssel

#endif  // ANSSEL_METRICS_H_

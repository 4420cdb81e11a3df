// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

// Question/candidate datasets stored as TSV:
//   question_id<TAB>question<TAB>answer<TAB>label
// Lines sharing a question_id form one question, in order of first
// appearance; they need not be contiguous.

#ifndef ANSSEL_DATASET_H_
#define ANSSEL_DATASET_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace anssel {

struct QAInstance {
  std::string question_id;
  std::string question;
  std::string answer;
  int label = 0;
};

struct QAQuestion {
  std::string id;
  std::string question;
  std::vector<QAInstance> candidates;
};

struct QADataset {
  std::vector<QAQuestion> questions;

  std::size_t question_count() const { return questions.size(); }
  std::size_t pair_count() const;
  bool empty() const { return questions.empty(); }
  // Candidates in question order.
  std::vector<QAInstance> flatten() const;
};

// Throws FormatError with the 1-based line for a wrong column count, a label
// other than 0/1, an empty id, a question text that differs from an earlier
// line with the same id, or an input without any data line.
QADataset parse_dataset(std::istream& in, std::string_view source = "<stream>");
QADataset load_dataset(const std::filesystem::path& path);

void write_dataset(std::ostream& out, const QADataset& data);
void save_dataset(const QADataset& data, const std::filesystem::path& path);

// Published sizes of the standard benchmark splits.
struct ReferenceStats {
  std::string_view name;  // e.g. "trecqa-raw/train"
  std::size_t questions;
  std::size_t pairs;
};

std::span<const ReferenceStats> reference_stats();
std::optional<ReferenceStats> find_reference_stats(std::string_view name);

// Compares against the named split and logs a warning per mismatch. Returns
// true when both counts agree. Throws ConfigError for an unknown name.
bool check_reference_stats(const QADataset& data, std::string_view name);

}  // namespace anssel

#endif  // ANSSEL_DATASET_H_

// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/dataset.h"

#include <spdlog/spdlog.h>

#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "anssel/error.h"

namespace anssel {

std::size_t QADataset::pair_count() const {
  std::size_t n = 0;
  for (const QAQuestion& q : questions) n += q.candidates.size();
  return n;
}

std::vector<QAInstance> QADataset::flatten() const {
  std::vector<QAInstance> out;
  out.reserve(pair_count());
  for (const QAQuestion& q : questions) out.insert(out.end(), q.candidates.begin(), q.candidates.end());
  return out;
}

QADataset parse_dataset(std::istream& in, std::string_view source) {
  const std::string src(source);
  QADataset data;
  std::unordered_map<std::string, std::size_t> index;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string> cols;
    for (std::size_t start = 0;;) {
      const auto tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() != 4) {
      throw FormatError(src + ": expected 4 tab-separated columns, found " +
                            std::to_string(cols.size()),
                        lineno);
    }
    const std::string& id = cols[0];
    const std::string& question = cols[1];
    const std::string& answer = cols[2];
    const std::string& label = cols[3];
    if (label != "0" && label != "1") {
      throw FormatError(src + ": label must be 0 or 1, got '" + label + "'", lineno);
    }
    if (id.empty()) throw FormatError(src + ": empty question_id", lineno);

    auto [it, inserted] = index.try_emplace(id, data.questions.size());
    if (inserted) {
      data.questions.push_back({id, question, {}});
    } else if (data.questions[it->second].question != question) {
      throw FormatError(src + ": question text differs from earlier lines of id '" + id + "'",
                        lineno);
    }
    data.questions[it->second].candidates.push_back({id, question, answer, label == "1" ? 1 : 0});
  }
  if (data.empty()) throw FormatError(src + ": no data lines", lineno);
  spdlog::info("{}: {} questions, {} pairs", src, data.question_count(), data.pair_count());
  return data;
}

QADataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset " + path.string());
  return parse_dataset(in, path.string());
}

void write_dataset(std::ostream& out, const QADataset& data) {
  for (const QAQuestion& q : data.questions) {
    for (const QAInstance& c : q.candidates) {
      out << c.question_id << '\t' << c.question << '\t' << c.answer << '\t' << c.label << '\n';
    }
  }
}

void save_dataset(const QADataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write dataset " + path.string());
  write_dataset(out, data);
  if (!out) throw DataError("write failed for " + path.string());
}

std::span<const ReferenceStats> reference_stats() {
  static constexpr std::array<ReferenceStats, 9> kStats = {{
      {"trecqa-raw/train", 1229, 53417},
      {"trecqa-raw/dev", 82, 1148},
      {"trecqa-raw/test", 100, 1517},
      {"trecqa-clean/train", 1229, 53417},
      {"trecqa-clean/dev", 65, 1117},
      {"trecqa-clean/test", 68, 1142},
      {"wikiqa/train", 873, 8672},
      {"wikiqa/dev", 126, 1130},
      {"wikiqa/test", 243, 2351},
  }};
  return kStats;
}

std::optional<ReferenceStats> find_reference_stats(std::string_view name) {
  for (const ReferenceStats& s : reference_stats()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

bool check_reference_stats(const QADataset& data, std::string_view name) {
  const auto ref = find_reference_stats(name);
  if (!ref) throw ConfigError("unknown benchmark split '" + std::string(name) + "'");
  bool ok = true;
  if (data.question_count() != ref->questions) {
    spdlog::warn("{}: {} questions, reference {}", name, data.question_count(), ref->questions);
    ok = false;
  }
  if (data.pair_count() != ref->pairs) {
    spdlog::warn("{}: {} pairs, reference {}", name, data.pair_count(), ref->pairs);
    ok = false;
  }
  return ok;
}

}  // namespace anssel

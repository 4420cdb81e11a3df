// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/preprocess.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <regex>
#include <unordered_map>

#include "anssel/error.h"
#include "anssel/tokenizer.h"

namespace anssel {

std::string_view to_string(EatClass c) {
  switch (c) {
    case EatClass::kHum: return "HUM";
    case EatClass::kLoc: return "LOC";
    case EatClass::kEnty: return "ENTY";
    case EatClass::kNum: return "NUM";
    case EatClass::kNone: break;
  }
  return "NONE";
}

EatClass parse_eat_class(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && !std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
  std::string word;
  while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) {
    word.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(text[i++]))));
  }
  if (word == "HUM") return EatClass::kHum;
  if (word == "LOC") return EatClass::kLoc;
  if (word == "ENTY") return EatClass::kEnty;
  if (word == "NUM") return EatClass::kNum;
  return EatClass::kNone;
}

EatClass map_ner_tag(std::string_view tag) {
  static const std::unordered_map<std::string_view, EatClass> kTable = {
      {"PERSON", EatClass::kHum},       {"ORG", EatClass::kHum},
      {"NORP", EatClass::kHum},         {"LOC", EatClass::kLoc},
      {"GPE", EatClass::kLoc},          {"PRODUCT", EatClass::kEnty},
      {"EVENT", EatClass::kEnty},       {"LANGUAGE", EatClass::kEnty},
      {"WORK OF ART", EatClass::kEnty}, {"WORK_OF_ART", EatClass::kEnty},
      {"LAW", EatClass::kEnty},         {"FAC", EatClass::kEnty},
      {"DATE", EatClass::kNum},         {"TIME", EatClass::kNum},
      {"PERCENT", EatClass::kNum},      {"MONEY", EatClass::kNum},
      {"QUANTITY", EatClass::kNum},     {"ORDINAL", EatClass::kNum},
      {"CARDINAL", EatClass::kNum},
  };
  auto it = kTable.find(tag);
  return it == kTable.end() ? EatClass::kNone : it->second;
}

EatClass RuleEatClassifier::classify(std::string_view question) const {
  std::vector<std::string> words;
  std::string word;
  for (char ch : question) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalpha(c)) {
      word.push_back(static_cast<char>(std::tolower(c)));
    } else if (!word.empty()) {
      words.push_back(std::move(word));
      word.clear();
    }
  }
  if (!word.empty()) words.push_back(std::move(word));

  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string& w = words[i];
    if (w == "who" || w == "whom" || w == "whose") return EatClass::kHum;
    if (w == "where") return EatClass::kLoc;
    if (w == "when") return EatClass::kNum;
    if (w == "how" && i + 1 < words.size()) {
      const std::string& next = words[i + 1];
      if (next == "many" || next == "much" || next == "old" || next == "long") {
        return EatClass::kNum;
      }
    }
    if (w == "what" || w == "which" || w == "name") return EatClass::kEnty;
  }
  return EatClass::kNone;
}

EatClass detect_eat(std::string_view question, const EatClassifier& classifier) {
  if (question.empty()) throw DataError("cannot detect the answer type of an empty question");
  return classifier.classify(question);
}

namespace {

bool is_word_char(char ch) {
  const auto c = static_cast<unsigned char>(ch);
  return c >= 0x80 || std::isalnum(c) || c == '_';
}

bool boundary_before(std::string_view text, std::size_t pos) {
  return pos == 0 || !is_word_char(text[pos - 1]) || !is_word_char(text[pos]);
}

bool boundary_after(std::string_view text, std::size_t end) {
  return end == text.size() || !is_word_char(text[end]) || !is_word_char(text[end - 1]);
}

}  // namespace

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open gazetteer file " + path.string());
  Gazetteer g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw FormatError("gazetteer line must be 'surface<TAB>TAG' in " + path.string(), lineno);
    }
    try {
      g.add(line.substr(0, tab), line.substr(tab + 1));
    } catch (const DataError& e) {
      throw FormatError(std::string(e.what()) + " in " + path.string(), lineno);
    }
  }
  return g;
}

void Gazetteer::add(std::string surface, std::string tag) {
  if (surface.empty() || tag.empty()) throw DataError("gazetteer entry with an empty field");
  if (surface.find(kSpecialToken) != std::string::npos) {
    throw DataError("gazetteer entry may not contain " + std::string(kSpecialToken));
  }
  max_len_ = std::max(max_len_, surface.size());
  entries_.insert_or_assign(std::move(surface), std::move(tag));
}

void Gazetteer::merge(const Gazetteer& other) {
  for (const auto& [surface, tag] : other.entries_) add(surface, tag);
}

std::pair<std::size_t, const std::string*> Gazetteer::longest_match(std::string_view text,
                                                                    std::size_t pos) const {
  const std::size_t longest = std::min(max_len_, text.size() - pos);
  for (std::size_t len = longest; len > 0; --len) {
    if (!boundary_after(text, pos + len)) continue;
    auto it = entries_.find(text.substr(pos, len));
    if (it != entries_.end()) return {len, &it->second};
  }
  return {0, nullptr};
}

GazetteerTagger::GazetteerTagger(Gazetteer gazetteer) : gazetteer_(std::move(gazetteer)) {}

std::vector<EntitySpan> GazetteerTagger::tag(std::string_view text) const {
  // Regions already holding SPECIAL_TOKEN are never tagged again.
  std::vector<std::pair<std::size_t, std::size_t>> taken;
  for (std::size_t p = text.find(kSpecialToken); p != std::string_view::npos;
       p = text.find(kSpecialToken, p + 1)) {
    taken.emplace_back(p, p + kSpecialToken.size());
  }
  auto overlaps = [&](std::size_t s, std::size_t e) {
    return std::any_of(taken.begin(), taken.end(),
                       [&](const auto& r) { return s < r.second && r.first < e; });
  };

  std::vector<EntitySpan> spans;
  for (std::size_t i = 0; i < text.size();) {
    if (boundary_before(text, i)) {
      auto [len, tag] = gazetteer_.longest_match(text, i);
      if (len > 0 && !overlaps(i, i + len)) {
        spans.push_back({i, i + len, *tag, std::string(text.substr(i, len))});
        taken.emplace_back(i, i + len);
        i += len;
        continue;
      }
    }
    ++i;
  }

  static const std::regex kDate(
      R"(\b(?:(?:January|February|March|April|May|June|July|August|September|October|November|December)\s+\d{1,2}(?:,\s*\d{4})?|(?:January|February|March|April|May|June|July|August|September|October|November|December)\s+\d{4}|1\d{3}|20\d{2})\b)");
  static const std::regex kCardinal(R"(\b\d+(?:[.,]\d+)*\b)");
  const std::string owned(text);
  for (const auto& [re, label] : {std::pair{&kDate, "DATE"}, std::pair{&kCardinal, "CARDINAL"}}) {
    for (auto it = std::sregex_iterator(owned.begin(), owned.end(), *re);
         it != std::sregex_iterator(); ++it) {
      const auto s = static_cast<std::size_t>(it->position());
      const auto e = s + static_cast<std::size_t>(it->length());
      if (overlaps(s, e)) continue;
      spans.push_back({s, e, label, it->str()});
      taken.emplace_back(s, e);
    }
  }
  std::sort(spans.begin(), spans.end(),
            [](const EntitySpan& a, const EntitySpan& b) { return a.start < b.start; });
  return spans;
}

void validate_spans(std::string_view text, std::span<const EntitySpan> spans) {
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const EntitySpan& s = spans[i];
    if (s.start >= s.end || s.end > text.size()) {
      throw DataError("entity span [" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                      ") is invalid for text of length " + std::to_string(text.size()));
    }
    if (text.substr(s.start, s.end - s.start) != s.surface) {
      throw DataError("entity span surface '" + s.surface + "' does not match the text");
    }
    if (i > 0 && s.start < prev_end) {
      throw DataError("entity spans overlap or are unsorted at offset " + std::to_string(s.start));
    }
    prev_end = s.end;
  }
}

namespace {

std::vector<EntitySpan> sorted_copy(std::span<const EntitySpan> spans) {
  std::vector<EntitySpan> out(spans.begin(), spans.end());
  std::sort(out.begin(), out.end(),
            [](const EntitySpan& a, const EntitySpan& b) { return a.start < b.start; });
  return out;
}

template <typename Replacement>
std::string replace_spans(std::string_view text, std::span<const EntitySpan> spans,
                          Replacement&& replacement) {
  const auto sorted = sorted_copy(spans);
  validate_spans(text, sorted);
  std::string out(text);
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
    if (auto rep = replacement(*it)) out.replace(it->start, it->end - it->start, *rep);
  }
  return out;
}

}  // namespace

std::string highlight(std::string_view answer, EatClass eat, std::span<const EntitySpan> spans) {
  if (eat == EatClass::kNone) {
    validate_spans(answer, sorted_copy(spans));
    return std::string(answer);
  }
  return replace_spans(answer, spans, [eat](const EntitySpan& s) -> std::optional<std::string> {
    if (map_ner_tag(s.tag) == eat) return std::string(kSpecialToken);
    return std::nullopt;
  });
}

std::string render_tags(std::string_view text, std::span<const EntitySpan> spans) {
  return replace_spans(text, spans, [](const EntitySpan& s) -> std::optional<std::string> {
    return "[" + s.tag + "]";
  });
}

std::string render_classes(std::string_view text, std::span<const EntitySpan> spans) {
  return replace_spans(text, spans, [](const EntitySpan& s) -> std::optional<std::string> {
    const EatClass c = map_ner_tag(s.tag);
    if (c == EatClass::kNone) return std::nullopt;
    return std::string(to_string(c));
  });
}

Preprocessor::Preprocessor()
    : Preprocessor(std::make_shared<RuleEatClassifier>(), std::make_shared<GazetteerTagger>()) {}

Preprocessor::Preprocessor(std::shared_ptr<const EatClassifier> classifier,
                           std::shared_ptr<const EntityTagger> tagger)
    : classifier_(std::move(classifier)), tagger_(std::move(tagger)) {}

EatClass Preprocessor::eat(std::string_view question) const {
  return detect_eat(question, *classifier_);
}

PreprocessedPair Preprocessor::operator()(std::string_view question,
                                          std::string_view answer) const {
  const EatClass c = eat(question);
  if (c == EatClass::kNone) return {std::string(question), std::string(answer), c};
  const auto spans = tagger_->tag(answer);
  return {std::string(question), highlight(answer, c, spans), c};
}

}  // namespace anssel

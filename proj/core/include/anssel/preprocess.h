// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

// Expected-answer-type detection and candidate highlighting: entities in the
// answer whose class matches the question's expected answer type are replaced
// by SPECIAL_TOKEN. Questions are never rewritten.

#ifndef ANSSEL_PREPROCESS_H_
#define ANSSEL_PREPROCESS_H_

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace anssel {

// Coarse answer types; kNone disables highlighting.
enum class EatClass { kNone, kHum, kLoc, kEnty, kNum };

std::string_view to_string(EatClass c);
// Accepts "HUM", "hum", "HUM:ind", "(HUM, ind)", ...: the first alphabetic
// run decides. Unknown classes (ABBR, DESC, ...) map to kNone.
EatClass parse_eat_class(std::string_view text);

// Character offsets [start, end) into the tagged text.
struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string tag;
  std::string surface;
  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

// Named-entity tag -> answer type, per the fixed mapping:
//   PERSON ORG NORP -> HUM;  LOC GPE -> LOC;
//   PRODUCT EVENT LANGUAGE WORK OF ART LAW FAC -> ENTY;
//   DATE TIME PERCENT MONEY QUANTITY ORDINAL CARDINAL -> NUM;  else NONE.
// "WORK_OF_ART" is accepted as a spelling of "WORK OF ART".
EatClass map_ner_tag(std::string_view tag);

class EatClassifier {
 public:
  virtual ~EatClassifier() = default;
  virtual EatClass classify(std::string_view question) const = 0;
};

// First interrogative keyword wins: who/whom/whose -> HUM, where -> LOC,
// when/how many/how much/how old/how long -> NUM, what/which/name -> ENTY.
class RuleEatClassifier final : public EatClassifier {
 public:
  EatClass classify(std::string_view question) const override;
};

// GET <url>?q=<question>; the body is a class string for parse_eat_class.
// Any transport or status failure logs a warning and defers to `fallback`.
class HttpEatClassifier final : public EatClassifier {
 public:
  HttpEatClassifier(std::string url, std::chrono::milliseconds timeout,
                    std::shared_ptr<const EatClassifier> fallback);
  EatClass classify(std::string_view question) const override;

 private:
  std::string url_;
  std::chrono::milliseconds timeout_;
  std::shared_ptr<const EatClassifier> fallback_;
};

// Throws DataError on an empty question.
EatClass detect_eat(std::string_view question, const EatClassifier& classifier);

class EntityTagger {
 public:
  virtual ~EntityTagger() = default;
  // Non-overlapping spans sorted by start.
  virtual std::vector<EntitySpan> tag(std::string_view text) const = 0;
};

// Case-sensitive surface -> tag dictionary with longest-match lookup at word
// boundaries.
class Gazetteer {
 public:
  // Lines "surface<TAB>TAG"; blank lines and lines starting with '#' are
  // skipped. Throws FormatError with the line number on malformed input.
  static Gazetteer load(const std::filesystem::path& path);

  // Rejects empty fields and surfaces containing SPECIAL_TOKEN.
  void add(std::string surface, std::string tag);
  void merge(const Gazetteer& other);

  std::size_t size() const { return entries_.size(); }
  // Longest entry starting at `pos` that ends on a word boundary, as
  // (length, tag); length 0 when nothing matches.
  std::pair<std::size_t, const std::string*> longest_match(std::string_view text,
                                                           std::size_t pos) const;

 private:
  std::map<std::string, std::string, std::less<>> entries_;
  std::size_t max_len_ = 0;
};

// Offline tagger: gazetteer matches first, then regex rules tag years and
// month-day expressions as DATE and remaining numbers as CARDINAL.
class GazetteerTagger final : public EntityTagger {
 public:
  explicit GazetteerTagger(Gazetteer gazetteer = {});
  std::vector<EntitySpan> tag(std::string_view text) const override;

 private:
  Gazetteer gazetteer_;
};

// GET <url>?text=<text>; body lines "start<TAB>end<TAB>TAG". Falls back on
// transport errors or a malformed body.
class HttpEntityTagger final : public EntityTagger {
 public:
  HttpEntityTagger(std::string url, std::chrono::milliseconds timeout,
                   std::shared_ptr<const EntityTagger> fallback);
  std::vector<EntitySpan> tag(std::string_view text) const override;

 private:
  std::string url_;
  std::chrono::milliseconds timeout_;
  std::shared_ptr<const EntityTagger> fallback_;
};

// Replaces every span whose mapped class equals `eat` with SPECIAL_TOKEN,
// right to left; other text is untouched. Throws DataError on invalid or
// overlapping spans.
std::string highlight(std::string_view answer, EatClass eat, std::span<const EntitySpan> spans);

// Step renderings of the highlighter: spans replaced by "[TAG]", then by
// their answer class.
std::string render_tags(std::string_view text, std::span<const EntitySpan> spans);
std::string render_classes(std::string_view text, std::span<const EntitySpan> spans);

struct PreprocessedPair {
  std::string question;
  std::string answer;
  EatClass eat = EatClass::kNone;
};

class Preprocessor {
 public:
  // Rule classifier and an empty gazetteer.
  Preprocessor();
  Preprocessor(std::shared_ptr<const EatClassifier> classifier,
               std::shared_ptr<const EntityTagger> tagger);

  PreprocessedPair operator()(std::string_view question, std::string_view answer) const;
  EatClass eat(std::string_view question) const;

 private:
  std::shared_ptr<const EatClassifier> classifier_;
  std::shared_ptr<const EntityTagger> tagger_;
};

// Validates spans against text and sort order; throws DataError.
void validate_spans(std::string_view text, std::span<const EntitySpan> spans);

}  // namespace anssel

#endif  // ANSSEL_PREPROCESS_H_

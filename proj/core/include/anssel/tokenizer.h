// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ANSSEL_TOKENIZER_H_
#define ANSSEL_TOKENIZER_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace anssel {

inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::string_view kPadToken = "[PAD]";
inline constexpr std::string_view kUnkToken = "[UNK]";
// Marker the highlighter writes into candidate answers.
inline constexpr std::string_view kSpecialToken = "SPECIAL_TOKEN";

// Dense token <-> id mapping. [CLS], [SEP], [PAD], [UNK] and SPECIAL_TOKEN
// are always present exactly once.
class Vocabulary {
 public:
  // Validates the list (no duplicates, no whitespace, reserved tokens present)
  // and appends SPECIAL_TOKEN with a warning when it is missing. Errors report
  // 1-based line numbers.
  static Vocabulary from_tokens(std::vector<std::string> tokens);
  // UTF-8 file, one token per line; id = zero-based line index.
  static Vocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t size() const { return tokens_.size(); }
  std::optional<std::size_t> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }
  // Throws DataError for an unknown token.
  std::size_t id(std::string_view token) const;
  const std::string& token(std::size_t id) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::size_t cls_id() const { return cls_; }
  std::size_t sep_id() const { return sep_; }
  std::size_t pad_id() const { return pad_; }
  std::size_t unk_id() const { return unk_; }
  std::size_t special_id() const { return special_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::size_t cls_ = 0, sep_ = 0, pad_ = 0, unk_ = 0, special_ = 0;
};

// Whitespace + ASCII punctuation split with ASCII lowercasing. SPECIAL_TOKEN
// is cut out first and emitted verbatim, never lowercased or split.
std::vector<std::string> basic_split(std::string_view text);

// Greedy longest-match-first wordpiece over basic_split(text). Continuation
// pieces carry a "##" prefix; a word that cannot be covered becomes [UNK].
std::vector<std::string> wordpiece_tokenize(std::string_view text, const Vocabulary& vocab);

// Half-open index range.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  friend bool operator==(const Span&, const Span&) = default;
};

// `[CLS] q… [SEP] a… [SEP] [PAD]…` laid out to max_len.
struct PairEncoding {
  std::vector<std::size_t> token_ids;
  std::vector<int> segment_ids;     // 0 for [CLS] q [SEP] and padding, 1 for a [SEP]
  std::vector<int> attention_mask;  // 1 real, 0 pad
  Span question_span;               // excludes structural tokens
  Span answer_span;

  std::size_t max_len() const { return token_ids.size(); }
  // Number of non-pad positions.
  std::size_t length() const { return answer_span.end + 1; }
};

inline constexpr std::size_t kDefaultMaxLen = 128;

// Builds the pair template. When it does not fit, answer tokens are dropped
// from the end first, then question tokens. Throws DataError when the
// question has no tokens and ConfigError when max_len < 8.
PairEncoding build_pair_input(const std::vector<std::string>& question_tokens,
                              const std::vector<std::string>& answer_tokens,
                              const Vocabulary& vocab, std::size_t max_len = kDefaultMaxLen);

// Tokens of the non-pad positions.
std::vector<std::string> decode(const PairEncoding& enc, const Vocabulary& vocab);

// The template at the text level: "[CLS] q [SEP] a [SEP]".
std::string render_pair_text(std::string_view question, std::string_view answer);

}  // namespace anssel

#endif  // ANSSEL_TOKENIZER_H_

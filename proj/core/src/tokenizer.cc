// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/tokenizer.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <fstream>

#include "anssel/error.h"

namespace anssel {

namespace {

constexpr std::size_t kMaxCharsPerWord = 100;

bool is_space(unsigned char c) { return std::isspace(c) != 0; }
bool is_punct(unsigned char c) { return c < 0x80 && std::ispunct(c) != 0; }

}  // namespace

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  Vocabulary v;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (t.empty()) throw FormatError("empty vocabulary token", i + 1);
    if (std::any_of(t.begin(), t.end(), [](unsigned char c) { return is_space(c); })) {
      throw FormatError("vocabulary token contains whitespace: '" + t + "'", i + 1);
    }
    if (!v.ids_.emplace(t, i).second) {
      throw FormatError("duplicate vocabulary token '" + t + "'", i + 1);
    }
  }
  v.tokens_ = std::move(tokens);
  for (std::string_view reserved : {kClsToken, kSepToken, kPadToken, kUnkToken}) {
    if (!v.contains(reserved)) {
      throw FormatError("vocabulary is missing reserved token " + std::string(reserved));
    }
  }
  if (!v.contains(kSpecialToken)) {
    spdlog::warn("vocabulary has no {}; appending it with id {}", kSpecialToken, v.size());
    v.ids_.emplace(std::string(kSpecialToken), v.tokens_.size());
    v.tokens_.emplace_back(kSpecialToken);
  }
  v.cls_ = *v.find(kClsToken);
  v.sep_ = *v.find(kSepToken);
  v.pad_ = *v.find(kPadToken);
  v.unk_ = *v.find(kUnkToken);
  v.special_ = *v.find(kSpecialToken);
  return v;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open vocabulary file " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(std::move(line));
  }
  return from_tokens(std::move(tokens));
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write vocabulary file " + path.string());
  for (const std::string& t : tokens_) out << t << '\n';
}

std::optional<std::size_t> Vocabulary::find(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::id(std::string_view token) const {
  auto found = find(token);
  if (!found) throw DataError("token '" + std::string(token) + "' is not in the vocabulary");
  return *found;
}

const std::string& Vocabulary::token(std::size_t id) const {
  if (id >= tokens_.size()) {
    throw DataError("token id " + std::to_string(id) + " out of range for vocabulary of " +
                    std::to_string(tokens_.size()));
  }
  return tokens_[id];
}

namespace {

// Splits a run of non-special text on whitespace and punctuation.
void split_plain(std::string_view text, std::vector<std::string>& out) {
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back(std::move(word));
    word.clear();
  };
  for (unsigned char c : text) {
    if (is_space(c)) {
      flush();
    } else if (is_punct(c)) {
      flush();
      out.emplace_back(1, static_cast<char>(c));
    } else {
      word.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    }
  }
  flush();
}

}  // namespace

std::vector<std::string> basic_split(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t hit = text.find(kSpecialToken, pos);
    if (hit == std::string_view::npos) {
      split_plain(text.substr(pos), out);
      break;
    }
    split_plain(text.substr(pos, hit - pos), out);
    out.emplace_back(kSpecialToken);
    pos = hit + kSpecialToken.size();
  }
  return out;
}

std::vector<std::string> wordpiece_tokenize(std::string_view text, const Vocabulary& vocab) {
  std::vector<std::string> out;
  for (const std::string& word : basic_split(text)) {
    if (word.size() > kMaxCharsPerWord) {
      out.emplace_back(kUnkToken);
      continue;
    }
    std::vector<std::string> pieces;
    std::size_t start = 0;
    bool bad = false;
    while (start < word.size()) {
      std::size_t end = word.size();
      std::string match;
      while (start < end) {
        std::string candidate = word.substr(start, end - start);
        if (start > 0) candidate = "##" + candidate;
        if (vocab.contains(candidate)) {
          match = std::move(candidate);
          break;
        }
        --end;
      }
      if (match.empty()) {
        bad = true;
        break;
      }
      pieces.push_back(std::move(match));
      start = end;
    }
    if (bad) {
      out.emplace_back(kUnkToken);
    } else {
      out.insert(out.end(), pieces.begin(), pieces.end());
    }
  }
  return out;
}

PairEncoding build_pair_input(const std::vector<std::string>& question_tokens,
                              const std::vector<std::string>& answer_tokens,
                              const Vocabulary& vocab, std::size_t max_len) {
  if (max_len < 8) throw ConfigError("max_len must be at least 8, got " + std::to_string(max_len));
  if (question_tokens.empty()) throw DataError("question has no tokens");

  const std::size_t budget = max_len - 3;
  const std::size_t q_len = std::min(question_tokens.size(), budget);
  const std::size_t a_len = std::min(answer_tokens.size(), budget - q_len);

  PairEncoding enc;
  enc.token_ids.reserve(max_len);
  auto push = [&](std::size_t id, int segment) {
    enc.token_ids.push_back(id);
    enc.segment_ids.push_back(segment);
    enc.attention_mask.push_back(1);
  };
  push(vocab.cls_id(), 0);
  for (std::size_t i = 0; i < q_len; ++i) push(vocab.id(question_tokens[i]), 0);
  push(vocab.sep_id(), 0);
  for (std::size_t i = 0; i < a_len; ++i) push(vocab.id(answer_tokens[i]), 1);
  push(vocab.sep_id(), 1);
  enc.question_span = {1, 1 + q_len};
  enc.answer_span = {2 + q_len, 2 + q_len + a_len};
  while (enc.token_ids.size() < max_len) {
    enc.token_ids.push_back(vocab.pad_id());
    enc.segment_ids.push_back(0);
    enc.attention_mask.push_back(0);
  }
  return enc;
}

std::vector<std::string> decode(const PairEncoding& enc, const Vocabulary& vocab) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < enc.token_ids.size() && enc.attention_mask[i]; ++i) {
    out.push_back(vocab.token(enc.token_ids[i]));
  }
  return out;
}

std::string render_pair_text(std::string_view question, std::string_view answer) {
  std::string out = std::string(kClsToken) + " " + std::string(question) + " " +
                    std::string(kSepToken) + " ";
  if (!answer.empty()) out += std::string(answer) + " ";
  return out + std::string(kSepToken);
}

}  // namespace anssel

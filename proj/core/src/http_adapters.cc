// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

// HTTP clients for the optional external answer-type and entity services.

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <optional>
#include <sstream>

#include "anssel/error.h"
#include "anssel/preprocess.h"

namespace anssel {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint URL needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

// Body of a 200 response, or nullopt with a warning.
std::optional<std::string> fetch(const std::string& url, std::chrono::milliseconds timeout,
                                 const std::string& key, std::string_view value) {
  const Endpoint ep = split_url(url);
  httplib::Client client(ep.origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  httplib::Params params{{key, std::string(value)}};
  auto res = client.Get(ep.path, params, httplib::Headers{});
  if (!res) {
    spdlog::warn("{} unreachable ({}); using the built-in fallback", url,
                 httplib::to_string(res.error()));
    return std::nullopt;
  }
  if (res->status != 200) {
    spdlog::warn("{} answered HTTP {}; using the built-in fallback", url, res->status);
    return std::nullopt;
  }
  return res->body;
}

}  // namespace

HttpEatClassifier::HttpEatClassifier(std::string url, std::chrono::milliseconds timeout,
                                     std::shared_ptr<const EatClassifier> fallback)
    : url_(std::move(url)), timeout_(timeout), fallback_(std::move(fallback)) {
  split_url(url_);
}

EatClass HttpEatClassifier::classify(std::string_view question) const {
  if (auto body = fetch(url_, timeout_, "q", question)) return parse_eat_class(*body);
  return fallback_->classify(question);
}

HttpEntityTagger::HttpEntityTagger(std::string url, std::chrono::milliseconds timeout,
                                   std::shared_ptr<const EntityTagger> fallback)
    : url_(std::move(url)), timeout_(timeout), fallback_(std::move(fallback)) {
  split_url(url_);
}

std::vector<EntitySpan> HttpEntityTagger::tag(std::string_view text) const {
  auto body = fetch(url_, timeout_, "text", text);
  if (!body) return fallback_->tag(text);
  std::vector<EntitySpan> spans;
  std::istringstream lines(*body);
  std::string line;
  try {
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      const auto t1 = line.find('\t');
      const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
      if (t2 == std::string::npos) throw DataError("malformed entity line '" + line + "'");
      std::size_t start = 0, end = 0;
      const auto r1 = std::from_chars(line.data(), line.data() + t1, start);
      const auto r2 = std::from_chars(line.data() + t1 + 1, line.data() + t2, end);
      if (r1.ec != std::errc() || r2.ec != std::errc()) {
        throw DataError("malformed entity offsets in '" + line + "'");
      }
      std::string tag = line.substr(t2 + 1);
      if (!tag.empty() && tag.back() == '\r') tag.pop_back();
      if (start >= end || end > text.size() || tag.empty()) {
        throw DataError("entity span out of range: '" + line + "'");
      }
      spans.push_back({start, end, tag, std::string(text.substr(start, end - start))});
    }
    std::sort(spans.begin(), spans.end(),
              [](const EntitySpan& a, const EntitySpan& b) { return a.start < b.start; });
    validate_spans(text, spans);
  } catch (const DataError& e) {
    spdlog::warn("{} returned unusable entities ({}); using the built-in fallback", url_,
                 e.what());
    return fallback_->tag(text);
  }
  return spans;
}

}  // namespace anssel

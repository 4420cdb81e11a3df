// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/config.h"

#include <fmt/format.h>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <map>

#include "anssel/error.h"

namespace anssel {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not a valid number", key, value));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, value));
}

std::vector<std::filesystem::path> parse_paths(std::string_view value) {
  std::vector<std::filesystem::path> out;
  while (!value.empty()) {
    const auto comma = value.find(',');
    const auto item = trim(value.substr(0, comma));
    if (!item.empty()) out.emplace_back(std::string(item));
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return out;
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

struct Field {
  std::function<void(RunConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field size_field(T RunConfig::*outer, std::size_t T::*member) {
  return {[=](RunConfig& c, std::string_view k, std::string_view v) {
            (c.*outer).*member = parse_number<std::size_t>(k, v);
          },
          [=](const RunConfig& c) { return std::to_string((c.*outer).*member); }};
}

template <typename T>
Field double_field(T RunConfig::*outer, double T::*member) {
  return {[=](RunConfig& c, std::string_view k, std::string_view v) {
            (c.*outer).*member = parse_number<double>(k, v);
          },
          [=](const RunConfig& c) { return fmt_double((c.*outer).*member); }};
}

Field path_field(std::filesystem::path RunConfig::*member) {
  return {[=](RunConfig& c, std::string_view, std::string_view v) { c.*member = std::string(v); },
          [=](const RunConfig& c) { return (c.*member).string(); }};
}

Field string_field(std::string RunConfig::*member) {
  return {[=](RunConfig& c, std::string_view, std::string_view v) { c.*member = std::string(v); },
          [=](const RunConfig& c) { return c.*member; }};
}

Field encoder_size(std::size_t EncoderConfig::*member) {
  return {[=](RunConfig& c, std::string_view k, std::string_view v) {
            c.model.encoder.*member = parse_number<std::size_t>(k, v);
          },
          [=](const RunConfig& c) { return std::to_string(c.model.encoder.*member); }};
}

Field head_size(std::size_t HeadConfig::*member) {
  return {[=](RunConfig& c, std::string_view k, std::string_view v) {
            c.model.head.*member = parse_number<std::size_t>(k, v);
          },
          [=](const RunConfig& c) { return std::to_string(c.model.head.*member); }};
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> kFields = {
      {"vocab", path_field(&RunConfig::vocab)},
      {"gazetteers",
       {[](RunConfig& c, std::string_view, std::string_view v) { c.gazetteers = parse_paths(v); },
        [](const RunConfig& c) {
          std::string out;
          for (const auto& p : c.gazetteers) out += (out.empty() ? "" : ",") + p.string();
          return out;
        }}},
      {"train", path_field(&RunConfig::train_path)},
      {"dev", path_field(&RunConfig::dev_path)},
      {"test", path_field(&RunConfig::test_path)},
      {"checkpoint", path_field(&RunConfig::checkpoint)},
      {"loss_csv", path_field(&RunConfig::loss_csv)},
      {"reference_split", string_field(&RunConfig::reference_split)},

      {"layers", encoder_size(&EncoderConfig::layers)},
      {"hidden", encoder_size(&EncoderConfig::hidden)},
      {"heads", encoder_size(&EncoderConfig::heads)},
      {"vocab_size", encoder_size(&EncoderConfig::vocab_size)},
      {"max_len", encoder_size(&EncoderConfig::max_len)},
      {"bert_compat",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          c.model.encoder.bert_compat = parse_bool(k, v);
        },
        [](const RunConfig& c) { return std::string(c.model.encoder.bert_compat ? "true" : "false"); }}},
      {"init",
       {[](RunConfig& c, std::string_view, std::string_view v) {
          c.model.init.scheme = parse_init_scheme(v);
        },
        [](const RunConfig& c) { return std::string(to_string(c.model.init.scheme)); }}},
      {"init_std",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          c.model.init.std = parse_number<double>(k, v);
        },
        [](const RunConfig& c) { return fmt_double(c.model.init.std); }}},
      {"precision",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          if (v == "32") {
            c.model.precision = Precision::kFloat32;
          } else if (v == "64") {
            c.model.precision = Precision::kFloat64;
          } else {
            throw ConfigError(fmt::format("{}: expected 32 or 64, got '{}'", k, v));
          }
        },
        [](const RunConfig& c) {
          return std::string(c.model.precision == Precision::kFloat32 ? "32" : "64");
        }}},

      {"head",
       {[](RunConfig& c, std::string_view, std::string_view v) {
          c.model.head.kind = parse_head_kind(v);
        },
        [](const RunConfig& c) { return std::string(to_string(c.model.head.kind)); }}},
      {"head_hidden", head_size(&HeadConfig::hidden)},
      {"cnn_filters", head_size(&HeadConfig::cnn_filters)},
      {"cnn_window", head_size(&HeadConfig::cnn_window)},
      {"rnn_layers", head_size(&HeadConfig::rnn_layers)},

      {"learning_rate", double_field(&RunConfig::train, &TrainConfig::learning_rate)},
      {"epochs", size_field(&RunConfig::train, &TrainConfig::epochs)},
      {"batch_size", size_field(&RunConfig::train, &TrainConfig::batch_size)},
      {"warmup_fraction", double_field(&RunConfig::train, &TrainConfig::warmup_fraction)},
      {"weight_decay", double_field(&RunConfig::train, &TrainConfig::weight_decay)},
      {"adam_beta1", double_field(&RunConfig::train, &TrainConfig::beta1)},
      {"adam_beta2", double_field(&RunConfig::train, &TrainConfig::beta2)},
      {"adam_epsilon", double_field(&RunConfig::train, &TrainConfig::epsilon)},
      {"clip_norm", double_field(&RunConfig::train, &TrainConfig::clip_norm)},
      {"dropout",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          const double rate = parse_number<double>(k, v);
          c.model.encoder.dropout = rate;
          c.model.head.dropout = rate;
        },
        [](const RunConfig& c) { return fmt_double(c.model.encoder.dropout); }}},
      {"seed",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          c.train.seed = parse_number<std::uint64_t>(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.train.seed); }}},

      {"eat_url", string_field(&RunConfig::eat_url)},
      {"ner_url", string_field(&RunConfig::ner_url)},
      {"http_timeout_ms",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          c.http_timeout_ms = parse_number<int>(k, v);
          if (c.http_timeout_ms <= 0) throw ConfigError("http_timeout_ms must be positive");
        },
        [](const RunConfig& c) { return std::to_string(c.http_timeout_ms); }}},
      {"include_empty_as_zero",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          c.include_empty_as_zero = parse_bool(k, v);
        },
        [](const RunConfig& c) { return std::string(c.include_empty_as_zero ? "true" : "false"); }}},
  };
  return kFields;
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  const auto& table = fields();
  auto it = table.find(key);
  if (it == table.end()) throw ConfigError(fmt::format("unknown configuration key '{}'", key));
  it->second.set(*this, key, value);
}

void RunConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(fmt::format("override '{}' is not key=value", assignment));
  }
  const auto key = trim(assignment.substr(0, eq));
  if (key.empty()) throw ConfigError(fmt::format("override '{}' has no key", assignment));
  set(key, trim(assignment.substr(eq + 1)));
}

void RunConfig::apply_environment() {
  if (const char* seed = std::getenv("BAS_SEED"); seed && *seed) set("seed", trim(seed));
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& [key, field] : fields()) out += fmt::format("{} = {}\n", key, field.get(*this));
  return out;
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> kKeys = [] {
    std::vector<std::string> k;
    for (const auto& entry : fields()) k.push_back(entry.first);
    return k;
  }();
  return kKeys;
}

RunConfig parse_config(std::istream& in, std::string_view source) {
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError(fmt::format("{}: expected 'key = value'", source), lineno);
    }
    const auto key = trim(view.substr(0, eq));
    if (key.empty()) throw FormatError(fmt::format("{}: missing key", source), lineno);
    try {
      cfg.set(key, trim(view.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{} line {}: {}", source, lineno, e.what()));
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file " + path.string());
  RunConfig cfg = parse_config(in, path.string());
  const auto base = path.parent_path();
  const auto rebase = [&](std::filesystem::path& p) {
    if (!p.empty() && p.is_relative()) p = base / p;
  };
  for (auto* p : {&cfg.vocab, &cfg.train_path, &cfg.dev_path, &cfg.test_path, &cfg.checkpoint,
                  &cfg.loss_csv}) {
    rebase(*p);
  }
  for (auto& p : cfg.gazetteers) rebase(p);
  return cfg;
}

}  // namespace anssel

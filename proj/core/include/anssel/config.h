// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

// Run configuration: flat "key = value" text with '#' comments. Every key
// has a default, so an empty file is a valid configuration.

#ifndef ANSSEL_CONFIG_H_
#define ANSSEL_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "anssel/model.h"
#include "anssel/training.h"

namespace anssel {

struct RunConfig {
  std::filesystem::path vocab;
  std::vector<std::filesystem::path> gazetteers;
  std::filesystem::path train_path;
  std::filesystem::path dev_path;
  std::filesystem::path test_path;
  std::filesystem::path checkpoint;
  std::filesystem::path loss_csv;
  std::string reference_split;  // e.g. "wikiqa/train"; empty skips the check

  ModelConfig model;
  TrainConfig train;

  std::string eat_url;
  std::string ner_url;
  int http_timeout_ms = 2000;
  bool include_empty_as_zero = false;

  // Assigns one key. Throws ConfigError for an unknown key or a bad value.
  void set(std::string_view key, std::string_view value);
  // Applies "key=value".
  void apply_override(std::string_view assignment);
  // BAS_SEED, when present, replaces the seed.
  void apply_environment();

  std::uint64_t seed() const { return train.seed; }
  double dropout() const { return model.encoder.dropout; }

  // Canonical text form; parse(to_text()) reproduces the configuration.
  std::string to_text() const;

  static const std::vector<std::string>& keys();
};

// Throws FormatError (with the line) on syntax errors and ConfigError on bad
// keys or values.
RunConfig parse_config(std::istream& in, std::string_view source = "<config>");
// Relative paths in the file are taken relative to the file's directory.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace anssel

#endif  // ANSSEL_CONFIG_H_

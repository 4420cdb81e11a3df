// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ANSSEL_TOOLS_COMMANDS_H_
#define ANSSEL_TOOLS_COMMANDS_H_

#include <string>
#include <vector>

#include "anssel/config.h"

namespace anssel::cli {

// Options every subcommand accepts.
struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
};

// Config file, then BAS_SEED, then --set overrides.
RunConfig resolve_config(const CommonOptions& common);

struct PreprocessOptions {
  std::string input;
  std::string output = "-";
};

struct TrainOptions {
  std::string data;
  std::string checkpoint;
  std::string loss_csv;
};

struct EvaluateOptions {
  std::string checkpoint;
  std::string data;
  std::string format = "json";
  std::string output = "-";
  bool include_empty_as_zero = false;
};

struct RankOptions {
  std::string checkpoint;
  std::string question;
  std::vector<std::string> candidates;
  std::string candidates_file;
};

struct GradCheckOptions {
  std::string head = "all";
  double tolerance = 1e-4;
  bool bert_compat = false;
};

int run_preprocess(const RunConfig& cfg, const PreprocessOptions& opt);
int run_train(const RunConfig& cfg, const TrainOptions& opt);
int run_evaluate(const RunConfig& cfg, const EvaluateOptions& opt);
int run_rank(const RunConfig& cfg, const RankOptions& opt);
int run_grad_check(const RunConfig& cfg, const GradCheckOptions& opt);

}  // namespace anssel::cli

#endif  // ANSSEL_TOOLS_COMMANDS_H_

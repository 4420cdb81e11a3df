// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

// anssel command-line entry point.

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <exception>
#include <functional>
#include <nlohmann/json.hpp>
#include <string>

#include "anssel/error.h"
#include "commands.h"

namespace {

using anssel::cli::CommonOptions;

const char* error_kind(const anssel::Error& e) {
  if (dynamic_cast<const anssel::NumericError*>(&e)) return "numeric";
  if (dynamic_cast<const anssel::ConfigError*>(&e)) return "config";
  if (dynamic_cast<const anssel::FormatError*>(&e)) return "format";
  if (dynamic_cast<const anssel::SerializationError*>(&e)) return "checkpoint";
  if (dynamic_cast<const anssel::ShapeError*>(&e)) return "shape";
  return "data";
}

// One JSON object per line on stderr, so scripts can parse failures.
int report(int code, std::string_view kind, std::string_view message) {
  nlohmann::json j = {{"error", kind}, {"exit", code}, {"message", message}};
  fmt::print(stderr, "{}\n", j.dump());
  return code;
}

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--config", common.config_path, "key = value configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", common.overrides, "override a configuration key (key=value)")
      ->take_all();
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("anssel"));
  spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");

  CLI::App app{"Answer selection with a transformer encoder and pluggable heads"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "anssel 0.1.0");
  bool quiet = false;
  bool verbose = false;
  app.add_flag("-q,--quiet", quiet, "only log warnings and errors");
  app.add_flag("-v,--verbose", verbose, "debug logging");

  CommonOptions common;
  std::function<int(const anssel::RunConfig&)> action;

  anssel::cli::PreprocessOptions pre;
  auto* pre_cmd = app.add_subcommand("preprocess", "highlight answer entities in a TSV dataset");
  add_common(pre_cmd, common);
  pre_cmd->add_option("-i,--input", pre.input, "dataset TSV (defaults to 'train')");
  pre_cmd->add_option("-o,--output", pre.output, "output TSV, '-' for stdout");
  pre_cmd->callback([&] { action = [&](const auto& c) { return run_preprocess(c, pre); }; });

  anssel::cli::TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train", "fine-tune a model and write a checkpoint");
  add_common(train_cmd, common);
  train_cmd->add_option("-d,--data", tr.data, "training TSV (defaults to 'train')");
  train_cmd->add_option("-c,--checkpoint", tr.checkpoint, "output checkpoint");
  train_cmd->add_option("--loss-csv", tr.loss_csv, "per-batch loss trace");
  train_cmd->callback([&] { action = [&](const auto& c) { return run_train(c, tr); }; });

  anssel::cli::EvaluateOptions ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "report MAP and MRR on a dataset");
  add_common(eval_cmd, common);
  eval_cmd->add_option("-c,--checkpoint", ev.checkpoint, "model checkpoint");
  eval_cmd->add_option("-d,--data", ev.data, "evaluation TSV (defaults to 'test')");
  eval_cmd->add_option("-f,--format", ev.format, "json or table")
      ->check(CLI::IsMember({"json", "table"}));
  eval_cmd->add_option("-o,--output", ev.output, "report path, '-' for stdout");
  eval_cmd->add_flag("--include-empty-as-zero", ev.include_empty_as_zero,
                     "count questions without a correct answer as 0");
  eval_cmd->callback([&] { action = [&](const auto& c) { return run_evaluate(c, ev); }; });

  anssel::cli::RankOptions rk;
  auto* rank_cmd = app.add_subcommand("rank", "score and sort candidate answers for a question");
  add_common(rank_cmd, common);
  rank_cmd->add_option("-c,--checkpoint", rk.checkpoint, "model checkpoint");
  rank_cmd->add_option("--question", rk.question, "question text")->required();
  rank_cmd->add_option("--candidate", rk.candidates, "candidate answer (repeatable)");
  rank_cmd->add_option("--candidates-file", rk.candidates_file, "one candidate per line")
      ->check(CLI::ExistingFile);
  rank_cmd->callback([&] { action = [&](const auto& c) { return run_rank(c, rk); }; });

  anssel::cli::GradCheckOptions gc;
  auto* gc_cmd = app.add_subcommand("grad-check", "finite-difference check on a toy model");
  add_common(gc_cmd, common);
  gc_cmd->add_option("--head", gc.head, "baseline, bow, cnn, rnn or all")
      ->check(CLI::IsMember({"all", "baseline", "bow", "cnn", "rnn"}));
  gc_cmd->add_option("--tolerance", gc.tolerance, "maximum relative error");
  gc_cmd->add_flag("--bert-compat", gc.bert_compat, "check the residual/LayerNorm variant");
  gc_cmd->callback([&] { action = [&](const auto& c) { return run_grad_check(c, gc); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(1, "usage", e.what());
  }

  if (quiet) spdlog::set_level(spdlog::level::warn);
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    const anssel::RunConfig cfg = anssel::cli::resolve_config(common);
    return action(cfg);
  } catch (const anssel::Error& e) {
    return report(static_cast<int>(anssel::exit_code(e)), error_kind(e), e.what());
  } catch (const std::bad_alloc&) {
    return report(2, "data", "out of memory");
  } catch (const std::exception& e) {
    return report(2, "data", e.what());
  }
}

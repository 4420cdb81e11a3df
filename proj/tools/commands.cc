// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.h"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include "anssel/checkpoint.h"
#include "anssel/dataset.h"
#include "anssel/diagnostics.h"
#include "anssel/error.h"
#include "anssel/metrics.h"
#include "anssel/model.h"
#include "anssel/preprocess.h"
#include "anssel/tokenizer.h"
#include "anssel/training.h"

namespace anssel::cli {

namespace {

// Writes to stdout for "-" or an empty path, otherwise to the file.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path);
    if (!file_) throw DataError("cannot open " + path + " for writing");
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::filesystem::path require_path(const std::string& flag, const std::filesystem::path& fallback,
                                   const char* key) {
  if (!flag.empty()) return flag;
  if (!fallback.empty()) return fallback;
  throw ConfigError(fmt::format("missing input: pass a flag or set '{}'", key));
}

Preprocessor make_preprocessor(const RunConfig& cfg) {
  Gazetteer gazetteer;
  for (const auto& path : cfg.gazetteers) gazetteer.merge(Gazetteer::load(path));
  std::shared_ptr<const EatClassifier> classifier = std::make_shared<RuleEatClassifier>();
  std::shared_ptr<const EntityTagger> tagger =
      std::make_shared<GazetteerTagger>(std::move(gazetteer));
  const std::chrono::milliseconds timeout(cfg.http_timeout_ms);
  if (!cfg.eat_url.empty()) {
    classifier = std::make_shared<HttpEatClassifier>(cfg.eat_url, timeout, classifier);
  }
  if (!cfg.ner_url.empty()) {
    tagger = std::make_shared<HttpEntityTagger>(cfg.ner_url, timeout, tagger);
  }
  return Preprocessor(std::move(classifier), std::move(tagger));
}

Vocabulary load_vocab(const RunConfig& cfg) {
  if (cfg.vocab.empty()) throw ConfigError("missing input: set 'vocab'");
  return Vocabulary::load(cfg.vocab);
}

Model load_model(const std::string& flag, const RunConfig& cfg) {
  const auto path = require_path(flag, cfg.checkpoint, "checkpoint");
  Model model = load_checkpoint(path);
  spdlog::info("loaded {} ({} head, {} layers)", path.string(),
               to_string(model.config().head.kind), model.config().encoder.layers);
  return model;
}

}  // namespace

RunConfig resolve_config(const CommonOptions& common) {
  RunConfig cfg = common.config_path.empty() ? RunConfig{} : load_config(common.config_path);
  cfg.apply_environment();
  for (const auto& assignment : common.overrides) cfg.apply_override(assignment);
  return cfg;
}

int run_preprocess(const RunConfig& cfg, const PreprocessOptions& opt) {
  const QADataset data = load_dataset(require_path(opt.input, cfg.train_path, "train"));
  const Preprocessor preprocessor = make_preprocessor(cfg);
  QADataset out = data;
  std::size_t highlighted = 0;
  for (QAQuestion& q : out.questions) {
    for (QAInstance& c : q.candidates) {
      const PreprocessedPair pp = preprocessor(c.question, c.answer);
      if (pp.answer != c.answer) ++highlighted;
      c.question = pp.question;
      c.answer = pp.answer;
    }
    if (!q.candidates.empty()) q.question = q.candidates.front().question;
  }
  Output sink(opt.output);
  write_dataset(sink.stream(), out);
  spdlog::info("highlighted {} of {} answers", highlighted, out.pair_count());
  return 0;
}

int run_train(const RunConfig& cfg_in, const TrainOptions& opt) {
  RunConfig cfg = cfg_in;
  const auto data_path = require_path(opt.data, cfg.train_path, "train");
  const auto ckpt_path = require_path(opt.checkpoint, cfg.checkpoint, "checkpoint");
  const QADataset data = load_dataset(data_path);
  if (!cfg.reference_split.empty()) check_reference_stats(data, cfg.reference_split);

  const Vocabulary vocab = load_vocab(cfg);
  cfg.model.encoder.vocab_size = vocab.size();
  const Preprocessor preprocessor = make_preprocessor(cfg);
  const auto examples =
      prepare_examples(data, vocab, preprocessor, cfg.model.encoder.max_len);

  Model model(cfg.model, cfg.seed());
  spdlog::info("training {} head on {} pairs from {} questions, {} parameters",
               to_string(cfg.model.head.kind), examples.size(), data.question_count(),
               model.parameters().count_scalars());
  const auto start = std::chrono::steady_clock::now();
  anssel::TrainOptions options;
  options.on_epoch = [](std::size_t epoch, const TrainResult& r) {
    spdlog::info("epoch {} done, last batch loss {:.6f}", epoch, r.trace.back().loss);
  };
  const TrainResult result = train(examples, model, cfg.train, options);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  save_checkpoint(model, ckpt_path);
  const auto loss_path = opt.loss_csv.empty() ? cfg.loss_csv : std::filesystem::path(opt.loss_csv);
  if (!loss_path.empty()) {
    std::ofstream csv(loss_path);
    if (!csv) throw DataError("cannot open " + loss_path.string() + " for writing");
    write_loss_csv(csv, result.trace);
  }
  fmt::print(
      "{{\"steps\":{},\"final_loss\":{:.6f},\"train_accuracy\":{:.6f},\"seconds\":{:.2f},"
      "\"checkpoint\":\"{}\"}}\n",
      result.steps, result.trace.empty() ? 0.0 : result.trace.back().loss,
      accuracy(model, examples), seconds, ckpt_path.string());
  return 0;
}

int run_evaluate(const RunConfig& cfg, const EvaluateOptions& opt) {
  if (opt.format != "json" && opt.format != "table") {
    throw ConfigError("--format must be json or table");
  }
  const Model model = load_model(opt.checkpoint, cfg);
  const QADataset data = load_dataset(require_path(opt.data, cfg.test_path, "test"));
  if (!cfg.reference_split.empty()) check_reference_stats(data, cfg.reference_split);
  const Vocabulary vocab = load_vocab(cfg);
  const Preprocessor preprocessor = make_preprocessor(cfg);
  const Scorer scorer(model, vocab, preprocessor);
  MetricsOptions options;
  options.include_empty_as_zero = opt.include_empty_as_zero || cfg.include_empty_as_zero;
  const MetricsReport report = evaluate_map_mrr(scorer, data, options);
  Output sink(opt.output);
  if (opt.format == "json") {
    sink.stream() << report.to_json() << '\n';
  } else {
    sink.stream() << report.to_table(std::string(to_string(model.config().head.kind)));
  }
  return 0;
}

int run_rank(const RunConfig& cfg, const RankOptions& opt) {
  std::vector<std::string> candidates = opt.candidates;
  if (!opt.candidates_file.empty()) {
    std::ifstream in(opt.candidates_file);
    if (!in) throw DataError("cannot open " + opt.candidates_file);
    for (std::string line; std::getline(in, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) candidates.push_back(line);
    }
  }
  if (candidates.empty()) throw ConfigError("rank needs at least one candidate");
  const Model model = load_model(opt.checkpoint, cfg);
  const Vocabulary vocab = load_vocab(cfg);
  const Preprocessor preprocessor = make_preprocessor(cfg);
  const Scorer scorer(model, vocab, preprocessor);

  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& c : candidates) scores.push_back(scorer.score_pair(opt.question, c));
  const RankedList ranked = rank_candidates(scores, std::vector<int>(scores.size(), 0));
  std::size_t rank = 0;
  for (const RankedCandidate& rc : ranked.candidates) {
    fmt::print("{}\t{:.6f}\t{}\n", ++rank, rc.score, candidates[rc.index]);
  }
  return 0;
}

int run_grad_check(const RunConfig& cfg, const GradCheckOptions& opt) {
  std::vector<HeadKind> kinds;
  if (opt.head == "all") {
    kinds = {HeadKind::kBaseline, HeadKind::kBow, HeadKind::kCnn, HeadKind::kRnn};
  } else {
    kinds = {parse_head_kind(opt.head)};
  }
  double worst = 0.0;
  for (HeadKind kind : kinds) {
    ModelGradCheckOptions options;
    options.kind = kind;
    options.bert_compat = opt.bert_compat;
    options.seed = cfg.seed();
    const ModelGradCheckReport report = model_grad_check(options);
    const bool ok = report.result.max_relative_error <= opt.tolerance;
    fmt::print("{}\t{}\tmax_rel_err={:.3e}\tcoords={}\tworst={}\t{:.2f}s\n", ok ? "PASS" : "FAIL",
               to_string(kind), report.result.max_relative_error, report.result.coordinates,
               report.worst_parameter, report.seconds);
    worst = std::max(worst, report.result.max_relative_error);
  }
  if (worst > opt.tolerance) {
    throw NumericError(fmt::format("gradient check max relative error {:.3e} exceeds {:.1e}",
                                   worst, opt.tolerance));
  }
  return 0;
}

}  // namespace anssel::cli

// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/training.h"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "anssel/error.h"

namespace anssel {

void TrainConfig::validate() const {
  if (learning_rate < 0.0) throw ConfigError("learning rate must be non-negative");
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (warmup_fraction < 0.0 || warmup_fraction >= 1.0) {
    throw ConfigError("warmup fraction must be in [0, 1)");
  }
  if (weight_decay < 0.0) throw ConfigError("weight decay must be non-negative");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
    throw ConfigError("Adam betas must be in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
  if (clip_norm < 0.0) throw ConfigError("clip_norm must be non-negative");
}

double lr_multiplier(std::size_t step, std::size_t total_steps, double warmup_fraction) {
  if (total_steps == 0) throw ConfigError("schedule needs at least one step");
  if (step > total_steps) {
    throw ConfigError(fmt::format("step {} beyond the schedule of {}", step, total_steps));
  }
  const auto w = static_cast<std::size_t>(std::llround(warmup_fraction * total_steps));
  if (step < w) return static_cast<double>(step) / static_cast<double>(w);
  if (total_steps == w) return 0.0;
  return static_cast<double>(total_steps - step) / static_cast<double>(total_steps - w);
}

void adamw_update(std::span<double> theta, std::span<const double> grad, std::span<double> m,
                  std::span<double> v, std::size_t t, double lr, const TrainConfig& cfg,
                  bool decay) {
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  const double wd = decay ? cfg.weight_decay : 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double g = grad[i];
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    theta[i] -= lr * (m_hat / (std::sqrt(v_hat) + cfg.epsilon) + wd * theta[i]);
  }
}

void adamw_step(ParameterStore& store, OptimizerState& state, const TrainConfig& cfg,
                double lr_mult) {
  const auto& params = store.all();
  if (state.moments.empty()) {
    state.moments.reserve(params.size());
    for (const Parameter& p : params) {
      state.moments.push_back({Tensor(p.var.shape()), Tensor(p.var.shape())});
    }
  }
  if (state.moments.size() != params.size()) {
    throw ShapeError("optimizer state does not match the parameter set");
  }

  std::vector<Tensor> grads;
  grads.reserve(params.size());
  double norm_sq = 0.0;
  for (const Parameter& p : params) {
    grads.push_back(p.trainable ? p.var.grad() : Tensor(p.var.shape()));
    if (!grads.back().all_finite()) {
      throw NumericError("non-finite gradient for parameter " + p.name);
    }
    for (double g : grads.back().data()) norm_sq += g * g;
  }
  if (cfg.clip_norm > 0.0) {
    const double norm = std::sqrt(norm_sq);
    if (norm > cfg.clip_norm) {
      const double s = cfg.clip_norm / norm;
      for (Tensor& g : grads) {
        for (double& x : g.data()) x *= s;
      }
    }
  }

  ++state.step;
  const double lr = cfg.learning_rate * lr_mult;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Parameter& p = params[i];
    if (!p.trainable) continue;
    AdamMoments& mom = state.moments[i];
    if (mom.m.shape() != p.var.shape()) {
      throw ShapeError("optimizer moments for " + p.name + " have shape " +
                       shape_str(mom.m.shape()));
    }
    Var var = p.var;
    adamw_update(var.mutable_value().data(), grads[i].data(), mom.m.data(), mom.v.data(),
                 state.step, lr, cfg, p.role == ParamRole::kMatrix);
  }
}

std::vector<TrainingExample> prepare_examples(const QADataset& data, const Vocabulary& vocab,
                                              const Preprocessor& preprocessor,
                                              std::size_t max_len) {
  std::vector<TrainingExample> out;
  out.reserve(data.pair_count());
  for (const QAQuestion& q : data.questions) {
    for (const QAInstance& c : q.candidates) {
      const PreprocessedPair pp = preprocessor(c.question, c.answer);
      out.push_back({encode_text_pair(pp.question, pp.answer, vocab, max_len), c.label});
    }
  }
  return out;
}

double mean_loss(const Model& model, std::span<const TrainingExample> examples) {
  if (examples.empty()) throw DataError("no examples to score");
  double total = 0.0;
  for (const TrainingExample& ex : examples) {
    total += cross_entropy(model.forward(ex.encoding, ForwardContext{}).value(), ex.label);
  }
  return total / static_cast<double>(examples.size());
}

double accuracy(const Model& model, std::span<const TrainingExample> examples) {
  if (examples.empty()) throw DataError("no examples to score");
  std::size_t hits = 0;
  for (const TrainingExample& ex : examples) {
    const int predicted = model.score(ex.encoding) > 0.5 ? 1 : 0;
    if (predicted == ex.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(examples.size());
}

TrainResult train(std::span<const TrainingExample> examples, Model& model, const TrainConfig& cfg,
                  const TrainOptions& options) {
  cfg.validate();
  if (examples.empty()) throw DataError("training set is empty");

  const std::size_t n = examples.size();
  const std::size_t batches = (n + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t total_steps = batches * cfg.epochs;
  Rng rng(cfg.seed);
  const ForwardContext ctx{true, &rng};
  OptimizerState state;
  TrainResult result;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  ParameterStore& store = model.parameters();

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t begin = b * cfg.batch_size;
      const std::size_t end = std::min(n, begin + cfg.batch_size);
      std::vector<Var> losses;
      losses.reserve(end - begin);
      for (std::size_t i = begin; i < end; ++i) {
        const TrainingExample& ex = examples[order[i]];
        losses.push_back(ad::cross_entropy(model.forward(ex.encoding, ctx), ex.label));
      }
      const Var loss = ad::mean(losses);
      const double value = loss.value()[0];
      if (!std::isfinite(value)) {
        throw NumericError(fmt::format("non-finite loss in epoch {} batch {}", epoch, b + 1));
      }
      store.zero_grad();
      loss.backward();
      const double mult =
          cfg.use_schedule ? lr_multiplier(state.step, total_steps, cfg.warmup_fraction) : 1.0;
      adamw_step(store, state, cfg, mult);
      store.zero_grad();
      store.apply_precision(model.config().precision);
      result.trace.push_back({epoch, b + 1, value});
    }
    if (options.track_epoch_loss) result.epoch_loss.push_back(mean_loss(model, examples));
    spdlog::debug("epoch {}: last batch loss {:.6g}", epoch, result.trace.back().loss);
    if (options.on_epoch) options.on_epoch(epoch, result);
  }
  result.steps = state.step;
  return result;
}

void write_loss_csv(std::ostream& out, std::span<const LossRecord> trace) {
  out << "epoch,batch,loss\n";
  for (const LossRecord& r : trace) out << fmt::format("{},{},{:.17g}\n", r.epoch, r.batch, r.loss);
}

}  // namespace anssel

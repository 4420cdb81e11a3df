// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

// Pointwise cross-entropy training with AdamW and a warmup-linear schedule.

#ifndef ANSSEL_TRAINING_H_
#define ANSSEL_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "anssel/dataset.h"
#include "anssel/model.h"

namespace anssel {

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t epochs = 4;
  std::size_t batch_size = 32;
  double warmup_fraction = 0.1;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 0.0;  // 0 disables clipping
  bool use_schedule = true;
  std::uint64_t seed = 42;

  void validate() const;
};

// Linear ramp 0 -> 1 over the first round(warmup_fraction * total) steps,
// then linear decay to 0 at total_steps. Throws ConfigError when
// total_steps is 0 or step exceeds it.
double lr_multiplier(std::size_t step, std::size_t total_steps, double warmup_fraction);

struct AdamMoments {
  Tensor m;
  Tensor v;
};

struct OptimizerState {
  std::vector<AdamMoments> moments;  // parallel to ParameterStore::all()
  std::size_t step = 0;
};

// One decoupled-weight-decay Adam update of a flat block at time step `t`
// (1-based). Decay is skipped when `decay` is false.
void adamw_update(std::span<double> theta, std::span<const double> grad, std::span<double> m,
                  std::span<double> v, std::size_t t, double lr, const TrainConfig& cfg,
                  bool decay);

// Applies accumulated gradients to every trainable parameter. Weight decay
// touches matrices only. Throws NumericError naming a parameter whose
// gradient is not finite.
void adamw_step(ParameterStore& store, OptimizerState& state, const TrainConfig& cfg,
                double lr_mult);

struct TrainingExample {
  PairEncoding encoding;
  int label = 0;
};

std::vector<TrainingExample> prepare_examples(const QADataset& data, const Vocabulary& vocab,
                                              const Preprocessor& preprocessor,
                                              std::size_t max_len);

struct LossRecord {
  std::size_t epoch = 0;  // 1-based
  std::size_t batch = 0;  // 1-based within the epoch
  double loss = 0.0;
};

struct TrainResult {
  std::vector<LossRecord> trace;
  std::vector<double> epoch_loss;  // full-set loss with dropout off, after each epoch
  std::size_t steps = 0;
};

struct TrainOptions {
  bool track_epoch_loss = false;
  std::function<void(std::size_t epoch, const TrainResult&)> on_epoch;
};

// Throws DataError on an empty example set and NumericError with the batch
// index when a loss is not finite.
TrainResult train(std::span<const TrainingExample> examples, Model& model, const TrainConfig& cfg,
                  const TrainOptions& options = {});

// Mean cross-entropy over the examples, dropout off.
double mean_loss(const Model& model, std::span<const TrainingExample> examples);
// Fraction of examples whose predicted label (class 0 above 0.5) matches.
double accuracy(const Model& model, std::span<const TrainingExample> examples);

// "epoch,batch,loss" header and one row per record.
void write_loss_csv(std::ostream& out, std::span<const LossRecord> trace);

}  // namespace anssel

#endif  // ANSSEL_TRAINING_H_

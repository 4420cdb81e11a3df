// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ANSSEL_PARAMETER_H_
#define ANSSEL_PARAMETER_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "anssel/autograd.h"
#include "anssel/tensor.h"

namespace anssel {

// What a parameter is, used for weight decay and for the bias-free counts.
enum class ParamRole { kMatrix, kBias, kEmbedding, kNorm };

struct Parameter {
  std::string name;  // e.g. "encoder.layer0.wq.head1"
  Var var;
  ParamRole role = ParamRole::kMatrix;
  bool trainable = true;
};

// Ordered collection of named parameters. Registration order is the
// iteration order everywhere (optimizer, checkpoint).
class ParameterStore {
 public:
  // Throws ConfigError on a duplicate name.
  Var add(std::string name, Tensor init, ParamRole role, bool trainable = true);

  const Parameter* find(std::string_view name) const;
  const Parameter& at(std::string_view name) const;

  const std::vector<Parameter>& all() const { return params_; }
  std::size_t size() const { return params_.size(); }

  std::vector<Var> trainable_vars() const;
  std::size_t count_scalars(bool include_biases = true) const;

  void zero_grad();
  // Rounds every value to float when precision is kFloat32.
  void apply_precision(Precision precision);

 private:
  std::vector<Parameter> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Fills `t` from N(0, std²) resampling anything outside ±2·std.
void init_truncated_normal(Tensor& t, double std, Rng& rng);

// kNormal draws every matrix with `std`; kFanIn uses 1/sqrt(fan_in) for
// matrices so activations keep their scale through stacked linear maps.
// Embedding tables always use `std`; biases start at zero.
enum class InitScheme { kNormal, kFanIn };

std::string_view to_string(InitScheme scheme);
// "normal" or "fan_in"; ConfigError otherwise.
InitScheme parse_init_scheme(std::string_view name);

struct WeightInit {
  InitScheme scheme = InitScheme::kFanIn;
  double std = 0.02;

  double matrix_std(std::size_t fan_in) const;
  Tensor matrix(Shape shape, std::size_t fan_in, Rng& rng) const;
  Tensor embedding(Shape shape, Rng& rng) const;
};

}  // namespace anssel

#endif  // ANSSEL_PARAMETER_H_

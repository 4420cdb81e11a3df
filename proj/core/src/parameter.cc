// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/parameter.h"

#include <cmath>

#include "anssel/error.h"

namespace anssel {

Var ParameterStore::add(std::string name, Tensor init, ParamRole role, bool trainable) {
  if (index_.contains(name)) throw ConfigError("duplicate parameter name '" + name + "'");
  index_.emplace(name, params_.size());
  Var v(std::move(init), trainable);
  params_.push_back(Parameter{std::move(name), v, role, trainable});
  return v;
}

const Parameter* ParameterStore::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &params_[it->second];
}

const Parameter& ParameterStore::at(std::string_view name) const {
  const Parameter* p = find(name);
  if (!p) throw ConfigError("no parameter named '" + std::string(name) + "'");
  return *p;
}

std::vector<Var> ParameterStore::trainable_vars() const {
  std::vector<Var> out;
  for (const Parameter& p : params_)
    if (p.trainable) out.push_back(p.var);
  return out;
}

std::size_t ParameterStore::count_scalars(bool include_biases) const {
  std::size_t n = 0;
  for (const Parameter& p : params_) {
    if (!p.trainable) continue;
    if (!include_biases && p.role == ParamRole::kBias) continue;
    n += p.var.value().size();
  }
  return n;
}

void ParameterStore::zero_grad() {
  for (Parameter& p : params_) p.var.zero_grad();
}

void ParameterStore::apply_precision(Precision precision) {
  if (precision == Precision::kFloat64) return;
  for (Parameter& p : params_)
    for (double& v : p.var.mutable_value().data()) v = static_cast<float>(v);
}

void init_truncated_normal(Tensor& t, double std, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std);
  for (double& v : t.data()) {
    do {
      v = normal(rng);
    } while (std::abs(v) > 2.0 * std);
  }
}

std::string_view to_string(InitScheme scheme) {
  return scheme == InitScheme::kNormal ? "normal" : "fan_in";
}

InitScheme parse_init_scheme(std::string_view name) {
  if (name == "normal") return InitScheme::kNormal;
  if (name == "fan_in") return InitScheme::kFanIn;
  throw ConfigError("unknown init scheme '" + std::string(name) + "' (expected normal|fan_in)");
}

double WeightInit::matrix_std(std::size_t fan_in) const {
  if (scheme == InitScheme::kNormal) return std;
  return 1.0 / std::sqrt(static_cast<double>(fan_in));
}

Tensor WeightInit::matrix(Shape shape, std::size_t fan_in, Rng& rng) const {
  Tensor t(std::move(shape));
  init_truncated_normal(t, matrix_std(fan_in), rng);
  return t;
}

Tensor WeightInit::embedding(Shape shape, Rng& rng) const {
  Tensor t(std::move(shape));
  init_truncated_normal(t, std, rng);
  return t;
}

}  // namespace anssel

// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/grad_check.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "anssel/error.h"

namespace anssel {

namespace {

double eval(const std::function<Var()>& f) {
  const double v = f().value()[0];
  if (!std::isfinite(v)) throw NumericError("grad_check: objective is not finite");
  return v;
}

}  // namespace

GradCheckResult grad_check(const std::function<Var()>& f, std::span<Var> vars, double h,
                           double floor) {
  for (Var& v : vars) v.zero_grad();
  Var out = f();
  if (out.value().size() != 1) throw ShapeError("grad_check needs a scalar objective");
  if (!std::isfinite(out.value()[0])) throw NumericError("grad_check: objective is not finite");
  out.backward();

  std::vector<Tensor> analytic;
  analytic.reserve(vars.size());
  for (const Var& v : vars) analytic.push_back(v.grad());

  GradCheckResult result;
  for (std::size_t vi = 0; vi < vars.size(); ++vi) {
    Tensor& theta = vars[vi].mutable_value();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double saved = theta[i];
      theta[i] = saved + h;
      const double up = eval(f);
      theta[i] = saved - h;
      const double down = eval(f);
      theta[i] = saved;

      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[vi][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), floor});
      const double err = std::abs(a - numeric) / denom;
      ++result.coordinates;
      if (err > result.max_relative_error || result.coordinates == 1) {
        result.max_relative_error = err;
        result.worst_var = vi;
        result.worst_index = i;
        result.analytic = a;
        result.numeric = numeric;
      }
    }
  }
  for (Var& v : vars) v.zero_grad();
  return result;
}

}  // namespace anssel

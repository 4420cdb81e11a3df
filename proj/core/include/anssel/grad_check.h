// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ANSSEL_GRAD_CHECK_H_
#define ANSSEL_GRAD_CHECK_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "anssel/autograd.h"

namespace anssel {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t coordinates = 0;
  // Where the maximum was found.
  std::size_t worst_var = 0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

// Compares the reverse-mode gradient of `f` with central differences
// (f(θ+h) − f(θ−h)) / 2h on every coordinate of every Var in `vars`.
// `f` must rebuild its graph from the current values on each call and return
// a scalar. Relative error is |a − n| / max(|a|, |n|, floor). The floor
// keeps components below the resolution of the difference quotient (its
// roundoff is about 1e-16·|f|/h) from dominating the maximum.
// Gradients already accumulated on `vars` are cleared.
GradCheckResult grad_check(const std::function<Var()>& f, std::span<Var> vars,
                           double h = 1e-5, double floor = 1e-6);

}  // namespace anssel

#endif  // ANSSEL_GRAD_CHECK_H_

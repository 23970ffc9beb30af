// Copyright 2026 The ncgopt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "ncgopt/core/problem.hpp"

namespace ncgopt {

struct FiniteDifferenceReport {
  double max_grad_err = 0.0;  // max-norm of analytic minus central-difference gradient
  double max_hvp_err = 0.0;   // max-norm of analytic minus central-difference HVP
};

/// Compares the analytic gradient with central differences of the value, and
/// the analytic HVP along a random unit direction with central differences of
/// the gradient.
inline FiniteDifferenceReport finite_difference_check(const Problem& problem, const Vector& x,
                                                      double h, CounterRng& rng) {
  if (!(h > 0.0)) throw ConfigError("finite difference step must be positive");
  const Eigen::Index d = problem.dim();
  if (x.size() != d) throw ConfigError("point has wrong dimension");

  const Vector g = problem.gradient(x);
  require_finite(g, "gradient");
  Vector fd(d);
  Vector xp = x;
  for (Eigen::Index i = 0; i < d; ++i) {
    xp[i] = x[i] + h;
    const double fp = problem.value(xp);
    xp[i] = x[i] - h;
    const double fm = problem.value(xp);
    xp[i] = x[i];
    fd[i] = (fp - fm) / (2.0 * h);
  }
  require_finite(fd, "finite-difference gradient");

  const Vector v = rng.unit_vector(d);
  const Vector hv = problem.hvp(x, v);
  require_finite(hv, "Hessian-vector product");
  const Vector fd_hv = (problem.gradient(x + h * v) - problem.gradient(x - h * v)) / (2.0 * h);
  require_finite(fd_hv, "finite-difference HVP");

  return {(g - fd).cwiseAbs().maxCoeff(), (hv - fd_hv).cwiseAbs().maxCoeff()};
}

}  // namespace ncgopt

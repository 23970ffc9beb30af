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

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ncgopt/core/rng.hpp"
#include "ncgopt/eigensolver/dense.hpp"

namespace ncgopt {

/// Matrix-free symmetric operator v -> Hv.
using LinearOperator = std::function<Vector(const Vector&)>;

/// Approximate minimum-curvature direction of an operator H:
/// with high probability lambda_min(H) >= rayleigh - noise_level.
struct CurvatureEstimate {
  Point v;                   // unit vector
  double rayleigh = 0.0;     // v'Hv
  double noise_level = 0.0;  // target additive accuracy
  std::size_t hvp_spent = 0;
  std::size_t budget = 0;
  bool converged = false;    // Krylov breakdown or Ritz stagnation before the budget
  std::vector<double> ritz_history;  // running estimate of lambda_min per iteration
};

struct LanczosOptions {
  bool early_exit = true;
  double breakdown_tol = 1e-12;
  /// Receives the final Krylov basis when set.
  Matrix* basis_out = nullptr;
};

/// Number of operator applications that suffice for accuracy `eps` with
/// probability 1 - delta: min(d, ceil(log(d / delta^2) sqrt(l1) / (2 sqrt(2 eps)))).
inline std::size_t lanczos_budget(Eigen::Index d, double l1, double eps, double delta) {
  const double bound = std::log(static_cast<double>(d) / (delta * delta)) * std::sqrt(l1) /
                       (2.0 * std::sqrt(2.0 * eps));
  return std::max<std::size_t>(1, std::min(static_cast<std::size_t>(d), saturating_ceil(bound)));
}

/// Lanczos with full reorthogonalization applied to the shifted operator
/// l1 I - H from a uniformly random unit start. The top Ritz pair of the
/// shifted operator is mapped back to rayleigh = l1 - theta.
///
/// Stops at the budget, on breakdown (the Krylov space is invariant), or when
/// two consecutive top Ritz values differ by less than eps / 10.
inline CurvatureEstimate lanczos_min_eig(const LinearOperator& hvp, Eigen::Index d, double l1,
                                         double eps, double delta, CounterRng& rng,
                                         const LanczosOptions& opts = {}) {
  if (!(eps > 0.0)) throw ConfigError("Lanczos: eps must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("Lanczos: delta must lie in (0, 1)");
  if (!(l1 > 0.0)) throw ConfigError("Lanczos: l1 must be positive");
  if (d < 1) throw ConfigError("Lanczos: dimension must be positive");

  CurvatureEstimate est;
  est.noise_level = eps;
  est.budget = lanczos_budget(d, l1, eps, delta);

  Matrix q(d, static_cast<Eigen::Index>(est.budget));
  std::vector<double> alpha;
  std::vector<double> beta;
  q.col(0) = rng.unit_vector(d);

  Vector top_vec;  // eigenvector of T for the top Ritz value
  double theta = 0.0;
  Eigen::Index m = 0;  // basis size
  for (std::size_t k = 0; k < est.budget; ++k) {
    const Eigen::Index kk = static_cast<Eigen::Index>(k);
    const Vector hq = hvp(q.col(kk));
    ++est.hvp_spent;
    if (hq.size() != d || !hq.allFinite()) throw OracleError("Lanczos: non-finite operator output");
    Vector w = l1 * q.col(kk) - hq;
    const double a = q.col(kk).dot(w);
    alpha.push_back(a);
    m = kk + 1;
    // Full reorthogonalization, applied twice.
    for (int pass = 0; pass < 2; ++pass) {
      const auto basis = q.leftCols(m);
      w -= basis * (basis.transpose() * w);
    }
    const double b = w.norm();

    Vector diag = Eigen::Map<const Vector>(alpha.data(), m);
    Vector off = beta.empty() ? Vector() : Vector(Eigen::Map<const Vector>(beta.data(), m - 1));
    const SymmetricEigen te = tridiagonal_eigen(diag, off);
    const double prev = theta;
    theta = te.values[m - 1];
    top_vec = te.vectors.col(m - 1);
    est.ritz_history.push_back(l1 - theta);

    if (b < opts.breakdown_tol) {
      est.converged = true;
      break;
    }
    if (opts.early_exit && k > 0 && std::abs(theta - prev) < eps / 10.0) {
      est.converged = true;
      break;
    }
    if (k + 1 < est.budget) {
      beta.push_back(b);
      q.col(kk + 1) = w / b;
    }
  }

  Vector v = q.leftCols(m) * top_vec;
  v.normalize();
  est.v = std::move(v);
  est.rayleigh = l1 - theta;
  if (opts.basis_out) *opts.basis_out = q.leftCols(m);
  return est;
}

}  // namespace ncgopt

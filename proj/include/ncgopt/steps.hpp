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

// Single-update building blocks. Each step estimates a negative curvature
// direction to a prescribed noise level and then takes whichever of the
// curvature step and the gradient step promises the larger decrease.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string_view>

#include "ncgopt/core/problem.hpp"
#include "ncgopt/eigensolver/lanczos.hpp"

namespace ncgopt {

enum class StepKind { Curvature, Gradient };

inline std::string_view to_string(StepKind k) {
  return k == StepKind::Curvature ? "Curvature" : "Gradient";
}

struct StepResult {
  Point x_next;
  StepKind kind = StepKind::Gradient;
  CurvatureEstimate estimate;
  double rayleigh = 0.0;      // v'Hv from a dedicated HVP after Lanczos
  Vector grad_used;           // exact gradient, or the sub-sampled gradient for NCG-S
  double f_before = 0.0;
  double f_after = 0.0;
  double predicted_decrease = 0.0;
  double observed_decrease = 0.0;  // f_before - f_after
};

/// Surrogate Hessian H(x) at a fixed point: a matrix-free operator and a
/// bound on its spectral norm (used as the Lanczos shift).
struct HessianOperator {
  LinearOperator apply;
  double norm_bound = 1.0;
};

// Payoffs compared by the branch tests. Each is the decrease guaranteed by
// the corresponding update.

/// Curvature payoff of the exact-Hessian step, 2 [-v'Hv]_+^3 / (3 L2^2).
/// A nonnegative Rayleigh quotient yields no guaranteed decrease.
inline double ncg_curvature_payoff(double rayleigh, double l2) {
  const double c = std::max(0.0, -rayleigh);
  return 2.0 * c * c * c / (3.0 * l2 * l2);
}

inline double gradient_payoff(double grad_norm, double l1) {
  return grad_norm * grad_norm / (2.0 * l1);
}

/// -eps2^2 v'Hv / (2 L2^2) - 5 eps2^3 / (24 L2^2).
inline double ih_curvature_payoff(double rayleigh, double eps2, double l2) {
  return -eps2 * eps2 * rayleigh / (2.0 * l2 * l2) - 5.0 * eps2 * eps2 * eps2 / (24.0 * l2 * l2);
}

/// -eps2^2 v'Hv / (2 L2^2) - 11 eps2^3 / (48 L2^2).
inline double stochastic_curvature_payoff(double rayleigh, double eps2, double l2) {
  return -eps2 * eps2 * rayleigh / (2.0 * l2 * l2) - 11.0 * eps2 * eps2 * eps2 / (48.0 * l2 * l2);
}

/// ||g||^2 / (4 L1) - eps1^2 / (8 L1).
inline double stochastic_gradient_payoff(double grad_norm, double eps1, double l1) {
  return grad_norm * grad_norm / (4.0 * l1) - eps1 * eps1 / (8.0 * l1);
}

namespace detail {

inline void check_step_inputs(double eps_noise, double delta) {
  if (!(eps_noise > 0.0)) throw ConfigError("noise level must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
}

inline Point finish_point(Point x_next) {
  if (!x_next.allFinite()) throw DivergenceError("iterate is not finite");
  return x_next;
}

// Curvature direction for `op` plus the dedicated Rayleigh quotient.
inline std::pair<CurvatureEstimate, double> estimate_curvature(const HessianOperator& op,
                                                               Eigen::Index d, double eps_noise,
                                                               double delta, CounterRng& rng) {
  CurvatureEstimate est = lanczos_min_eig(op.apply, d, op.norm_bound, eps_noise, delta, rng);
  const Vector hv = op.apply(est.v);
  if (!hv.allFinite()) throw OracleError("non-finite Hessian-vector product");
  const double rayleigh = est.v.dot(hv);
  return {std::move(est), rayleigh};
}

}  // namespace detail

/// Exact Hessian at x as an operator, counted through the oracle.
inline HessianOperator exact_hessian(Oracle& oracle, const Point& x) {
  return {[&oracle, x](const Vector& v) { return oracle.hvp(x, v); }, oracle.params().l1};
}

/// NCG step given f(x) and grad f(x) already evaluated.
inline StepResult ncg_step(Oracle& oracle, const Point& x, double fx, const Vector& grad,
                           double eps_noise, double delta, CounterRng& rng) {
  detail::check_step_inputs(eps_noise, delta);
  const SmoothnessParams& p = oracle.params();
  StepResult r;
  auto [est, rq] = detail::estimate_curvature(exact_hessian(oracle, x), oracle.dim(), eps_noise,
                                              delta, rng);
  r.estimate = std::move(est);
  r.rayleigh = rq;
  r.grad_used = grad;
  r.f_before = fx;
  const double curv = ncg_curvature_payoff(rq, p.l2);
  const double grad_pay = gradient_payoff(grad.norm(), p.l1);
  if (curv > grad_pay) {
    r.kind = StepKind::Curvature;
    const double eta = 2.0 * std::abs(rq) / p.l2;
    r.x_next = detail::finish_point(x - eta * sign_of(r.estimate.v.dot(grad)) * r.estimate.v);
  } else {
    r.kind = StepKind::Gradient;
    r.x_next = detail::finish_point(x - grad / p.l1);
  }
  r.predicted_decrease = std::max(curv, grad_pay);
  r.f_after = oracle.value(r.x_next);
  r.observed_decrease = r.f_before - r.f_after;
  return r;
}

inline StepResult ncg_step(Oracle& oracle, const Point& x, double eps_noise, double delta,
                           CounterRng& rng) {
  const double fx = oracle.value(x);
  const Vector g = oracle.gradient(x);
  return ncg_step(oracle, x, fx, g, eps_noise, delta, rng);
}

/// Inexact-Hessian NCG step: curvature is read from `surrogate` and the
/// curvature step has fixed length eps2 / L2.
inline StepResult ih_ncg_step(Oracle& oracle, const HessianOperator& surrogate, const Point& x,
                              double fx, const Vector& grad, double eps_noise, double delta,
                              double eps2, CounterRng& rng) {
  detail::check_step_inputs(eps_noise, delta);
  if (!(eps2 > 0.0)) throw ConfigError("eps2 must be positive");
  const SmoothnessParams& p = oracle.params();
  StepResult r;
  auto [est, rq] = detail::estimate_curvature(surrogate, oracle.dim(), eps_noise, delta, rng);
  r.estimate = std::move(est);
  r.rayleigh = rq;
  r.grad_used = grad;
  r.f_before = fx;
  const double curv = ih_curvature_payoff(rq, eps2, p.l2);
  const double grad_pay = gradient_payoff(grad.norm(), p.l1);
  if (curv > grad_pay) {
    r.kind = StepKind::Curvature;
    r.x_next = detail::finish_point(x - (eps2 / p.l2) * sign_of(r.estimate.v.dot(grad)) * r.estimate.v);
  } else {
    r.kind = StepKind::Gradient;
    r.x_next = detail::finish_point(x - grad / p.l1);
  }
  r.predicted_decrease = std::max(curv, grad_pay);
  r.f_after = oracle.value(r.x_next);
  r.observed_decrease = r.f_before - r.f_after;
  return r;
}

inline StepResult ih_ncg_step(Oracle& oracle, const HessianOperator& surrogate, const Point& x,
                              double eps_noise, double delta, double eps2, CounterRng& rng) {
  const double fx = oracle.value(x);
  const Vector g = oracle.gradient(x);
  return ih_ncg_step(oracle, surrogate, x, fx, g, eps_noise, delta, eps2, rng);
}

/// Sub-sampled Hessian over `s2` as an operator; its norm is bounded by L1
/// because every component Hessian is.
inline HessianOperator sampled_hessian(Oracle& oracle, const SampleSet& s2, const Point& x) {
  if (s2.empty()) throw ConfigError("empty Hessian sample");
  return {[&oracle, &s2, x](const Vector& v) { return oracle.sampled_hvp(s2, x, v); },
          oracle.params().l1};
}

/// Stochastic NCG step with the sub-sampled gradient `g` (drawn by the
/// caller over s1) and the sub-sampled Hessian over `s2`. `fx` is the true
/// objective, used only for the decrease bookkeeping.
inline StepResult ncg_s_step(Oracle& oracle, const Point& x, double fx, const Vector& g,
                             const SampleSet& s2, double eps_noise, double delta, double eps1,
                             double eps2, CounterRng& rng) {
  detail::check_step_inputs(eps_noise, delta);
  if (!(eps1 > 0.0 && eps2 > 0.0)) throw ConfigError("eps1 and eps2 must be positive");
  if (oracle.n_components() == 0) throw ConfigError("NCG-S needs a finite-sum problem");
  const SmoothnessParams& p = oracle.params();
  StepResult r;
  auto [est, rq] = detail::estimate_curvature(sampled_hessian(oracle, s2, x), oracle.dim(),
                                              eps_noise, delta, rng);
  r.estimate = std::move(est);
  r.rayleigh = rq;
  r.grad_used = g;
  r.f_before = fx;
  const double curv = stochastic_curvature_payoff(rq, eps2, p.l2);
  const double grad_pay = stochastic_gradient_payoff(g.norm(), eps1, p.l1);
  if (curv > grad_pay) {
    r.kind = StepKind::Curvature;
    r.x_next = detail::finish_point(x - (eps2 / p.l2) * sign_of(r.estimate.v.dot(g)) * r.estimate.v);
  } else {
    r.kind = StepKind::Gradient;
    r.x_next = detail::finish_point(x - g / p.l1);
  }
  r.predicted_decrease = std::max(curv, grad_pay);
  r.f_after = oracle.value(r.x_next);
  r.observed_decrease = r.f_before - r.f_after;
  return r;
}

inline StepResult ncg_s_step(Oracle& oracle, const Point& x, const SampleSet& s1,
                             const SampleSet& s2, double eps_noise, double delta, double eps1,
                             double eps2, CounterRng& rng) {
  if (s1.empty() || s2.empty()) throw ConfigError("sample sets must be nonempty");
  const Vector g = oracle.sampled_gradient(s1, x);
  const double fx = oracle.value(x);
  return ncg_s_step(oracle, x, fx, g, s2, eps_noise, delta, eps1, eps2, rng);
}

}  // namespace ncgopt

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

// Accelerated gradient descent, its almost-convex wrapper, and the
// alternating solvers NCG-B1/B2 built on them.

#pragma once

#include <cmath>
#include <concepts>
#include <string>
#include <utility>

#include "ncgopt/solvers.hpp"

namespace ncgopt {

template <class F>
concept SmoothFunction = requires(const F& f, const Vector& x) {
  { f.value(x) } -> std::convertible_to<double>;
  { f.gradient(x) } -> std::convertible_to<Vector>;
};

/// Plain (value, gradient) pair of callables.
struct FunctionPair {
  std::function<double(const Vector&)> value_fn;
  std::function<Vector(const Vector&)> gradient_fn;
  double value(const Vector& x) const { return value_fn(x); }
  Vector gradient(const Vector& x) const { return gradient_fn(x); }
};

/// f(x) + weight * ([||x - anchor|| - radius]_+)^2, evaluated through a
/// counted oracle.
class PenalizedObjective {
 public:
  PenalizedObjective(Oracle& oracle, Point anchor, double radius, double weight)
      : oracle_(&oracle), anchor_(std::move(anchor)), radius_(radius), weight_(weight) {
    if (!(radius >= 0.0) || !(weight > 0.0)) throw ConfigError("invalid penalty parameters");
  }

  double penalty(const Vector& x) const {
    const double h = std::max(0.0, (x - anchor_).norm() - radius_);
    return weight_ * h * h;
  }

  /// Zero inside the ball, including at the anchor itself.
  Vector penalty_gradient(const Vector& x) const {
    const Vector diff = x - anchor_;
    const double r = diff.norm();
    const double h = std::max(0.0, r - radius_);
    if (h == 0.0) return Vector::Zero(x.size());
    return (2.0 * weight_ * h / r) * diff;
  }

  double value(const Vector& x) const { return oracle_->value(x) + penalty(x); }
  Vector gradient(const Vector& x) const { return oracle_->gradient(x) + penalty_gradient(x); }

  const Point& anchor() const { return anchor_; }
  double radius() const { return radius_; }
  double weight() const { return weight_; }

 private:
  Oracle* oracle_;
  Point anchor_;
  double radius_;
  double weight_;
};

/// g(z) = f(z) + gamma ||z - center||^2.
template <SmoothFunction F>
class ProximalShift {
 public:
  ProximalShift(const F& f, Point center, double gamma)
      : f_(f), center_(std::move(center)), gamma_(gamma) {}
  double value(const Vector& z) const { return f_.value(z) + gamma_ * (z - center_).squaredNorm(); }
  Vector gradient(const Vector& z) const { return f_.gradient(z) + 2.0 * gamma_ * (z - center_); }

 private:
  const F& f_;
  Point center_;
  double gamma_;
};

struct AgdResult {
  Point y;
  std::size_t iters = 0;  // gradient steps taken
  std::size_t cap = 0;
  bool capped = false;
};

inline std::size_t agd_iteration_cap(double kappa, double grad0, double eps) {
  const double lg = grad0 > eps ? std::log(grad0 / eps) : 0.0;
  return saturating_ceil(10.0 * std::sqrt(kappa) * lg + 100.0);
}

/// Nesterov's method for a smooth, strongly convex g. Stops at the first y_j
/// with ||grad g(y_j)|| <= eps or at the iteration cap (flagged, no throw).
template <SmoothFunction G>
AgdResult agd_run(const G& g, const Point& y0, double eps, double smoothness,
                  double strong_convexity) {
  if (!(eps > 0.0)) throw ConfigError("agd: eps must be positive");
  if (!(strong_convexity > 0.0 && smoothness >= strong_convexity))
    throw ConfigError("agd: need smoothness >= strong_convexity > 0");
  const double kappa = smoothness / strong_convexity;
  const double m = (std::sqrt(kappa) - 1.0) / (std::sqrt(kappa) + 1.0);

  AgdResult r;
  Point y = y0;
  Point z = y0;
  Vector gy = g.gradient(y);
  r.cap = agd_iteration_cap(kappa, gy.norm(), eps);
  while (true) {
    if (gy.norm() <= eps) break;
    if (r.iters >= r.cap) {
      r.capped = true;
      break;
    }
    const Vector gz = (r.iters == 0) ? gy : Vector(g.gradient(z));
    Point y_next = z - gz / smoothness;
    if (!y_next.allFinite()) throw DivergenceError("agd: iterate is not finite");
    z = (1.0 + m) * y_next - m * y;
    y = std::move(y_next);
    gy = g.gradient(y);
    ++r.iters;
  }
  r.y = std::move(y);
  return r;
}

/// As agd_run but throws BoundExceededError at the cap.
template <SmoothFunction G>
Point agd(const G& g, const Point& y0, double eps, double smoothness, double strong_convexity) {
  AgdResult r = agd_run(g, y0, eps, smoothness, strong_convexity);
  if (r.capped) throw BoundExceededError("agd: iteration cap exceeded", r.cap);
  return std::move(r.y);
}

enum class AgdSmoothness { Safe, Paper };

inline std::string_view to_string(AgdSmoothness s) {
  return s == AgdSmoothness::Safe ? "safe" : "paper";
}

struct AlmostConvexResult {
  Point z;
  std::size_t rounds = 0;     // AGD calls
  std::size_t agd_iters = 0;  // total AGD gradient steps
  bool capped = false;        // some AGD call hit its cap
};

/// Repeats z_{j+1} = AGD(f + gamma ||. - z_j||^2) from z_j until
/// ||grad f(z_j)|| <= eps. The inner solve targets
/// eps' = eps sqrt(gamma / (50 (L + 2 gamma))) with strong convexity gamma
/// and smoothness L + 2 gamma (Safe) or L (Paper). An inner cap ends the
/// loop at the better of z_j and the capped AGD point.
template <SmoothFunction F>
AlmostConvexResult almost_convex_agd_run(const F& f, const Point& z0, double eps, double gamma,
                                         double smoothness,
                                         AgdSmoothness mode = AgdSmoothness::Safe,
                                         std::size_t max_rounds = 10000) {
  if (!(eps > 0.0)) throw ConfigError("almost-convex AGD: eps must be positive");
  if (!(gamma > 0.0 && gamma <= smoothness))
    throw ConfigError("almost-convex AGD: need 0 < gamma <= smoothness");
  const double eps_inner = eps * std::sqrt(gamma / (50.0 * (smoothness + 2.0 * gamma)));
  const double l_inner = mode == AgdSmoothness::Safe ? smoothness + 2.0 * gamma : smoothness;

  AlmostConvexResult out;
  Point z = z0;
  while (f.gradient(z).norm() > eps) {
    if (out.rounds >= max_rounds)
      throw BoundExceededError("almost-convex AGD: round cap exceeded", max_rounds);
    ProximalShift<F> g(f, z, gamma);
    AgdResult r = agd_run(g, z, eps_inner, l_inner, gamma);
    ++out.rounds;
    out.agd_iters += r.iters;
    if (r.capped) {
      out.capped = true;
      if (f.value(r.y) <= f.value(z)) z = std::move(r.y);
      break;
    }
    z = std::move(r.y);
  }
  out.z = std::move(z);
  return out;
}

template <SmoothFunction F>
Point almost_convex_agd(const F& f, const Point& z0, double eps, double gamma, double smoothness,
                        AgdSmoothness mode = AgdSmoothness::Safe) {
  return almost_convex_agd_run(f, z0, eps, gamma, smoothness, mode).z;
}

/// K = ceil(1 + Delta (max(12 L2^2, 2 L1) / eps2^3 + 2 sqrt(10) L2 / (eps1 eps2))).
inline std::size_t ncg_b_outer_bound(const SmoothnessParams& p, double eps1, double eps2) {
  return saturating_ceil(1.0 + p.delta_gap * (std::max(12.0 * p.l2 * p.l2, 2.0 * p.l1) /
                                                  (eps2 * eps2 * eps2) +
                                              2.0 * std::sqrt(10.0) * p.l2 / (eps1 * eps2)));
}

struct NcgBOptions {
  AgdSmoothness agd_smoothness = AgdSmoothness::Safe;
};

namespace detail {

// Shared outer loop. `inner_eps1` and `inner_alpha` select the inner NCG-A
// solver: A1 when inner_alpha == 1 with eps2 passed explicitly, A2 otherwise.
inline SolveReport run_ncg_b(Oracle& oracle, const Point& x0, const SolveConfig& cfg,
                             std::string name, double eps1, double eps2, double inner_eps1,
                             double inner_alpha, const NcgBOptions& opts) {
  require_finite<ConfigError>(x0, "x0");
  const SmoothnessParams& p = oracle.params();
  SolveReport report;
  report.algorithm = std::move(name);
  report.eps1 = eps1;
  report.eps2 = eps2;
  report.alpha = cfg.alpha;
  report.delta = cfg.delta;
  const std::size_t k_max = ncg_b_outer_bound(p, eps1, eps2);
  report.theoretical_iter_bound = k_max;
  report.delta_prime = cfg.delta / static_cast<double>(k_max);
  Recorder rec(oracle, report, cfg.record_time);
  report.f_initial = oracle.problem().value(x0);

  const double inner_delta = ncg_delta_prime(p, report.delta_prime, inner_eps1, eps2);
  const std::size_t inner_bound = ncg_iteration_bound(p, inner_eps1, eps2);
  const CounterRng curvature_root = CounterRng(cfg.seed).split(streams::kCurvature);
  std::size_t total_inner_cap = 0;

  Point x = x0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    NcgLoopSpec loop;
    loop.eps1 = inner_eps1;
    loop.eps2 = eps2;
    loop.noise = NoiseRule{eps2, inner_alpha, true};
    loop.delta_prime = inner_delta;
    loop.max_iters = cfg.max_iters.value_or(inner_bound > SIZE_MAX / 2 ? SIZE_MAX : 2 * inner_bound);
    loop.curvature_root = curvature_root.split(k);
    loop.record_time = cfg.record_time;
    loop.iter_offset = report.trace.size();
    total_inner_cap += loop.max_iters;

    OuterRound round;
    round.f_start = oracle.problem().value(x);
    const std::size_t rows_before = report.trace.size();
    double f_hat = 0.0, gn = 0.0, rq = 0.0;
    run_ncg_loop(oracle, x, loop, report, rec, f_hat, gn, rq);
    const Point x_hat = report.x_final;
    round.anchor = x_hat;
    round.f_anchor = f_hat;
    round.anchor_grad_norm = gn;
    round.inner_iters = report.trace.size() - rows_before;

    if (gn <= eps1) {
      report.outer_rounds.push_back(std::move(round));
      finish(report, oracle, x_hat, f_hat);
      report.max_iters = total_inner_cap;
      return report;
    }

    const PenalizedObjective fk(oracle, x_hat, eps2 / p.l2, p.l1);
    AlmostConvexResult ac = almost_convex_agd_run(fk, x_hat, eps1 / 2.0, 3.0 * eps2, 5.0 * p.l1,
                                                  opts.agd_smoothness);
    round.agd_rounds = ac.rounds;
    round.agd_iters = ac.agd_iters;
    round.agd_capped = ac.capped;
    if (ac.capped)
      report.warnings.push_back("outer round " + std::to_string(k) + ": AGD hit its iteration cap");
    x = std::move(ac.z);
    const double f_next = oracle.value(x);
    round.f_next = f_next;
    if (f_next > f_hat + descent_tolerance(f_hat))
      report.warnings.push_back("outer round " + std::to_string(k) + ": AGD increased f");
    if (!oracle.problem().in_domain(x)) report.domain_violations.push_back(report.trace.size());

    // The inner Return row becomes the AGD phase of this round.
    TraceRow& last = report.trace.rows.back();
    last.step_kind = TraceKind::AGD;
    const OracleCounters& c = oracle.counters();
    last.hvp_cum = c.hvp_evals + c.component_hvp_evals;
    last.grad_cum = c.grad_evals + c.component_grad_evals;
    report.outer_rounds.push_back(std::move(round));
  }
  throw BoundExceededError(report.algorithm + ": outer rounds exceeded K", k_max);
}

}  // namespace detail

/// NCG-B1: alternate NCG-A1(x_k, eps2^{3/2}, eps2) with Almost-Convex-AGD on
/// the penalized objective until ||grad f(x_hat_k)|| <= eps1.
inline SolveReport ncg_b1(Oracle& oracle, const Point& x0, const SolveConfig& cfg,
                          const NcgBOptions& opts = {}) {
  cfg.validate();
  const double eps1 = cfg.eps1;
  const double eps2 = cfg.eps2_value();
  SolveReport r = detail::run_ncg_b(oracle, x0, cfg, "ncg-b1", eps1, eps2, std::pow(eps2, 1.5),
                                    1.0, opts);
  r.alpha.reset();
  detail::attach_certificate(r, oracle, cfg, eps1, eps2);
  return r;
}

/// NCG-B2: as NCG-B1 with eps2 = eps1^alpha and inner NCG-A2(x_k,
/// eps1^{3 alpha / 2}, 2/3).
inline SolveReport ncg_b2(Oracle& oracle, const Point& x0, const SolveConfig& cfg,
                          const NcgBOptions& opts = {}) {
  cfg.validate();
  if (!cfg.alpha) throw ConfigError("ncg-b2 requires alpha");
  const double eps1 = cfg.eps1;
  const double eps2 = std::pow(eps1, *cfg.alpha);
  const double inner_eps1 = std::pow(eps1, 1.5 * *cfg.alpha);
  SolveReport r = detail::run_ncg_b(oracle, x0, cfg, "ncg-b2", eps1, eps2, inner_eps1,
                                    2.0 / 3.0, opts);
  detail::attach_certificate(r, oracle, cfg, eps1, eps2);
  return r;
}

}  // namespace ncgopt

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

// Iterative drivers. Every solver evaluates f and grad f once per
// iteration, records one trace row per iteration (the terminating one
// included), and attaches a dense stationarity certificate when the
// dimension allows it.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ncgopt/certificate.hpp"
#include "ncgopt/core/problem.hpp"
#include "ncgopt/core/rng.hpp"
#include "ncgopt/steps.hpp"

namespace ncgopt {

enum class TraceKind { Curvature, Gradient, AGD, Return };

inline std::string_view to_string(TraceKind k) {
  switch (k) {
    case TraceKind::Curvature: return "Curvature";
    case TraceKind::Gradient: return "Gradient";
    case TraceKind::AGD: return "AGD";
    case TraceKind::Return: return "Return";
  }
  return "?";
}

inline TraceKind trace_kind(StepKind k) {
  return k == StepKind::Curvature ? TraceKind::Curvature : TraceKind::Gradient;
}

struct TraceRow {
  std::size_t iter = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  TraceKind step_kind = TraceKind::Gradient;
  std::optional<double> rayleigh;
  std::optional<double> noise_level;
  std::size_t hvp_cum = 0;   // hvp_evals + component_hvp_evals
  std::size_t grad_cum = 0;  // grad_evals + component_grad_evals
  std::int64_t wall_ns = 0;  // 0 unless timing is enabled
};

struct RunTrace {
  std::vector<TraceRow> rows;
  std::size_t size() const { return rows.size(); }
};

struct SolveConfig {
  double eps1 = 1e-3;
  std::optional<double> eps2;
  std::optional<double> alpha;  // eps2 = eps1^alpha when set
  double delta = 0.1;
  std::optional<std::size_t> max_iters;  // default: 2x the theoretical bound
  std::uint64_t seed = 0;
  bool record_time = false;
  bool certify = true;
  bool check_assumptions = true;  // dense surrogate-error checks for iH-NCG-A

  /// Resolved second-order target: eps1^alpha if alpha is set, else eps2.
  double eps2_value() const {
    if (alpha) return std::pow(eps1, *alpha);
    if (eps2) return *eps2;
    throw ConfigError("either eps2 or alpha is required");
  }

  void validate() const {
    if (!(eps1 > 0.0)) throw ConfigError("eps1 must be positive");
    if (alpha && !(*alpha > 0.0 && *alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
    if (alpha && eps2 && std::abs(*eps2 - std::pow(eps1, *alpha)) > 1e-12 * *eps2)
      throw ConfigError("eps2 conflicts with eps1^alpha");
    if (eps2 && !(*eps2 > 0.0)) throw ConfigError("eps2 must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  }
};

/// One outer round of NCG-B1/B2.
struct OuterRound {
  Point anchor;                 // x_hat_k returned by the inner NCG-A solver
  double f_start = 0.0;         // f(x_k)
  double f_anchor = 0.0;        // f(x_hat_k)
  double anchor_grad_norm = 0.0;
  std::optional<double> f_next;  // f(x_{k+1}) after Almost-Convex-AGD
  std::size_t inner_iters = 0;
  std::size_t agd_rounds = 0;
  std::size_t agd_iters = 0;
  bool agd_capped = false;
};

struct SamplingInfo {
  std::uint64_t s1 = 0;
  std::uint64_t s2 = 0;
  std::optional<std::uint64_t> s1_theory;
  std::optional<std::uint64_t> s2_theory;
  bool theory_met = false;
};

struct SolveReport {
  std::string algorithm;
  Point x_final;
  double f_initial = 0.0;
  double f_final = 0.0;
  std::size_t iters = 0;
  RunTrace trace;
  OracleCounters counters;
  std::size_t theoretical_iter_bound = 0;
  std::size_t max_iters = 0;
  std::optional<StationarityCertificate> certificate;
  double eps1 = 0.0;
  double eps2 = 0.0;
  std::optional<double> alpha;
  double delta = 0.0;
  double delta_prime = 0.0;
  std::size_t lanczos_calls = 0;
  std::vector<std::size_t> domain_violations;      // iterations whose iterate left the valid region
  std::vector<std::size_t> assumption_violations;  // iterations where ||H - hess f|| > eps2 / 12
  std::vector<OuterRound> outer_rounds;
  std::optional<SamplingInfo> sampling;
  std::vector<std::string> warnings;
};

// Theoretical iteration bounds and per-call confidence levels.

inline std::size_t gd_iteration_bound(const SmoothnessParams& p, double eps) {
  return saturating_ceil(1.0 + 2.0 * p.l1 * p.delta_gap / (eps * eps));
}

inline double ncd_rate(const SmoothnessParams& p, double eps) {
  return 12.0 * p.l2 * p.l2 / (eps * eps * eps);
}
inline std::size_t ncd_iteration_bound(const SmoothnessParams& p, double eps) {
  return saturating_ceil(1.0 + ncd_rate(p, eps) * p.delta_gap);
}

/// max(c L2^2 / eps2^3, g L1 / eps1^2); (c, g) = (12, 2) for NCG-A1/A2,
/// (24, 2) for iH-NCG-A and (48, 8) for SNCG.
inline double ncg_rate(const SmoothnessParams& p, double eps1, double eps2, double c = 12.0,
                       double g = 2.0) {
  return std::max(c * p.l2 * p.l2 / (eps2 * eps2 * eps2), g * p.l1 / (eps1 * eps1));
}
inline std::size_t ncg_iteration_bound(const SmoothnessParams& p, double eps1, double eps2,
                                       double c = 12.0, double g = 2.0) {
  return saturating_ceil(1.0 + ncg_rate(p, eps1, eps2, c, g) * p.delta_gap);
}
inline double ncg_delta_prime(const SmoothnessParams& p, double delta, double eps1, double eps2,
                              double c = 12.0, double g = 2.0) {
  return delta / (1.0 + ncg_rate(p, eps1, eps2, c, g) * p.delta_gap);
}

namespace detail {

inline std::size_t resolve_max_iters(const SolveConfig& cfg, std::size_t bound,
                                     std::vector<std::string>& warnings) {
  const std::size_t def = bound > SIZE_MAX / 2 ? SIZE_MAX : 2 * bound;
  if (!cfg.max_iters) return def;
  if (*cfg.max_iters < bound) {
    warnings.push_back("max_iters " + std::to_string(*cfg.max_iters) +
                       " is below the theoretical bound " + std::to_string(bound));
  }
  return *cfg.max_iters;
}

/// Appends trace rows with cumulative counters and optional wall time.
class Recorder {
 public:
  Recorder(const Oracle& oracle, SolveReport& report, bool record_time)
      : oracle_(oracle), report_(report), record_time_(record_time),
        start_(std::chrono::steady_clock::now()) {}

  void row(std::size_t iter, double f, double grad_norm, TraceKind kind,
           std::optional<double> rayleigh = std::nullopt,
           std::optional<double> noise = std::nullopt) {
    const OracleCounters& c = oracle_.counters();
    TraceRow r;
    r.iter = iter;
    r.f = f;
    r.grad_norm = grad_norm;
    r.step_kind = kind;
    r.rayleigh = rayleigh;
    r.noise_level = noise;
    r.hvp_cum = c.hvp_evals + c.component_hvp_evals;
    r.grad_cum = c.grad_evals + c.component_grad_evals;
    if (record_time_) {
      r.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                      std::chrono::steady_clock::now() - start_)
                      .count();
    }
    report_.trace.rows.push_back(r);
  }

 private:
  const Oracle& oracle_;
  SolveReport& report_;
  bool record_time_;
  std::chrono::steady_clock::time_point start_;
};

inline double descent_tolerance(double f) { return 1e-9 * (1.0 + std::abs(f)); }

inline void check_descent(double f_before, double f_after, std::size_t iter) {
  if (f_after > f_before + descent_tolerance(f_before)) {
    throw ConstantsError("objective increased at iteration " + std::to_string(iter) +
                         "; the declared Lipschitz constants are invalid");
  }
}

inline void attach_certificate(SolveReport& report, const Oracle& oracle, const SolveConfig& cfg,
                               double eps1_level, double eps2_level, bool first = true,
                               bool second = true) {
  if (!cfg.certify || !oracle.dense_available()) return;
  StationarityCertificate c = certify(oracle, report.x_final, eps1_level, eps2_level);
  c.requires_first_order = first;
  c.requires_second_order = second;
  report.certificate = c;
}

inline void finish(SolveReport& report, const Oracle& oracle, const Point& x, double f) {
  report.x_final = x;
  report.f_final = f;
  report.iters = report.trace.size();
  report.counters = oracle.counters();
}

/// How the NCG-family drivers obtain the curvature step at an iterate.
enum class CurvatureSource { Exact, Surrogate, Stochastic };

}  // namespace detail

/// Gradient descent with step 1/L1 until ||grad f|| <= eps.
inline SolveReport gd(Oracle& oracle, const Point& x0, double eps, const SolveConfig& cfg = {}) {
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  require_finite<ConfigError>(x0, "x0");
  const SmoothnessParams& p = oracle.params();
  SolveReport report;
  report.algorithm = "gd";
  report.eps1 = eps;
  report.delta = cfg.delta;
  report.theoretical_iter_bound = gd_iteration_bound(p, eps);
  report.max_iters = detail::resolve_max_iters(cfg, report.theoretical_iter_bound, report.warnings);
  detail::Recorder rec(oracle, report, cfg.record_time);

  Point x = x0;
  double f = oracle.value(x);
  report.f_initial = f;
  for (std::size_t j = 1; j <= report.max_iters; ++j) {
    const Vector g = oracle.gradient(x);
    const double gn = g.norm();
    if (gn <= eps) {
      rec.row(j, f, gn, TraceKind::Return);
      detail::finish(report, oracle, x, f);
      detail::attach_certificate(report, oracle, cfg, eps, cfg.eps2.value_or(eps), true, false);
      return report;
    }
    Point next = detail::finish_point(x - g / p.l1);
    const double f_next = oracle.value(next);
    rec.row(j, f, gn, TraceKind::Gradient);
    if (oracle.problem().in_domain(x) && oracle.problem().in_domain(next))
      detail::check_descent(f, f_next, j);
    if (!oracle.problem().in_domain(next)) report.domain_violations.push_back(j + 1);
    x = std::move(next);
    f = f_next;
  }
  throw BoundExceededError("gd: max_iters exceeded", report.max_iters);
}

/// Negative curvature descent: Lanczos at noise eps/2 with per-iteration
/// confidence delta' = delta / (1 + 12 L2^2 Delta / eps^3); steps along the
/// curvature direction while v'Hv <= -eps/2.
inline SolveReport ncd(Oracle& oracle, const Point& x0, double eps, double delta,
                       const SolveConfig& cfg = {}) {
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  require_finite<ConfigError>(x0, "x0");
  const SmoothnessParams& p = oracle.params();
  SolveReport report;
  report.algorithm = "ncd";
  report.eps2 = eps;
  report.delta = delta;
  report.delta_prime = delta / (1.0 + ncd_rate(p, eps) * p.delta_gap);
  report.theoretical_iter_bound = ncd_iteration_bound(p, eps);
  report.max_iters = detail::resolve_max_iters(cfg, report.theoretical_iter_bound, report.warnings);
  detail::Recorder rec(oracle, report, cfg.record_time);
  const CounterRng curvature_root = CounterRng(cfg.seed).split(streams::kCurvature);

  Point x = x0;
  double f = oracle.value(x);
  report.f_initial = f;
  const double noise = eps / 2.0;
  for (std::size_t j = 1; j <= report.max_iters; ++j) {
    const Vector g = oracle.gradient(x);
    CounterRng rng = curvature_root.split(j);
    auto [est, rq] = detail::estimate_curvature(exact_hessian(oracle, x), oracle.dim(), noise,
                                                report.delta_prime, rng);
    ++report.lanczos_calls;
    if (rq > -eps / 2.0) {
      rec.row(j, f, g.norm(), TraceKind::Return, rq, noise);
      detail::finish(report, oracle, x, f);
      detail::attach_certificate(report, oracle, cfg, cfg.eps1, eps, false, true);
      return report;
    }
    const double eta = 2.0 * std::abs(rq) / p.l2;
    Point next = detail::finish_point(x - eta * sign_of(est.v.dot(g)) * est.v);
    const double f_next = oracle.value(next);
    rec.row(j, f, g.norm(), TraceKind::Curvature, rq, noise);
    if (oracle.problem().in_domain(x) && oracle.problem().in_domain(next))
      detail::check_descent(f, f_next, j);
    if (!oracle.problem().in_domain(next)) report.domain_violations.push_back(j + 1);
    x = std::move(next);
    f = f_next;
  }
  throw BoundExceededError("ncd: max_iters exceeded", report.max_iters);
}

/// A surrogate Hessian at one iterate.
struct Surrogate {
  HessianOperator op;
  std::function<Matrix()> dense;  // uncounted dense form, for assumption checks
  double declared_error = 0.0;    // eps3 the surrogate is built to satisfy
};

/// Builds H(x_j) for iteration j.
using SurrogateFactory = std::function<Surrogate(Oracle&, const Point&, std::size_t)>;

/// H(x) = hess f(x).
inline SurrogateFactory exact_surrogate() {
  return [](Oracle& oracle, const Point& x, std::size_t) {
    Surrogate s;
    s.op = exact_hessian(oracle, x);
    s.dense = [&oracle, x] { return oracle.dense_hessian(x); };
    return s;
  };
}

/// H(x) = hess f(x) + eps3 E with a fixed random symmetric E, ||E||_2 = 1.
inline SurrogateFactory perturbed_surrogate(Eigen::Index d, double eps3, CounterRng rng) {
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = rng.normal();
  g = (0.5 * (g + g.transpose())).eval();
  auto e = std::make_shared<const Matrix>(g / symmetric_spectral_norm(g));
  return [e, eps3](Oracle& oracle, const Point& x, std::size_t) {
    Surrogate s;
    s.op.apply = [&oracle, x, e, eps3](const Vector& v) -> Vector {
      return oracle.hvp(x, v) + eps3 * (*e * v);
    };
    s.op.norm_bound = oracle.params().l1 + eps3;
    s.dense = [&oracle, x, e, eps3] { return Matrix(oracle.dense_hessian(x) + eps3 * *e); };
    s.declared_error = eps3;
    return s;
  };
}

/// H(x_j) = mean of component Hessians over a fresh uniform sample of size
/// `s2_size` drawn from `rng.split(j)`.
inline SurrogateFactory subsampled_surrogate(std::uint64_t s2_size, CounterRng rng, double eps3) {
  return [s2_size, rng, eps3](Oracle& oracle, const Point& x, std::size_t j) {
    if (oracle.n_components() == 0) throw ConfigError("sub-sampled Hessian needs a finite sum");
    CounterRng r = rng.split(j);
    auto sample = std::make_shared<SampleSet>(draw_uniform_sample(oracle.n_components(), s2_size, r));
    Surrogate s;
    s.op.apply = [&oracle, x, sample](const Vector& v) { return oracle.sampled_hvp(*sample, x, v); };
    s.op.norm_bound = oracle.params().l1;
    s.dense = [&oracle, x, sample] { return oracle.dense_sampled_hessian(*sample, x); };
    s.declared_error = eps3;
    return s;
  };
}

namespace detail {

/// Noise rule shared by the NCG-A family: max(eps2, ||g||^alpha) / 2, or a
/// fixed eps2 / 2 for the non-adaptive baseline.
struct NoiseRule {
  double eps2 = 0.0;
  double alpha = 1.0;
  bool adaptive = true;
  double operator()(double grad_norm) const {
    return adaptive ? std::max(eps2, std::pow(grad_norm, alpha)) / 2.0 : eps2 / 2.0;
  }
};

struct NcgLoopSpec {
  double eps1 = 0.0;
  double eps2 = 0.0;
  NoiseRule noise;
  double delta_prime = 0.0;
  std::size_t max_iters = 0;
  CurvatureSource source = CurvatureSource::Exact;
  SurrogateFactory surrogate;     // Surrogate source
  std::uint64_t s1_size = 0;      // Stochastic source
  std::uint64_t s2_size = 0;
  CounterRng curvature_root{0};
  CounterRng sampling_root{0};
  bool check_assumptions = false;
  bool record_time = false;
  std::size_t iter_offset = 0;    // row numbering continues across B-solver rounds
};

/// The NCG-A loop: one NCG-type step per iteration, terminating when
/// v'Hv > -eps2/2 and the (possibly sub-sampled) gradient norm <= eps1.
/// Returns x_j of the terminating iteration.
inline void run_ncg_loop(Oracle& oracle, const Point& x0, const NcgLoopSpec& loop,
                         SolveReport& report, Recorder& rec, double& f_out, double& gnorm_out,
                         double& rayleigh_out) {
  const Problem& problem = oracle.problem();
  Point x = x0;
  double f = oracle.value(x);
  const double assumption_bound = loop.eps2 / 12.0;
  for (std::size_t j = 1; j <= loop.max_iters; ++j) {
    CounterRng rng = loop.curvature_root.split(j);
    StepResult step;
    double gn = 0.0;
    bool assumption_ok = true;
    switch (loop.source) {
      case CurvatureSource::Exact: {
        const Vector g = oracle.gradient(x);
        gn = g.norm();
        step = ncg_step(oracle, x, f, g, loop.noise(gn), loop.delta_prime, rng);
        break;
      }
      case CurvatureSource::Surrogate: {
        const Vector g = oracle.gradient(x);
        gn = g.norm();
        const Surrogate s = loop.surrogate(oracle, x, j);
        if (loop.check_assumptions && s.dense && oracle.dense_available()) {
          const double err = symmetric_spectral_norm(s.dense() - oracle.dense_hessian(x));
          if (err > assumption_bound * (1.0 + 1e-12)) {
            assumption_ok = false;
            report.assumption_violations.push_back(loop.iter_offset + j);
          }
        }
        step = ih_ncg_step(oracle, s.op, x, f, g, loop.noise(gn), loop.delta_prime, loop.eps2, rng);
        break;
      }
      case CurvatureSource::Stochastic: {
        CounterRng srng = loop.sampling_root.split(j);
        CounterRng r1 = srng.split(1);
        CounterRng r2 = srng.split(2);
        const SampleSet s1 = draw_uniform_sample(oracle.n_components(), loop.s1_size, r1);
        const SampleSet s2 = draw_uniform_sample(oracle.n_components(), loop.s2_size, r2);
        const Vector g = oracle.sampled_gradient(s1, x);
        gn = g.norm();
        step = ncg_s_step(oracle, x, f, g, s2, loop.noise(gn), loop.delta_prime, loop.eps1,
                          loop.eps2, rng);
        break;
      }
    }
    ++report.lanczos_calls;
    const double noise = step.estimate.noise_level;
    if (step.rayleigh > -loop.eps2 / 2.0 && gn <= loop.eps1) {
      rec.row(loop.iter_offset + j, f, gn, TraceKind::Return, step.rayleigh, noise);
      report.x_final = x;
      f_out = f;
      gnorm_out = gn;
      rayleigh_out = step.rayleigh;
      return;
    }
    rec.row(loop.iter_offset + j, f, gn, trace_kind(step.kind), step.rayleigh, noise);
    const bool in_region = problem.in_domain(x) && problem.in_domain(step.x_next);
    if (loop.source != CurvatureSource::Stochastic && assumption_ok && in_region)
      check_descent(f, step.f_after, loop.iter_offset + j);
    if (!problem.in_domain(step.x_next)) report.domain_violations.push_back(loop.iter_offset + j + 1);
    x = std::move(step.x_next);
    f = step.f_after;
  }
  throw BoundExceededError(report.algorithm + ": max_iters exceeded", loop.max_iters);
}

inline SolveReport run_ncg_solver(Oracle& oracle, const Point& x0, const SolveConfig& cfg,
                                  std::string name, NcgLoopSpec loop, std::size_t bound) {
  require_finite<ConfigError>(x0, "x0");
  SolveReport report;
  report.algorithm = std::move(name);
  report.eps1 = loop.eps1;
  report.eps2 = loop.eps2;
  report.alpha = cfg.alpha;
  report.delta = cfg.delta;
  report.delta_prime = loop.delta_prime;
  report.theoretical_iter_bound = bound;
  report.max_iters = resolve_max_iters(cfg, bound, report.warnings);
  loop.max_iters = report.max_iters;
  loop.record_time = cfg.record_time;
  Recorder rec(oracle, report, cfg.record_time);
  report.f_initial = oracle.problem().value(x0);
  double f = 0.0, gn = 0.0, rq = 0.0;
  run_ncg_loop(oracle, x0, loop, report, rec, f, gn, rq);
  finish(report, oracle, report.x_final, f);
  return report;
}

inline NcgLoopSpec base_loop(const SolveConfig& cfg, double eps1, double eps2, double alpha,
                             double delta_prime) {
  NcgLoopSpec loop;
  loop.eps1 = eps1;
  loop.eps2 = eps2;
  loop.noise = NoiseRule{eps2, alpha, true};
  loop.delta_prime = delta_prime;
  loop.curvature_root = CounterRng(cfg.seed).split(streams::kCurvature);
  loop.sampling_root = CounterRng(cfg.seed).split(streams::kSampling);
  loop.check_assumptions = cfg.check_assumptions;
  return loop;
}

}  // namespace detail

/// NCG-A1: NCG steps with noise max(eps2, ||grad f(x_j)||) / 2.
/// Guarantees ||grad f|| <= eps1 and, with probability 1 - delta,
/// lambda_min >= -max(eps1, eps2).
inline SolveReport ncg_a1(Oracle& oracle, const Point& x0, const SolveConfig& cfg) {
  cfg.validate();
  const double eps1 = cfg.eps1;
  const double eps2 = cfg.eps2_value();
  const SmoothnessParams& p = oracle.params();
  auto loop = detail::base_loop(cfg, eps1, eps2, 1.0, ncg_delta_prime(p, cfg.delta, eps1, eps2));
  SolveReport r = detail::run_ncg_solver(oracle, x0, cfg, "ncg-a1", loop,
                                         ncg_iteration_bound(p, eps1, eps2));
  r.alpha.reset();
  detail::attach_certificate(r, oracle, cfg, eps1, std::max(eps1, eps2));
  return r;
}

/// NCG-A2: as NCG-A1 with eps2 = eps1^alpha and noise
/// max(eps2, ||grad f(x_j)||^alpha) / 2.
inline SolveReport ncg_a2(Oracle& oracle, const Point& x0, const SolveConfig& cfg) {
  cfg.validate();
  if (!cfg.alpha) throw ConfigError("ncg-a2 requires alpha");
  const double eps1 = cfg.eps1;
  const double alpha = *cfg.alpha;
  const double eps2 = std::pow(eps1, alpha);
  const SmoothnessParams& p = oracle.params();
  auto loop = detail::base_loop(cfg, eps1, eps2, alpha, ncg_delta_prime(p, cfg.delta, eps1, eps2));
  SolveReport r = detail::run_ncg_solver(oracle, x0, cfg, "ncg-a2", loop,
                                         ncg_iteration_bound(p, eps1, eps2));
  detail::attach_certificate(r, oracle, cfg, eps1, eps2);
  return r;
}

/// Non-adaptive baseline: NCG steps at the fixed noise eps2 / 2 with the
/// NCG-A1 stopping rule and confidence.
inline SolveReport ncg_fixed(Oracle& oracle, const Point& x0, const SolveConfig& cfg) {
  cfg.validate();
  const double eps1 = cfg.eps1;
  const double eps2 = cfg.eps2_value();
  const SmoothnessParams& p = oracle.params();
  auto loop = detail::base_loop(cfg, eps1, eps2, 1.0, ncg_delta_prime(p, cfg.delta, eps1, eps2));
  loop.noise.adaptive = false;
  SolveReport r = detail::run_ncg_solver(oracle, x0, cfg, "ncg-fixed", loop,
                                         ncg_iteration_bound(p, eps1, eps2));
  r.alpha.reset();
  detail::attach_certificate(r, oracle, cfg, eps1, std::max(eps1, eps2));
  return r;
}

/// iH-NCG-A: NCG-A1 driven by a surrogate Hessian H(x_j) with
/// ||H(x_j) - hess f(x_j)|| <= eps3 <= eps2 / 12. Violations of that bound
/// are detected densely (when d allows) and reported; the run continues.
inline SolveReport ih_ncg_a(Oracle& oracle, const SurrogateFactory& surrogate, const Point& x0,
                            const SolveConfig& cfg, double declared_eps3 = 0.0) {
  cfg.validate();
  if (!surrogate) throw ConfigError("ih-ncg-a needs a surrogate factory");
  const double eps1 = cfg.eps1;
  const double eps2 = cfg.eps2_value();
  const SmoothnessParams& p = oracle.params();
  auto loop = detail::base_loop(cfg, eps1, eps2, 1.0,
                                ncg_delta_prime(p, cfg.delta, eps1, eps2, 24.0, 2.0));
  loop.source = detail::CurvatureSource::Surrogate;
  loop.surrogate = surrogate;
  SolveReport r = detail::run_ncg_solver(oracle, x0, cfg, "ih-ncg-a", loop,
                                         ncg_iteration_bound(p, eps1, eps2, 24.0, 2.0));
  r.alpha.reset();
  detail::attach_certificate(r, oracle, cfg, eps1, std::max(eps1, eps2) + declared_eps3);
  return r;
}

/// Theoretical sample sizes (s1 for gradients, s2 for Hessians) at per-call
/// confidence `delta_prime`:
///   s1 = ceil(max(32 G^2/eps1^2, 2304 G^2 L2^4/eps2^4) (1 + 3 log^2(2/delta')))
///   s2 = ceil(9216 L1^2/eps2^2 log(4 d/delta'))
struct SampleSizes {
  std::uint64_t s1 = 0;
  std::uint64_t s2 = 0;
};

inline SampleSizes sample_sizes_at(const SmoothnessParams& p, double eps1, double eps2,
                                   double delta_prime, Eigen::Index d) {
  if (!p.g_bound) throw ConfigError("sample sizes need the gradient scale G");
  if (!(delta_prime > 0.0 && delta_prime < 1.0)) throw ConfigError("delta' must lie in (0, 1)");
  const double g2 = *p.g_bound * *p.g_bound;
  const double l2_4 = std::pow(p.l2, 4);
  const double lg = std::log(2.0 / delta_prime);
  const double s1 = std::max(32.0 * g2 / (eps1 * eps1), 2304.0 * g2 * l2_4 / std::pow(eps2, 4)) *
                    (1.0 + 3.0 * lg * lg);
  const double s2 = 9216.0 * p.l1 * p.l1 / (eps2 * eps2) *
                    std::log(4.0 * static_cast<double>(d) / delta_prime);
  // Guard against representation error turning an exact integer into n + 1.
  auto to_count = [](double v) { return saturating_ceil(v * (1.0 - 1e-14)); };
  return {to_count(s1), to_count(s2)};
}

/// Hessian sample size ceil(16 L1^2 / eps3^2 log(2 d / delta')) after which
/// ||H - hess f||_2 <= eps3 holds with probability 1 - delta'.
inline std::uint64_t hessian_sample_size(double l1, double eps3, double delta_prime, Eigen::Index d) {
  if (!(eps3 > 0.0) || !(delta_prime > 0.0 && delta_prime < 1.0))
    throw ConfigError("hessian_sample_size: need eps3 > 0 and delta' in (0, 1)");
  return saturating_ceil(16.0 * l1 * l1 / (eps3 * eps3) *
                         std::log(2.0 * static_cast<double>(d) / delta_prime) * (1.0 - 1e-14));
}

/// Gradient sample size ceil(4 G^2 (1 + 3 log^2(1/delta')) / eps4^2) after
/// which ||g - grad f|| <= eps4 holds with probability 1 - delta'.
inline std::uint64_t gradient_sample_size(double g_bound, double eps4, double delta_prime) {
  if (!(eps4 > 0.0) || !(delta_prime > 0.0 && delta_prime < 1.0))
    throw ConfigError("gradient_sample_size: need eps4 > 0 and delta' in (0, 1)");
  const double lg = std::log(1.0 / delta_prime);
  return saturating_ceil(4.0 * g_bound * g_bound * (1.0 + 3.0 * lg * lg) / (eps4 * eps4) *
                         (1.0 - 1e-14));
}

/// Gradient accuracy implied by the SNCG sizes: min(eps1 / sqrt(8), eps2^2 / (24 L2^2)),
/// holding with probability 1 - delta'/2.
inline double sncg_gradient_accuracy(const SmoothnessParams& p, double eps1, double eps2) {
  return std::min(eps1 / std::sqrt(8.0), eps2 * eps2 / (24.0 * p.l2 * p.l2));
}

/// Sample sizes for SNCG's own delta' = delta / (1 + max(48 L2^2/eps2^3, 8 L1/eps1^2) Delta).
inline SampleSizes sample_sizes(const SolveConfig& cfg, const SmoothnessParams& p, Eigen::Index d) {
  cfg.validate();
  const double eps2 = cfg.eps2_value();
  return sample_sizes_at(p, cfg.eps1, eps2, ncg_delta_prime(p, cfg.delta, cfg.eps1, eps2, 48.0, 8.0), d);
}

/// SNCG: NCG-S steps on fresh uniform samples of sizes s1 (gradient) and s2
/// (Hessian) each iteration, with noise max(eps2, ||g||^alpha) / 2. The same
/// gradient sample drives the termination test and the step.
inline SolveReport sncg(Oracle& oracle, const Point& x0, const SolveConfig& cfg,
                        std::uint64_t s1_size, std::uint64_t s2_size) {
  cfg.validate();
  if (oracle.n_components() == 0) throw ConfigError("sncg needs a finite-sum problem");
  if (s1_size == 0 || s2_size == 0) throw ConfigError("sample sizes must be positive");
  const double eps1 = cfg.eps1;
  const double alpha = cfg.alpha.value_or(1.0);
  const double eps2 = cfg.eps2_value();
  const SmoothnessParams& p = oracle.params();
  auto loop = detail::base_loop(cfg, eps1, eps2, alpha,
                                ncg_delta_prime(p, cfg.delta, eps1, eps2, 48.0, 8.0));
  loop.source = detail::CurvatureSource::Stochastic;
  loop.s1_size = s1_size;
  loop.s2_size = s2_size;
  SolveReport r = detail::run_ncg_solver(oracle, x0, cfg, "sncg", loop,
                                         ncg_iteration_bound(p, eps1, eps2, 48.0, 8.0));
  SamplingInfo info;
  info.s1 = s1_size;
  info.s2 = s2_size;
  if (p.g_bound) {
    const SampleSizes th = sample_sizes_at(p, eps1, eps2, r.delta_prime, oracle.dim());
    info.s1_theory = th.s1;
    info.s2_theory = th.s2;
    info.theory_met = s1_size >= th.s1 && s2_size >= th.s2;
  }
  r.sampling = info;
  detail::attach_certificate(r, oracle, cfg, 2.0 * eps1, 2.0 * eps2);
  return r;
}

}  // namespace ncgopt

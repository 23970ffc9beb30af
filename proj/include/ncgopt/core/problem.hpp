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

#include <cstddef>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ncgopt/core/rng.hpp"
#include "ncgopt/core/types.hpp"

namespace ncgopt {

/// A twice-differentiable objective f : R^d -> R with matrix-free second
/// order information. Implementations are immutable after construction and
/// may be shared read-only between concurrent runs.
///
/// Finite-sum problems f = (1/n) sum_i f_i additionally expose per-component
/// gradients and Hessian-vector products.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index dim() const = 0;

  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual Vector hvp(const Vector& x, const Vector& v) const = 0;

  /// Dense Hessian. The default assembles it column by column from `hvp` and
  /// symmetrizes the result.
  virtual Matrix hessian(const Vector& x) const {
    const Eigen::Index d = dim();
    Matrix h(d, d);
    for (Eigen::Index j = 0; j < d; ++j) h.col(j) = hvp(x, Vector::Unit(d, j));
    return 0.5 * (h + h.transpose());
  }

  /// Lipschitz constants of the problem. `delta_gap` depends on the starting
  /// point and is filled in per run.
  virtual SmoothnessParams base_params() const = 0;

  /// Global minimum value when known in closed form.
  virtual std::optional<double> known_minimum() const { return std::nullopt; }

  /// Lower bound on f, used to declare the optimality gap when the minimum
  /// is not known.
  virtual std::optional<double> lower_bound() const { return known_minimum(); }

  /// Region on which `base_params` are valid. Iterates outside it are flagged
  /// by the solvers, not rejected.
  virtual bool in_domain(const Vector&) const { return true; }

  virtual std::size_t n_components() const { return 0; }

  virtual double component_value(std::size_t, const Vector&) const {
    throw ConfigError(name() + " has no finite-sum structure");
  }
  virtual Vector component_gradient(std::size_t, const Vector&) const {
    throw ConfigError(name() + " has no finite-sum structure");
  }
  virtual Vector component_hvp(std::size_t, const Vector&, const Vector&) const {
    throw ConfigError(name() + " has no finite-sum structure");
  }
  virtual Matrix component_hessian(std::size_t i, const Vector& x) const {
    const Eigen::Index d = dim();
    Matrix h(d, d);
    for (Eigen::Index j = 0; j < d; ++j) h.col(j) = component_hvp(i, x, Vector::Unit(d, j));
    return 0.5 * (h + h.transpose());
  }
};

/// A multiset of component indices drawn with replacement, stored as distinct
/// indices with their multiplicities.
struct SampleSet {
  std::vector<std::pair<std::size_t, std::uint64_t>> counts;
  std::uint64_t draws = 0;

  bool empty() const { return draws == 0; }
  std::size_t distinct() const { return counts.size(); }

  static SampleSet full(std::size_t n) {
    SampleSet s;
    s.counts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) s.counts.emplace_back(i, 1);
    s.draws = n;
    return s;
  }

  static SampleSet from_indices(const std::vector<std::size_t>& indices) {
    std::vector<std::uint64_t> mult;
    for (std::size_t i : indices) {
      if (i >= mult.size()) mult.resize(i + 1, 0);
      ++mult[i];
    }
    SampleSet s;
    for (std::size_t i = 0; i < mult.size(); ++i)
      if (mult[i] > 0) s.counts.emplace_back(i, mult[i]);
    s.draws = indices.size();
    return s;
  }
};

/// Draws `draws` indices uniformly with replacement from {0, ..., n-1}.
/// Multiplicities are generated by sequential binomial splitting, which is an
/// exact multinomial draw and costs O(n) regardless of `draws`.
inline SampleSet draw_uniform_sample(std::size_t n, std::uint64_t draws, CounterRng& rng) {
  if (n == 0 || draws == 0) throw ConfigError("sample sets must be nonempty");
  SampleSet s;
  s.draws = draws;
  if (draws <= 4 * n) {
    std::vector<std::uint64_t> mult(n, 0);
    for (std::uint64_t k = 0; k < draws; ++k) ++mult[rng.below(n)];
    for (std::size_t i = 0; i < n; ++i)
      if (mult[i] > 0) s.counts.emplace_back(i, mult[i]);
    return s;
  }
  std::uint64_t remaining = draws;
  for (std::size_t i = 0; i < n && remaining > 0; ++i) {
    std::uint64_t c = remaining;
    if (i + 1 < n) {
      const double p = 1.0 / static_cast<double>(n - i);
      std::binomial_distribution<long long> binom(static_cast<long long>(remaining), p);
      c = static_cast<std::uint64_t>(binom(rng));
    }
    if (c > 0) s.counts.emplace_back(i, c);
    remaining -= c;
  }
  return s;
}

/// Per-run view of a problem: forwards to the shared `Problem`, checks every
/// output for finiteness, and counts oracle calls. Each call to value,
/// gradient, hvp, component_gradient or component_hvp increments exactly one
/// counter by one. Dense Hessians are certification tools and are not
/// counted.
class Oracle {
 public:
  Oracle(std::shared_ptr<const Problem> problem, SmoothnessParams params)
      : problem_(std::move(problem)), params_(params) {
    if (!problem_) throw ConfigError("null problem");
    params_.validate();
  }

  const Problem& problem() const { return *problem_; }
  std::shared_ptr<const Problem> shared_problem() const { return problem_; }
  const SmoothnessParams& params() const { return params_; }
  Eigen::Index dim() const { return problem_->dim(); }
  std::size_t n_components() const { return problem_->n_components(); }

  const OracleCounters& counters() const { return counters_; }
  void reset_counters() { counters_ = {}; }

  double value(const Vector& x) {
    ++counters_.f_evals;
    return require_finite(problem_->value(x), "objective value");
  }

  Vector gradient(const Vector& x) {
    ++counters_.grad_evals;
    Vector g = problem_->gradient(x);
    require_finite(g, "gradient");
    return g;
  }

  Vector hvp(const Vector& x, const Vector& v) {
    ++counters_.hvp_evals;
    Vector hv = problem_->hvp(x, v);
    require_finite(hv, "Hessian-vector product");
    return hv;
  }

  Vector component_gradient(std::size_t i, const Vector& x) {
    check_component(i);
    ++counters_.component_grad_evals;
    Vector g = problem_->component_gradient(i, x);
    require_finite(g, "component gradient");
    return g;
  }

  Vector component_hvp(std::size_t i, const Vector& x, const Vector& v) {
    check_component(i);
    ++counters_.component_hvp_evals;
    Vector hv = problem_->component_hvp(i, x, v);
    require_finite(hv, "component Hessian-vector product");
    return hv;
  }

  /// Sample mean of component gradients over `s`.
  Vector sampled_gradient(const SampleSet& s, const Vector& x) {
    if (s.empty()) throw ConfigError("empty gradient sample");
    Vector g = Vector::Zero(dim());
    for (const auto& [i, c] : s.counts) g += static_cast<double>(c) * component_gradient(i, x);
    return g / static_cast<double>(s.draws);
  }

  /// Sample mean of component Hessian-vector products over `s`.
  Vector sampled_hvp(const SampleSet& s, const Vector& x, const Vector& v) {
    if (s.empty()) throw ConfigError("empty Hessian sample");
    Vector hv = Vector::Zero(dim());
    for (const auto& [i, c] : s.counts) hv += static_cast<double>(c) * component_hvp(i, x, v);
    return hv / static_cast<double>(s.draws);
  }

  /// Dense Hessian; refused above `dense_cap()`.
  Matrix dense_hessian(const Vector& x) const {
    check_dense();
    Matrix h = problem_->hessian(x);
    if (!h.allFinite()) throw OracleError("dense Hessian is not finite");
    return h;
  }

  /// Dense sub-sampled Hessian (for concentration checks).
  Matrix dense_sampled_hessian(const SampleSet& s, const Vector& x) const {
    check_dense();
    Matrix h = Matrix::Zero(dim(), dim());
    for (const auto& [i, c] : s.counts) h += static_cast<double>(c) * problem_->component_hessian(i, x);
    return h / static_cast<double>(s.draws);
  }

  bool dense_available() const { return static_cast<std::size_t>(dim()) <= dense_cap(); }

 private:
  void check_component(std::size_t i) const {
    if (i >= problem_->n_components()) throw ConfigError("component index out of range");
  }
  void check_dense() const {
    if (!dense_available()) {
      throw CertificationUnavailable("dimension " + std::to_string(dim()) +
                                     " exceeds the dense cap " + std::to_string(dense_cap()));
    }
  }

  std::shared_ptr<const Problem> problem_;
  SmoothnessParams params_;
  OracleCounters counters_;
};

}  // namespace ncgopt

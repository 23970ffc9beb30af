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

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ncgopt/core/problems.hpp"
#include "ncgopt/core/rng.hpp"

namespace ncgopt {

inline std::shared_ptr<const Problem> make_trig_problem(std::vector<double> amplitudes) {
  return std::make_shared<const TrigProblem>(std::move(amplitudes));
}

inline std::shared_ptr<const Problem> make_matfac_problem(Matrix m, Eigen::Index rank,
                                                          std::optional<double> domain_cap = {}) {
  return std::make_shared<const MatFacProblem>(std::move(m), rank, domain_cap);
}

inline std::shared_ptr<const Problem> make_finite_sum_problem(Matrix features, Vector labels) {
  return std::make_shared<const SigmoidSumProblem>(std::move(features), std::move(labels));
}

/// Gaussian features; labels from a random unit hyperplane, each flipped with
/// probability `label_noise`.
inline std::shared_ptr<const Problem> make_sigmoid_dataset(std::size_t n, Eigen::Index d,
                                                           double label_noise, std::uint64_t seed) {
  if (n == 0 || d == 0) throw ConfigError("finitesum-sigmoid: empty data");
  CounterRng rng(seed);
  const Vector w = rng.unit_vector(d);
  Matrix a(static_cast<Eigen::Index>(n), d);
  Vector y(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = rng.normal();
    double label = a.row(i).dot(w) >= 0.0 ? 1.0 : -1.0;
    if (rng.uniform() < label_noise) label = -label;
    y[i] = label;
  }
  return make_finite_sum_problem(std::move(a), std::move(y));
}

/// Problem selection and data parameters, as given on the command line or in
/// a config file.
struct ProblemConfig {
  std::string name = "trig";
  std::optional<Eigen::Index> dim;          // trig: d; matfac: rows of M; sigmoid: features
  std::vector<double> amplitudes;           // trig
  Eigen::Index rank = 2;                    // matfac
  std::optional<double> domain_cap;         // matfac T
  std::size_t n_samples = 500;              // sigmoid
  double label_noise = 0.1;                 // sigmoid
  std::uint64_t data_seed = 42;
  std::optional<double> init_scale;
  std::vector<double> x0;                   // explicit start; overrides init_scale
};

struct ProblemInfo {
  std::string_view key;
  std::string_view summary;
};

inline constexpr std::array<ProblemInfo, 3> kRegisteredProblems{{
    {"trig", "sum_i c_i cos(x_i); default d=10, c from 1.0 down to 0.5"},
    {"matfac", "1/2 ||UU' - M||_F^2, M = BB' with B Gaussian; default d=6, r=2"},
    {"finitesum-sigmoid", "(1/n) sum_i 1/(1+exp(y_i a_i'x)); default n=500, d=10"},
}};

inline bool is_registered_problem(std::string_view key) {
  for (const auto& p : kRegisteredProblems)
    if (p.key == key) return true;
  return false;
}

/// A problem plus a starting point and the run's declared constants.
struct ProblemInstance {
  std::shared_ptr<const Problem> problem;
  Point x0;
  SmoothnessParams params;
};

/// Builds the shared problem from `cfg` (data drawn from `cfg.data_seed`).
inline std::shared_ptr<const Problem> build_problem(const ProblemConfig& cfg) {
  if (cfg.name == "trig") {
    std::vector<double> c = cfg.amplitudes;
    if (c.empty()) {
      const Eigen::Index d = cfg.dim.value_or(10);
      if (d < 1) throw ConfigError("trig: dim must be >= 1");
      c.resize(static_cast<std::size_t>(d));
      for (Eigen::Index i = 0; i < d; ++i)
        c[static_cast<std::size_t>(i)] = d == 1 ? 1.0 : 1.0 - 0.5 * static_cast<double>(i) / static_cast<double>(d - 1);
    } else if (cfg.dim && *cfg.dim != static_cast<Eigen::Index>(c.size())) {
      throw ConfigError("trig: dim does not match the number of amplitudes");
    }
    return make_trig_problem(std::move(c));
  }
  if (cfg.name == "matfac") {
    const Eigen::Index d = cfg.dim.value_or(6);
    if (d < 1 || cfg.rank < 1 || cfg.rank > d) throw ConfigError("matfac: need 1 <= rank <= dim");
    CounterRng rng(cfg.data_seed);
    Matrix b(d, cfg.rank);
    for (Eigen::Index j = 0; j < cfg.rank; ++j)
      for (Eigen::Index i = 0; i < d; ++i) b(i, j) = rng.normal();
    Matrix m = b * b.transpose();
    m = (0.5 * (m + m.transpose())).eval();
    return make_matfac_problem(std::move(m), cfg.rank, cfg.domain_cap);
  }
  if (cfg.name == "finitesum-sigmoid") {
    return make_sigmoid_dataset(cfg.n_samples, cfg.dim.value_or(10), cfg.label_noise, cfg.data_seed);
  }
  throw ConfigError("unknown problem '" + cfg.name + "'");
}

inline double default_init_scale(std::string_view name) {
  if (name == "trig") return 0.5;
  if (name == "matfac") return 0.1;
  return 0.1;
}

/// Builds the problem, draws x0 from the run seed (uniform in
/// [-scale, scale]^d unless given), and declares the optimality gap as
/// f(x0) minus the known minimum, or minus a known lower bound.
inline ProblemInstance make_instance(const ProblemConfig& cfg, std::uint64_t run_seed) {
  ProblemInstance inst;
  inst.problem = build_problem(cfg);
  const Eigen::Index d = inst.problem->dim();
  if (!cfg.x0.empty()) {
    if (static_cast<Eigen::Index>(cfg.x0.size()) != d) throw ConfigError("x0 has wrong dimension");
    inst.x0 = Eigen::Map<const Vector>(cfg.x0.data(), d);
  } else {
    CounterRng rng = CounterRng(run_seed).split(streams::kInit);
    const double scale = cfg.init_scale.value_or(default_init_scale(cfg.name));
    inst.x0.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) inst.x0[i] = scale * (2.0 * rng.uniform() - 1.0);
  }
  require_finite<ConfigError>(inst.x0, "x0");
  inst.params = inst.problem->base_params();
  const double f0 = inst.problem->value(inst.x0);
  const auto floor = inst.problem->lower_bound();
  inst.params.delta_gap = floor ? std::max(f0 - *floor, 1e-12) : std::max(std::abs(f0), 1.0);
  return inst;
}

}  // namespace ncgopt

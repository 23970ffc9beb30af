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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ncgopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A decision variable x in R^d. Plain Eigen vector; finiteness is checked at
/// API boundaries with `require_finite`.
using Point = Vector;

// Error hierarchy. Every error thrown by the library derives from `Error`.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or problem data.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An oracle returned a non-finite value.
class OracleError : public Error {
 public:
  using Error::Error;
};

/// Malformed numeric input (e.g. an asymmetric matrix handed to a symmetric
/// eigensolver).
class InputError : public Error {
 public:
  using Error::Error;
};

/// An iterate left the finite reals.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// An iteration cap derived from the theoretical bound was exceeded.
class BoundExceededError : public Error {
 public:
  BoundExceededError(const std::string& what, std::size_t iterations)
      : Error(what), iterations_(iterations) {}
  std::size_t iterations() const { return iterations_; }

 private:
  std::size_t iterations_;
};

/// The objective increased on a step that provably decreases it, which can
/// only happen when the declared Lipschitz constants are wrong.
class ConstantsError : public Error {
 public:
  using Error::Error;
};

/// Dense certification requested above the dense dimension cap.
class CertificationUnavailable : public Error {
 public:
  using Error::Error;
};

/// Lipschitz constants and initial optimality gap of a problem.
struct SmoothnessParams {
  double l1 = 1.0;         // gradient Lipschitz constant
  double l2 = 1.0;         // Hessian Lipschitz constant
  double delta_gap = 1.0;  // upper bound on f(x0) - f(x*)
  std::optional<double> g_bound;  // sub-Gaussian scale of component gradients

  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(l1) || !positive(l2) || !positive(delta_gap)) {
      throw ConfigError("smoothness constants l1, l2, delta_gap must be positive");
    }
    if (g_bound && !positive(*g_bound)) {
      throw ConfigError("g_bound must be positive when present");
    }
  }
};

/// Oracle call accounting for one run.
struct OracleCounters {
  std::size_t f_evals = 0;
  std::size_t grad_evals = 0;
  std::size_t hvp_evals = 0;
  std::size_t component_grad_evals = 0;
  std::size_t component_hvp_evals = 0;

  friend bool operator==(const OracleCounters&, const OracleCounters&) = default;
};

inline constexpr std::size_t kDefaultDenseCap = 200;

/// Largest dimension for which dense Hessians are formed. Overridable through
/// the NCGOPT_DENSE_CAP environment variable.
inline std::size_t dense_cap() {
  if (const char* env = std::getenv("NCGOPT_DENSE_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return static_cast<std::size_t>(v);
  }
  return kDefaultDenseCap;
}

inline bool all_finite(const Eigen::Ref<const Vector>& v) {
  return v.allFinite();
}

template <class E = OracleError>
inline void require_finite(const Eigen::Ref<const Vector>& v, const char* what) {
  if (!v.allFinite()) throw E(std::string(what) + " is not finite");
}

template <class E = OracleError>
inline double require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw E(std::string(what) + " is not finite");
  return v;
}

/// sign(0) is +1.
inline double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

/// Converts a non-negative real bound to a count, saturating instead of
/// overflowing.
inline std::size_t saturating_ceil(double v) {
  constexpr double kMax = 9.0e18;
  if (!(v > 0.0)) return 0;
  if (v >= kMax) return static_cast<std::size_t>(kMax);
  return static_cast<std::size_t>(std::ceil(v));
}

}  // namespace ncgopt

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
#include "ncgopt/eigensolver/dense.hpp"

namespace ncgopt {

/// Dense check of (eps1, eps2)-second-order stationarity:
/// ||grad f(x)|| <= eps1 and lambda_min(hess f(x)) >= -eps2.
struct StationarityCertificate {
  double grad_norm = 0.0;
  double lambda_min = 0.0;
  double eps1_target = 0.0;
  double eps2_target = 0.0;
  bool passed_first_order = false;
  bool passed_second_order = false;
  // Which conditions the producing algorithm guarantees. GD only promises the
  // first-order condition and NCD only the second-order one.
  bool requires_first_order = true;
  bool requires_second_order = true;

  bool passed() const {
    return (!requires_first_order || passed_first_order) &&
           (!requires_second_order || passed_second_order);
  }

  /// The stored flags agree with the stored values.
  bool consistent() const {
    return passed_first_order == (grad_norm <= eps1_target) &&
           passed_second_order == (lambda_min >= -eps2_target);
  }
};

/// Throws CertificationUnavailable above the dense cap. Uses the problem
/// directly, so oracle counters are untouched.
inline StationarityCertificate certify(const Oracle& oracle, const Point& x, double eps1, double eps2) {
  if (!oracle.dense_available()) {
    throw CertificationUnavailable("certification needs d <= " + std::to_string(dense_cap()));
  }
  StationarityCertificate c;
  c.grad_norm = oracle.problem().gradient(x).norm();
  c.lambda_min = dense_min_eig(oracle.dense_hessian(x)).lambda_min;
  c.eps1_target = eps1;
  c.eps2_target = eps2;
  c.passed_first_order = c.grad_norm <= eps1;
  c.passed_second_order = c.lambda_min >= -eps2;
  return c;
}

}  // namespace ncgopt

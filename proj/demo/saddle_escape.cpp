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

// Starts two solvers at a strict saddle of f(x) = cos(x1) + cos(x2).
// Gradient descent cannot move; NCG-A1 follows negative curvature to the
// minimum at (pi, pi).

#include <cstdio>

#include "ncgopt/ncgopt.hpp"

int main() {
  using namespace ncgopt;
  auto problem = make_trig_problem({1.0, 1.0});
  const Point x0 = Point::Zero(2);
  SmoothnessParams params = problem->base_params();
  params.delta_gap = problem->value(x0) - *problem->known_minimum();

  SolveConfig cfg;
  cfg.eps1 = 1e-6;
  cfg.eps2 = 1e-2;
  cfg.seed = 7;

  Oracle gd_oracle(problem, params);
  const SolveReport g = gd(gd_oracle, x0, cfg.eps1, cfg);
  std::printf("gd      iters=%zu  f=%.6f  lambda_min=%+.6f\n", g.iters, g.f_final,
              g.certificate->lambda_min);

  Oracle ncg_oracle(problem, params);
  const SolveReport n = ncg_a1(ncg_oracle, x0, cfg);
  std::printf("ncg-a1  iters=%zu  f=%.6f  lambda_min=%+.6f  hvp=%zu\n", n.iters, n.f_final,
              n.certificate->lambda_min, n.counters.hvp_evals);
  for (const TraceRow& r : n.trace.rows) {
    std::printf("  %3zu  f=%+.8f  |g|=%.2e  %s\n", r.iter, r.f, r.grad_norm,
                std::string(to_string(r.step_kind)).c_str());
  }
  return 0;
}

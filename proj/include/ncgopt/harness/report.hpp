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

// JSON serialization of solver reports. Keys keep insertion order so the
// output is stable across runs.

#pragma once

#include <json.hpp>

#include "ncgopt/accel.hpp"
#include "ncgopt/harness/trace_io.hpp"

namespace ncgopt {

using Json = nlohmann::ordered_json;

inline Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

template <class T>
Json to_json(const std::optional<T>& o) {
  return o ? Json(*o) : Json(nullptr);
}

inline Json to_json(const OracleCounters& c) {
  return Json{{"f_evals", c.f_evals},
              {"grad_evals", c.grad_evals},
              {"hvp_evals", c.hvp_evals},
              {"component_grad_evals", c.component_grad_evals},
              {"component_hvp_evals", c.component_hvp_evals}};
}

inline Json to_json(const SmoothnessParams& p) {
  return Json{{"l1", p.l1}, {"l2", p.l2}, {"delta_gap", p.delta_gap}, {"g_bound", to_json(p.g_bound)}};
}

inline Json to_json(const StationarityCertificate& c) {
  return Json{{"grad_norm", c.grad_norm},
              {"lambda_min", c.lambda_min},
              {"eps1_target", c.eps1_target},
              {"eps2_target", c.eps2_target},
              {"passed_first_order", c.passed_first_order},
              {"passed_second_order", c.passed_second_order},
              {"requires_first_order", c.requires_first_order},
              {"requires_second_order", c.requires_second_order},
              {"passed", c.passed()}};
}

inline Json to_json(const TraceRow& r) {
  return Json{{"iter", r.iter},
              {"f", r.f},
              {"grad_norm", r.grad_norm},
              {"step_kind", std::string(to_string(r.step_kind))},
              {"rayleigh", to_json(r.rayleigh)},
              {"noise_level", to_json(r.noise_level)},
              {"hvp_cum", r.hvp_cum},
              {"grad_cum", r.grad_cum},
              {"wall_ns", r.wall_ns}};
}

inline Json to_json(const OuterRound& o) {
  return Json{{"anchor", to_json(o.anchor)},
              {"f_start", o.f_start},
              {"f_anchor", o.f_anchor},
              {"anchor_grad_norm", o.anchor_grad_norm},
              {"f_next", to_json(o.f_next)},
              {"inner_iters", o.inner_iters},
              {"agd_rounds", o.agd_rounds},
              {"agd_iters", o.agd_iters},
              {"agd_capped", o.agd_capped}};
}

inline Json to_json(const SamplingInfo& s) {
  return Json{{"s1", s.s1},
              {"s2", s.s2},
              {"s1_theory", to_json(s.s1_theory)},
              {"s2_theory", to_json(s.s2_theory)},
              {"theory_met", s.theory_met}};
}

inline Json to_json(const SolveReport& r) {
  Json trace = Json::array();
  for (const TraceRow& row : r.trace.rows) trace.push_back(to_json(row));
  Json rounds = Json::array();
  for (const OuterRound& o : r.outer_rounds) rounds.push_back(to_json(o));
  return Json{{"algorithm", r.algorithm},
              {"iters", r.iters},
              {"theoretical_iter_bound", r.theoretical_iter_bound},
              {"max_iters", r.max_iters},
              {"eps1", r.eps1},
              {"eps2", r.eps2},
              {"alpha", to_json(r.alpha)},
              {"delta", r.delta},
              {"delta_prime", r.delta_prime},
              {"f_initial", r.f_initial},
              {"f_final", r.f_final},
              {"x_final", to_json(r.x_final)},
              {"counters", to_json(r.counters)},
              {"lanczos_calls", r.lanczos_calls},
              {"certificate", r.certificate ? to_json(*r.certificate) : Json(nullptr)},
              {"domain_violations", r.domain_violations},
              {"assumption_violations", r.assumption_violations},
              {"outer_rounds", rounds},
              {"sampling", r.sampling ? to_json(*r.sampling) : Json(nullptr)},
              {"warnings", r.warnings},
              {"trace", trace}};
}

}  // namespace ncgopt

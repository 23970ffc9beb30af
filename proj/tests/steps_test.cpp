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

#include <numbers>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace ncgopt {
namespace {

using Eigen::Vector2d;
using testing::oracle_at;
using testing::uniform_point;
constexpr double kPi = std::numbers::pi;

double tol(double f) { return 1e-9 * (1.0 + std::abs(f)); }

TEST(NcgStep, CurvatureStepAtSaddle) {
  auto p = make_trig_problem({1.0, 1.0});
  const Vector x = Vector::Zero(2);
  Oracle o = oracle_at(p, x);
  CounterRng rng(1);
  const StepResult r = ncg_step(o, x, 0.01, 0.1, rng);
  EXPECT_EQ(r.kind, StepKind::Curvature);
  EXPECT_NEAR(r.rayleigh, -1.0, 1e-12);
  EXPECT_NEAR((r.x_next - x).norm(), 2.0, 1e-12);
  EXPECT_NEAR(r.predicted_decrease, 2.0 / 3.0, 1e-12);
  EXPECT_GE(r.observed_decrease, 2.0 / 3.0 - tol(2.0));
}

TEST(NcgStep, GradientStepOnFlatCurvature) {
  auto p = make_trig_problem({1.0, 1.0});
  const Vector x = Vector2d(kPi / 2, kPi / 2);
  Oracle o = oracle_at(p, x);
  CounterRng rng(2);
  const StepResult r = ncg_step(o, x, 0.01, 0.1, rng);
  EXPECT_EQ(r.kind, StepKind::Gradient);
  EXPECT_LE((r.x_next - Vector2d(kPi / 2 + 1, kPi / 2 + 1)).norm(), 1e-12);
  EXPECT_NEAR(r.predicted_decrease, 1.0, 1e-12);
}

TEST(NcgStep, TieAtLocalMinimumTakesGradientStep) {
  auto p = make_trig_problem({1.0, 1.0});
  const Vector x = Vector2d(kPi, kPi);
  Oracle o = oracle_at(p, x);
  CounterRng rng(3);
  const StepResult r = ncg_step(o, x, 0.01, 0.1, rng);
  EXPECT_EQ(r.kind, StepKind::Gradient);
  EXPECT_LE((r.x_next - x).norm(), 1e-15);
  EXPECT_GT(r.rayleigh, 0.0);
}

TEST(NcgStep, DivergentIterate) {
  auto p = make_trig_problem({1.0, 1.0});
  Oracle o(p, SmoothnessParams{1e-320, 1.0, 1.0, {}});
  CounterRng rng(4);
  EXPECT_THROW(ncg_step(o, Vector2d(kPi / 2, 0.0), 0.01, 0.1, rng), DivergenceError);
}

TEST(NcgStep, RejectsBadNoise) {
  auto p = make_trig_problem({1.0, 1.0});
  Oracle o = oracle_at(p, Vector::Zero(2));
  CounterRng rng(5);
  EXPECT_THROW(ncg_step(o, Vector::Zero(2), 0.0, 0.1, rng), ConfigError);
  EXPECT_THROW(ncg_step(o, Vector::Zero(2), 0.1, 0.0, rng), ConfigError);
}

// Decrease, branch, step-length and sign properties at random points.
class NcgStepProperties : public ::testing::TestWithParam<std::size_t> {};

TEST_P(NcgStepProperties, Hold) {
  auto p = testing::registered_problems()[GetParam()];
  CounterRng rng(40 + GetParam());
  for (int k = 0; k < 40; ++k) {
    const Vector x = uniform_point(rng, p->dim(), GetParam() == 0 ? 3.0 : 0.7);
    Oracle o = oracle_at(p, x);
    const SmoothnessParams& c = o.params();
    const double fx = o.value(x);
    const Vector g = o.gradient(x);
    const StepResult r = ncg_step(o, x, fx, g, 0.05, 0.1, rng);
    const double curv = ncg_curvature_payoff(r.rayleigh, c.l2);
    const double grad = gradient_payoff(g.norm(), c.l1);
    EXPECT_EQ(r.kind == StepKind::Curvature, curv > grad);
    EXPECT_DOUBLE_EQ(r.predicted_decrease, std::max(curv, grad));
    EXPECT_DOUBLE_EQ(r.observed_decrease, fx - p->value(r.x_next));
    if (p->in_domain(x) && p->in_domain(r.x_next)) {
      EXPECT_GE(r.observed_decrease, r.predicted_decrease - tol(fx));
    }
    if (r.kind == StepKind::Curvature) {
      EXPECT_NEAR((r.x_next - x).norm(), 2.0 * std::abs(r.rayleigh) / c.l2, 1e-12);
      EXPECT_GE((x - r.x_next).dot(g), 0.0);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(All, NcgStepProperties, ::testing::Values(0, 1, 2));

TEST(IhNcgStep, ExactSurrogateAtSaddle) {
  auto p = make_trig_problem({1.0, 1.0});
  const Vector x = Vector::Zero(2);
  Oracle o = oracle_at(p, x);
  CounterRng rng(6);
  const StepResult r = ih_ncg_step(o, exact_hessian(o, x), x, 0.01, 0.1, 0.5, rng);
  EXPECT_EQ(r.kind, StepKind::Curvature);
  EXPECT_NEAR((r.x_next - x).norm(), 0.5, 1e-12);
  EXPECT_NEAR(r.predicted_decrease, 0.125 - 5.0 * 0.125 / 24.0, 1e-12);
}

TEST(IhNcgStep, PositiveCurvatureTakesGradientStep) {
  auto p = make_trig_problem({1.0, 1.0});
  const Vector x = Vector2d(kPi - 1.0, kPi - 1.0);
  Oracle o = oracle_at(p, x);
  CounterRng rng(7);
  const StepResult r = ih_ncg_step(o, exact_hessian(o, x), x, 0.01, 0.1, 0.5, rng);
  EXPECT_GT(r.rayleigh, 0.0);
  EXPECT_EQ(r.kind, StepKind::Gradient);
}

TEST(IhNcgStep, DecreaseWithExactSurrogate) {
  auto p = make_trig_problem({1.0, 0.8, 0.6});
  CounterRng rng(8);
  const double eps2 = 0.3;
  for (int k = 0; k < 50; ++k) {
    const Vector x = uniform_point(rng, 3, 4.0);
    Oracle o = oracle_at(p, x);
    const StepResult r = ih_ncg_step(o, exact_hessian(o, x), x, 0.05, 0.1, eps2, rng);
    EXPECT_GE(r.observed_decrease, r.predicted_decrease - tol(r.f_before));
    if (r.kind == StepKind::Curvature) {
      EXPECT_NEAR((r.x_next - x).norm(), eps2 / o.params().l2, 1e-12);
      EXPECT_GE((x - r.x_next).dot(r.grad_used), 0.0);
    }
    const double curv = ih_curvature_payoff(r.rayleigh, eps2, o.params().l2);
    EXPECT_EQ(r.kind == StepKind::Curvature, curv > gradient_payoff(r.grad_used.norm(), o.params().l1));
  }
}

TEST(NcgSStep, FullBatchUsesExactGradient) {
  auto p = make_sigmoid_dataset(20, 4, 0.1, 3);
  CounterRng rng(9);
  const SampleSet all = SampleSet::full(20);
  for (int k = 0; k < 20; ++k) {
    const Vector x = uniform_point(rng, 4, 2.0);
    Oracle o = oracle_at(p, x);
    const StepResult r = ncg_s_step(o, x, all, all, 0.05, 0.1, 0.05, 0.3, rng);
    EXPECT_LE(testing::rel_err(r.grad_used, p->gradient(x)), 1e-12);
    const SmoothnessParams& c = o.params();
    const double curv = stochastic_curvature_payoff(r.rayleigh, 0.3, c.l2);
    const double grad = stochastic_gradient_payoff(r.grad_used.norm(), 0.05, c.l1);
    EXPECT_EQ(r.kind == StepKind::Curvature, curv > grad);
    EXPECT_GE(r.observed_decrease, std::max(curv, grad) - tol(r.f_before));
    if (r.kind == StepKind::Curvature) {
      EXPECT_NEAR((r.x_next - x).norm(), 0.3 / c.l2, 1e-12);
    }
  }
}

TEST(NcgSStep, GradientStepWherePositiveDefinite) {
  auto p = make_sigmoid_dataset(20, 5, 0.0, 11);
  CounterRng rng(10);
  const SampleSet all = SampleSet::full(20);
  int checked = 0;
  for (int k = 0; k < 400 && checked < 5; ++k) {
    const Vector x = uniform_point(rng, 5, 1.5);
    if (dense_min_eig(p->hessian(x)).lambda_min <= 0.0) continue;
    if (p->gradient(x).norm() < 0.05) continue;
    Oracle o = oracle_at(p, x);
    const StepResult r = ncg_s_step(o, x, all, all, 0.05, 0.1, 0.01, 0.3, rng);
    EXPECT_EQ(r.kind, StepKind::Gradient);
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(NcgSStep, Errors) {
  auto p = make_sigmoid_dataset(5, 2, 0.0, 1);
  Oracle o = oracle_at(p, Vector::Zero(2));
  CounterRng rng(11);
  EXPECT_THROW(ncg_s_step(o, Vector::Zero(2), SampleSet{}, SampleSet::full(5), 0.1, 0.1, 0.1, 0.1, rng),
               ConfigError);
  auto t = make_trig_problem({1.0, 1.0});
  Oracle ot = oracle_at(t, Vector::Zero(2));
  EXPECT_THROW(ncg_s_step(ot, Vector::Zero(2), SampleSet::full(1), SampleSet::full(1), 0.1, 0.1, 0.1,
                          0.1, rng),
               ConfigError);
}

TEST(Payoffs, Formulas) {
  EXPECT_DOUBLE_EQ(ncg_curvature_payoff(-3.0, 3.0), 2.0 * 27.0 / 27.0);
  EXPECT_EQ(ncg_curvature_payoff(0.5, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(gradient_payoff(2.0, 4.0), 0.5);
  EXPECT_DOUBLE_EQ(ih_curvature_payoff(-1.0, 1.0, 1.0), 0.5 - 5.0 / 24.0);
  EXPECT_DOUBLE_EQ(stochastic_curvature_payoff(-1.0, 1.0, 1.0), 0.5 - 11.0 / 48.0);
  EXPECT_DOUBLE_EQ(stochastic_gradient_payoff(1.0, 1.0, 1.0), 0.25 - 0.125);
}

}  // namespace
}  // namespace ncgopt

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

#include <algorithm>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace ncgopt {
namespace {

using testing::matrix_with_spectrum;

// Roots of det(H - t I) located by sign changes on a fine grid and refined by
// bisection. Independent of any eigen-decomposition code.
std::vector<double> charpoly_roots(const Matrix& h) {
  const Eigen::Index n = h.rows();
  auto det = [&](double t) {
    return Eigen::PartialPivLU<Matrix>(h - t * Matrix::Identity(n, n)).determinant();
  };
  const double r = h.norm() + 1.0;
  const int cells = 200000;
  std::vector<double> roots;
  double a = -r, fa = det(a);
  for (int k = 1; k <= cells; ++k) {
    const double b = -r + 2.0 * r * k / cells;
    const double fb = det(b);
    if ((fa < 0) != (fb < 0)) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = det(mid);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

TEST(DenseMinEig, ZeroMatrix) {
  EXPECT_EQ(dense_min_eig(Matrix::Zero(3, 3)).lambda_min, 0.0);
}

TEST(DenseMinEig, Diagonal) {
  const MinEigenPair p = dense_min_eig(Eigen::Vector3d(4.0, 1.0, -2.0).asDiagonal().toDenseMatrix());
  EXPECT_DOUBLE_EQ(p.lambda_min, -2.0);
  EXPECT_NEAR(std::abs(p.v[2]), 1.0, 1e-15);
  EXPECT_NEAR(p.v.head(2).norm(), 0.0, 1e-15);
}

TEST(DenseMinEig, MatchesCharacteristicPolynomial) {
  CounterRng rng(8);
  for (int trial = 0; trial < 3; ++trial) {
    Matrix g(8, 8);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
    const Matrix h = 0.5 * (g + g.transpose());
    const std::vector<double> roots = charpoly_roots(h);
    ASSERT_EQ(roots.size(), 8u);
    const SymmetricEigen es = symmetric_eigen(h);
    for (int i = 0; i < 8; ++i) EXPECT_NEAR(es.values[i], roots[i], 1e-9);
    EXPECT_NEAR(dense_min_eig(h).lambda_min, roots[0], 1e-9);
  }
}

TEST(DenseMinEig, RejectsAsymmetric) {
  Matrix h = Matrix::Identity(3, 3);
  h(0, 1) = 1e-6;
  EXPECT_THROW(dense_min_eig(h), InputError);
  h(0, 1) = 1e-11;
  EXPECT_NO_THROW(dense_min_eig(h));
  EXPECT_THROW(dense_min_eig(Matrix(2, 3)), InputError);
}

TEST(SymmetricEigen, DecompositionResidual) {
  CounterRng rng(9);
  Matrix g(30, 30);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
  const Matrix h = 0.5 * (g + g.transpose());
  const SymmetricEigen es = symmetric_eigen(h);
  EXPECT_LE((h * es.vectors - es.vectors * es.values.asDiagonal()).norm(), 1e-11 * h.norm());
  EXPECT_LE((es.vectors.transpose() * es.vectors - Matrix::Identity(30, 30)).norm(), 1e-12);
  EXPECT_TRUE(std::is_sorted(es.values.data(), es.values.data() + es.values.size()));
  const Eigen::SelfAdjointEigenSolver<Matrix> ref(h);
  EXPECT_LE((es.values - ref.eigenvalues()).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_NEAR(symmetric_spectral_norm(h), ref.eigenvalues().cwiseAbs().maxCoeff(), 1e-11);
}

TEST(TridiagonalEigen, MatchesReference) {
  CounterRng rng(10);
  const Vector d = rng.normal_vector(12);
  const Vector e = rng.normal_vector(11);
  Matrix t = d.asDiagonal();
  for (int i = 0; i < 11; ++i) t(i, i + 1) = t(i + 1, i) = e[i];
  const SymmetricEigen es = tridiagonal_eigen(d, e);
  const Eigen::SelfAdjointEigenSolver<Matrix> ref(t);
  EXPECT_LE((es.values - ref.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((t * es.vectors - es.vectors * es.values.asDiagonal()).norm(), 1e-12);
  EXPECT_THROW(tridiagonal_eigen(d, rng.normal_vector(3)), InputError);
}

LinearOperator dense_operator(const Matrix& h) {
  return [h](const Vector& v) -> Vector { return h * v; };
}

TEST(Lanczos, IdentityOperator) {
  CounterRng rng(1);
  const CurvatureEstimate est = lanczos_min_eig(dense_operator(Matrix::Identity(5, 5)), 5, 1.0, 0.1, 0.1, rng);
  EXPECT_NEAR(est.rayleigh, 1.0, 1e-14);
  EXPECT_TRUE(est.converged);
  EXPECT_EQ(est.hvp_spent, 1u);
}

TEST(Lanczos, SmallDiagonal) {
  const Matrix h = Eigen::Vector3d(2.0, -1.0, 0.5).asDiagonal();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterRng rng(seed);
    const CurvatureEstimate est = lanczos_min_eig(dense_operator(h), 3, 2.0, 0.01, 0.1, rng);
    EXPECT_GE(est.rayleigh, -1.0 - 1e-12);
    EXPECT_LE(est.rayleigh, -0.99);
  }
}

TEST(Lanczos, EstimateInvariants) {
  CounterRng mrng(2);
  Vector spectrum(40);
  for (int i = 0; i < 40; ++i) spectrum[i] = -1.0 + 2.0 * mrng.uniform();
  const Matrix h = matrix_with_spectrum(spectrum, mrng);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CounterRng rng(seed);
    Matrix basis;
    LanczosOptions opts;
    opts.basis_out = &basis;
    const CurvatureEstimate est = lanczos_min_eig(dense_operator(h), 40, 1.0, 0.01, 0.1, rng, opts);
    EXPECT_NEAR(est.v.norm(), 1.0, 1e-10);
    const double rq = est.v.dot(h * est.v);
    EXPECT_LE(std::abs(rq - est.rayleigh), 1e-10 * std::max(1.0, std::abs(rq)));
    EXPECT_LE(est.hvp_spent, est.budget);
    EXPECT_EQ(est.budget, lanczos_budget(40, 1.0, 0.01, 0.1));
    for (std::size_t k = 1; k < est.ritz_history.size(); ++k)
      EXPECT_LE(est.ritz_history[k], est.ritz_history[k - 1] + 1e-14);
    const Matrix gram = basis.transpose() * basis;
    EXPECT_LE((gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Lanczos, BudgetFormula) {
  // log(100 / 0.05^2) / (2 sqrt(0.1)) = 16.75...
  EXPECT_EQ(lanczos_budget(100, 1.0, 0.05, 0.05), 17u);
  EXPECT_EQ(lanczos_budget(5, 1.0, 0.05, 0.05), 5u);
  EXPECT_EQ(lanczos_budget(1, 1.0, 10.0, 0.9), 1u);
}

TEST(Lanczos, GuaranteeFrequency) {
  CounterRng mrng(3);
  Vector spectrum(100);
  for (int i = 0; i < 100; ++i) spectrum[i] = -1.0 + 2.0 * mrng.uniform();
  const Matrix h = matrix_with_spectrum(spectrum, mrng);
  const double lmin = spectrum.minCoeff();
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    CounterRng rng(seed);
    const CurvatureEstimate est = lanczos_min_eig(dense_operator(h), 100, 1.0, 0.05, 0.05, rng);
    if (est.rayleigh > lmin + 0.05) ++failures;
  }
  EXPECT_LE(failures, 10);
}

TEST(Lanczos, BreakdownOnInvariantSubspace) {
  Vector spectrum = Vector::Constant(10, 0.5);
  spectrum.head(5).setConstant(-0.5);
  CounterRng mrng(4);
  const Matrix h = matrix_with_spectrum(spectrum, mrng);
  CounterRng rng(5);
  LanczosOptions opts;
  opts.early_exit = false;
  const CurvatureEstimate est = lanczos_min_eig(dense_operator(h), 10, 1.0, 1e-6, 0.1, rng, opts);
  EXPECT_TRUE(est.converged);
  EXPECT_LE(est.hvp_spent, 3u);
  EXPECT_NEAR(est.rayleigh, -0.5, 1e-12);
}

TEST(Lanczos, Errors) {
  CounterRng rng(0);
  const auto op = dense_operator(Matrix::Identity(3, 3));
  EXPECT_THROW(lanczos_min_eig(op, 3, 1.0, 0.0, 0.1, rng), ConfigError);
  EXPECT_THROW(lanczos_min_eig(op, 3, 1.0, 0.1, 1.0, rng), ConfigError);
  EXPECT_THROW(lanczos_min_eig(op, 3, 0.0, 0.1, 0.1, rng), ConfigError);
  const LinearOperator bad = [](const Vector& v) -> Vector { return v * std::nan(""); };
  EXPECT_THROW(lanczos_min_eig(bad, 3, 1.0, 0.1, 0.1, rng), OracleError);
}

}  // namespace
}  // namespace ncgopt

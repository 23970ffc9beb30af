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

// Built-in test problems.

#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "ncgopt/core/problem.hpp"

namespace ncgopt {

/// f(x) = 1/2 x'Ax + b'x with symmetric A. Mostly a test fixture.
class QuadraticProblem final : public Problem {
 public:
  QuadraticProblem(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.rows() != a_.cols() || a_.rows() != b_.size() || a_.rows() == 0)
      throw ConfigError("quadratic: dimension mismatch");
    if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw ConfigError("quadratic: A must be symmetric");
  }
  explicit QuadraticProblem(Matrix a) : QuadraticProblem(a, Vector::Zero(a.rows())) {}

  std::string name() const override { return "quadratic"; }
  Eigen::Index dim() const override { return a_.rows(); }
  double value(const Vector& x) const override { return 0.5 * x.dot(a_ * x) + b_.dot(x); }
  Vector gradient(const Vector& x) const override { return a_ * x + b_; }
  Vector hvp(const Vector&, const Vector& v) const override { return a_ * v; }
  Matrix hessian(const Vector&) const override { return a_; }
  SmoothnessParams base_params() const override {
    SmoothnessParams p;
    p.l1 = std::max(a_.cwiseAbs().rowwise().sum().maxCoeff(), 1e-12);
    p.l2 = 1e-12;  // constant Hessian
    return p;
  }

 private:
  Matrix a_;
  Vector b_;
};

/// f(x) = sum_i c_i cos(x_i). Separable, with stationary points on the grid
/// {0, pi}^d (mod 2 pi) whose Hessian signs are known in closed form.
class TrigProblem final : public Problem {
 public:
  explicit TrigProblem(std::vector<double> amplitudes) {
    if (amplitudes.empty()) throw ConfigError("trig: amplitudes must be nonempty");
    c_ = Eigen::Map<const Vector>(amplitudes.data(), static_cast<Eigen::Index>(amplitudes.size()));
    if (!c_.allFinite() || (c_.array() == 0.0).any())
      throw ConfigError("trig: amplitudes must be finite and nonzero");
  }

  std::string name() const override { return "trig"; }
  Eigen::Index dim() const override { return c_.size(); }
  const Vector& amplitudes() const { return c_; }

  double value(const Vector& x) const override { return c_.dot(x.array().cos().matrix()); }
  Vector gradient(const Vector& x) const override {
    return -(c_.array() * x.array().sin()).matrix();
  }
  Vector hvp(const Vector& x, const Vector& v) const override {
    return -(c_.array() * x.array().cos() * v.array()).matrix();
  }
  Matrix hessian(const Vector& x) const override {
    return Vector(-(c_.array() * x.array().cos())).asDiagonal();
  }

  /// |d^2 f| and |d^3 f| are both bounded by max |c_i|.
  SmoothnessParams base_params() const override {
    SmoothnessParams p;
    p.l1 = p.l2 = c_.cwiseAbs().maxCoeff();
    return p;
  }
  std::optional<double> known_minimum() const override { return -c_.cwiseAbs().sum(); }

 private:
  Vector c_;
};

/// Symmetric low-rank factorization f(U) = 1/2 ||UU' - M||_F^2 over
/// U in R^{d x r}, flattened column-major into a point of dimension d*r.
/// The smoothness constants L1 = 8T and L2 = 12 sqrt(T) hold on the region
/// ||U||_2^2 <= T.
class MatFacProblem final : public Problem {
 public:
  MatFacProblem(Matrix m, Eigen::Index rank, std::optional<double> domain_cap = std::nullopt)
      : m_(std::move(m)), rank_(rank) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) throw ConfigError("matfac: M must be square");
    if (!m_.allFinite()) throw ConfigError("matfac: M must be finite");
    if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, m_.cwiseAbs().maxCoeff()))
      throw ConfigError("matfac: M must be symmetric");
    if (rank_ < 1 || rank_ > m_.rows()) throw ConfigError("matfac: rank must be in [1, d]");
    const Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    sigma1_ = es.eigenvalues().cwiseAbs().maxCoeff();
    const double tol = 1e-9 * std::max(1.0, sigma1_);
    if (es.eigenvalues().minCoeff() < -tol) throw ConfigError("matfac: M must be PSD");
    // Minimum of f is half the squared tail of the spectrum beyond the top r.
    const Vector eig = es.eigenvalues();  // ascending
    double tail = 0.0;
    for (Eigen::Index i = 0; i < eig.size() - rank_; ++i) tail += eig[i] * eig[i];
    minimum_ = 0.5 * tail;
    cap_ = domain_cap.value_or(2.0 * sigma1_);
    if (!(cap_ > 0.0)) throw ConfigError("matfac: domain cap must be positive");
  }

  std::string name() const override { return "matfac"; }
  Eigen::Index dim() const override { return m_.rows() * rank_; }
  Eigen::Index rows() const { return m_.rows(); }
  Eigen::Index rank() const { return rank_; }
  double domain_cap() const { return cap_; }
  const Matrix& target() const { return m_; }

  double value(const Vector& x) const override {
    const auto u = as_matrix(x);
    return 0.5 * (u * u.transpose() - m_).squaredNorm();
  }
  Vector gradient(const Vector& x) const override {
    const auto u = as_matrix(x);
    const Matrix g = 2.0 * (u * u.transpose() - m_) * u;
    return Eigen::Map<const Vector>(g.data(), g.size());
  }
  Vector hvp(const Vector& x, const Vector& v) const override {
    const auto u = as_matrix(x);
    const auto w = as_matrix(v);
    const Matrix r = u * u.transpose() - m_;
    const Matrix h = 2.0 * (w * u.transpose() + u * w.transpose()) * u + 2.0 * r * w;
    return Eigen::Map<const Vector>(h.data(), h.size());
  }

  SmoothnessParams base_params() const override {
    SmoothnessParams p;
    p.l1 = 8.0 * cap_;
    p.l2 = 12.0 * std::sqrt(cap_);
    return p;
  }
  std::optional<double> known_minimum() const override { return minimum_; }

  /// ||U||_2^2 <= T.
  bool in_domain(const Vector& x) const override {
    const Matrix u = as_matrix(x);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(u.transpose() * u, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff() <= cap_;
  }

 private:
  Eigen::Map<const Matrix> as_matrix(const Vector& x) const {
    if (x.size() != dim()) throw ConfigError("matfac: point has wrong dimension");
    return {x.data(), m_.rows(), rank_};
  }

  Matrix m_;
  Eigen::Index rank_;
  double sigma1_ = 0.0;
  double cap_ = 0.0;
  double minimum_ = 0.0;
};

/// Nonconvex finite sum f(x) = (1/n) sum_i s(y_i a_i'x) with the sigmoid
/// loss s(t) = 1 / (1 + e^t) and labels y_i in {-1, +1}.
///
/// With p = s(1 - s): s' = -p, s'' = p(1 - 2s), s''' = p(6p - 1), so
/// |s'| <= 1/4, |s''| <= 1/(6 sqrt 3) and |s'''| <= 1/8.
class SigmoidSumProblem final : public Problem {
 public:
  SigmoidSumProblem(Matrix features, Vector labels)
      : a_(std::move(features)), y_(std::move(labels)) {
    if (a_.rows() == 0 || a_.cols() == 0) throw ConfigError("finitesum-sigmoid: empty data");
    if (y_.size() != a_.rows()) throw ConfigError("finitesum-sigmoid: label count mismatch");
    if (!a_.allFinite()) throw ConfigError("finitesum-sigmoid: features must be finite");
    for (Eigen::Index i = 0; i < y_.size(); ++i)
      if (y_[i] != 1.0 && y_[i] != -1.0) throw ConfigError("finitesum-sigmoid: labels must be +-1");
    max_norm_ = a_.rowwise().norm().maxCoeff();
  }

  std::string name() const override { return "finitesum-sigmoid"; }
  Eigen::Index dim() const override { return a_.cols(); }
  std::size_t n_components() const override { return static_cast<std::size_t>(a_.rows()); }
  const Matrix& features() const { return a_; }
  const Vector& labels() const { return y_; }

  double value(const Vector& x) const override {
    const Vector t = y_.cwiseProduct(a_ * x);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) acc += loss(t[i]);
    return acc / static_cast<double>(t.size());
  }
  Vector gradient(const Vector& x) const override {
    const Vector t = y_.cwiseProduct(a_ * x);
    Vector w(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) w[i] = y_[i] * d1(t[i]);
    return a_.transpose() * w / static_cast<double>(t.size());
  }
  Vector hvp(const Vector& x, const Vector& v) const override {
    const Vector t = y_.cwiseProduct(a_ * x);
    const Vector av = a_ * v;
    Vector w(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) w[i] = d2(t[i]) * av[i];
    return a_.transpose() * w / static_cast<double>(t.size());
  }
  Matrix hessian(const Vector& x) const override {
    const Vector t = y_.cwiseProduct(a_ * x);
    Vector w(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) w[i] = d2(t[i]);
    return a_.transpose() * w.asDiagonal() * a_ / static_cast<double>(t.size());
  }

  double component_value(std::size_t i, const Vector& x) const override {
    return loss(margin(i, x));
  }
  Vector component_gradient(std::size_t i, const Vector& x) const override {
    const auto k = static_cast<Eigen::Index>(i);
    return (y_[k] * d1(margin(i, x))) * a_.row(k).transpose();
  }
  Vector component_hvp(std::size_t i, const Vector& x, const Vector& v) const override {
    const auto k = static_cast<Eigen::Index>(i);
    return (d2(margin(i, x)) * a_.row(k).dot(v)) * a_.row(k).transpose();
  }
  Matrix component_hessian(std::size_t i, const Vector& x) const override {
    const auto k = static_cast<Eigen::Index>(i);
    return d2(margin(i, x)) * a_.row(k).transpose() * a_.row(k);
  }

  SmoothnessParams base_params() const override {
    const double r = std::max(max_norm_, 1e-12);
    SmoothnessParams p;
    p.l1 = r * r / (6.0 * std::sqrt(3.0));
    p.l2 = r * r * r / 8.0;
    // ||grad f_i - grad f|| <= 2 * r / 4 almost surely.
    p.g_bound = r / 2.0;
    return p;
  }
  std::optional<double> lower_bound() const override { return 0.0; }

  static double loss(double t) { return 1.0 / (1.0 + std::exp(t)); }
  static double d1(double t) {
    const double s = loss(t);
    return -s * (1.0 - s);
  }
  static double d2(double t) {
    const double s = loss(t);
    return s * (1.0 - s) * (1.0 - 2.0 * s);
  }

 private:
  double margin(std::size_t i, const Vector& x) const {
    const auto k = static_cast<Eigen::Index>(i);
    return y_[k] * a_.row(k).dot(x);
  }

  Matrix a_;
  Vector y_;
  double max_norm_ = 0.0;
};

}  // namespace ncgopt

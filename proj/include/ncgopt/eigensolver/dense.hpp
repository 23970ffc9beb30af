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

// Dense symmetric eigensolver: Householder reduction to tridiagonal form
// followed by the implicit-shift QL iteration, both accumulating the
// orthogonal transforms so eigenvectors come out alongside eigenvalues.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "ncgopt/core/types.hpp"

namespace ncgopt {

/// Eigenvalues in ascending order; column j of `vectors` is a unit
/// eigenvector for `values[j]`.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

struct MinEigenPair {
  double lambda_min = 0.0;
  Point v;
};

namespace detail {

// Implicit QL on the tridiagonal (d, e), e[i] coupling rows i-1 and i with
// e[0] unused. `z` enters holding the transform to the tridiagonal basis.
inline void tridiagonal_ql(Vector& d, Vector& e, Matrix& z) {
  const Eigen::Index n = d.size();
  if (n == 0) return;
  for (Eigen::Index i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  constexpr double kEps = std::numeric_limits<double>::epsilon();
  constexpr int kMaxSweeps = 64;
  double f = 0.0;
  double tst1 = 0.0;
  for (Eigen::Index l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    Eigen::Index m = l;
    while (m < n - 1 && std::abs(e[m]) > kEps * tst1) ++m;

    if (m > l) {
      int sweeps = 0;
      do {
        if (++sweeps > kMaxSweeps) throw InputError("tridiagonal QL failed to converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (Eigen::Index i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (Eigen::Index i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          for (Eigen::Index k = 0; k < z.rows(); ++k) {
            h = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * h;
            z(k, i) = c * z(k, i) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > kEps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

// Householder reduction of the symmetric matrix held in `v` to tridiagonal
// (d, e); `v` is overwritten with the accumulated orthogonal transform.
inline void householder_tridiagonalize(Matrix& v, Vector& d, Vector& e) {
  const Eigen::Index n = v.rows();
  d.resize(n);
  e.setZero(n);
  for (Eigen::Index j = 0; j < n; ++j) d[j] = v(n - 1, j);

  for (Eigen::Index i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (Eigen::Index k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (Eigen::Index j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (Eigen::Index k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (Eigen::Index j = 0; j < i; ++j) e[j] = 0.0;

      for (Eigen::Index j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (Eigen::Index k = j + 1; k <= i - 1; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (Eigen::Index j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (Eigen::Index j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (Eigen::Index j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (Eigen::Index k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (Eigen::Index i = 0; i < n - 1; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (Eigen::Index k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (Eigen::Index j = 0; j <= i; ++j) {
        double g = 0.0;
        for (Eigen::Index k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (Eigen::Index k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (Eigen::Index k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

inline SymmetricEigen sorted(Vector d, const Matrix& z) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return d[a] < d[b]; });
  SymmetricEigen out;
  out.values.resize(d.size());
  out.vectors.resize(z.rows(), d.size());
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    out.values[j] = d[order[static_cast<std::size_t>(j)]];
    out.vectors.col(j) = z.col(order[static_cast<std::size_t>(j)]);
  }
  return out;
}

}  // namespace detail

/// Full eigendecomposition of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `offdiag` (length n - 1).
inline SymmetricEigen tridiagonal_eigen(const Vector& diag, const Vector& offdiag) {
  const Eigen::Index n = diag.size();
  if (n == 0) throw InputError("empty tridiagonal matrix");
  if (offdiag.size() != n - 1) throw InputError("off-diagonal must have length n - 1");
  Vector d = diag;
  Vector e = Vector::Zero(n);
  for (Eigen::Index i = 1; i < n; ++i) e[i] = offdiag[i - 1];
  Matrix z = Matrix::Identity(n, n);
  detail::tridiagonal_ql(d, e, z);
  return detail::sorted(std::move(d), z);
}

inline void check_symmetric(const Matrix& h, double tol = 1e-10) {
  if (h.rows() != h.cols() || h.rows() == 0) throw InputError("matrix must be square and nonempty");
  if (!h.allFinite()) throw InputError("matrix is not finite");
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > tol) throw InputError("matrix is not symmetric");
}

/// Full eigendecomposition of a symmetric matrix. Asymmetry beyond 1e-10
/// (absolute) is rejected with InputError.
inline SymmetricEigen symmetric_eigen(const Matrix& h) {
  check_symmetric(h);
  Matrix v = 0.5 * (h + h.transpose());
  Vector d, e;
  detail::householder_tridiagonalize(v, d, e);
  detail::tridiagonal_ql(d, e, v);
  return detail::sorted(std::move(d), v);
}

inline MinEigenPair dense_min_eig(const Matrix& h) {
  SymmetricEigen es = symmetric_eigen(h);
  return {es.values[0], es.vectors.col(0).normalized()};
}

/// ||h||_2 for symmetric h.
inline double symmetric_spectral_norm(const Matrix& h) {
  const SymmetricEigen es = symmetric_eigen(h);
  return std::max(std::abs(es.values[0]), std::abs(es.values[es.values.size() - 1]));
}

}  // namespace ncgopt

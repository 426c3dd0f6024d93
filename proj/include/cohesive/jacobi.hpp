#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cohesive {

inline constexpr std::size_t kDefaultEigenSizeCap = 256;

struct EigenDecomposition {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // column j pairs with values[j]
};

namespace detail {

inline double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double sum = 0.0;
  const auto n = a.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

// Applies the rotation that annihilates a(p, q), updating a in place and
// accumulating it into v.
inline void jacobi_rotate(Eigen::MatrixXd& a, Eigen::MatrixXd& v,
                          Eigen::Index p, Eigen::Index q) {
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const auto n = a.rows();

  for (Eigen::Index k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  // Exact zero and exact symmetry on the rotated pair.
  a(p, q) = 0.0;
  a(q, p) = 0.0;

  for (Eigen::Index k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace detail

/// Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps stop once the off-diagonal Frobenius norm drops below
/// 1e-12 * ||A||_F. Eigenvalues come back ascending; each eigenvector is
/// sign-normalized so its largest-magnitude component is positive, which
/// keeps the output deterministic.
inline EigenDecomposition eigen_decompose(
    const Eigen::MatrixXd& matrix,
    std::size_t size_cap = kDefaultEigenSizeCap) {
  if (matrix.rows() != matrix.cols()) {
    throw std::invalid_argument("eigen_decompose: matrix is not square");
  }
  const auto n = matrix.rows();
  if (static_cast<std::size_t>(n) > size_cap) {
    throw std::invalid_argument("eigen_decompose: size " + std::to_string(n) +
                                " exceeds cap " + std::to_string(size_cap));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (matrix(i, j) != matrix(j, i)) {
        throw std::invalid_argument("eigen_decompose: matrix is not symmetric");
      }
    }
  }
  if (!matrix.allFinite()) {
    throw std::invalid_argument("eigen_decompose: non-finite entry");
  }

  Eigen::MatrixXd a = matrix;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = matrix.norm();
  const double tolerance = 1e-12 * scale;
  constexpr int kMaxSweeps = 100;

  int sweep = 0;
  while (detail::off_diagonal_norm(a) > tolerance) {
    if (++sweep > kMaxSweeps) {
      throw std::runtime_error("eigen_decompose: no convergence after " +
                               std::to_string(kMaxSweeps) + " sweeps");
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) != 0.0) detail::jacobi_rotate(a, v, p, q);
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index l, Eigen::Index r) { return a(l, l) < a(r, r); });

  EigenDecomposition out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto src = order[static_cast<std::size_t>(j)];
    out.values(j) = a(src, src);
    Eigen::VectorXd col = v.col(src);
    Eigen::Index peak = 0;
    col.cwiseAbs().maxCoeff(&peak);
    if (col(peak) < 0.0) col = -col;
    out.vectors.col(j) = col;
  }
  return out;
}

}  // namespace cohesive

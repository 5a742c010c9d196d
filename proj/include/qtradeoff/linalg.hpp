// Small dense complex linear algebra: Hermitian eigendecomposition by
// cyclic Jacobi rotations, plus a few helpers shared by the other headers.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qtradeoff {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

struct HermitianEigen {
  RVector values;   // ascending
  CMatrix vectors;  // column k is the eigenvector of values[k]
};

namespace detail {

inline double off_diagonal_norm2(const CMatrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += std::norm(a(i, j));
  return s;
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix by the cyclic Jacobi method.
///
/// Each rotation first removes the phase of the pivot a(p,q) with a diagonal
/// unitary, then applies a real Givens rotation. Sweeps stop when the
/// off-diagonal Frobenius mass falls below (1e-15 * ||A||_F)^2.
inline HermitianEigen jacobi_eigen(const CMatrix& input, int max_sweeps = 60) {
  const Eigen::Index n = input.rows();
  if (n != input.cols()) throw std::invalid_argument("jacobi_eigen: matrix not square");

  CMatrix a = 0.5 * (input + input.adjoint());
  CMatrix v = CMatrix::Identity(n, n);
  const double scale = std::max(a.norm(), 1e-300);
  const double threshold = (1e-15 * scale) * (1e-15 * scale);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (detail::off_diagonal_norm2(a) <= threshold) break;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const cplx g = a(p, q);
        const double r = std::abs(g);
        if (r <= 1e-300) continue;
        const cplx phase = g / r;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // U restricted to the (p,q) plane: columns u_p = (c, -s conj(phase)),
        // u_q = (s, c conj(phase)).
        const cplx u_pp = c;
        const cplx u_pq = s;
        const cplx u_qp = -s * std::conj(phase);
        const cplx u_qq = c * std::conj(phase);

        // A <- A U (columns p, q)
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = akp * u_pp + akq * u_qp;
          a(k, q) = akp * u_pq + akq * u_qq;
        }
        // A <- U^H A (rows p, q)
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = std::conj(u_pp) * apk + std::conj(u_qp) * aqk;
          a(q, k) = std::conj(u_pq) * apk + std::conj(u_qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = vkp * u_pp + vkq * u_qp;
          v(k, q) = vkp * u_pq + vkq * u_qq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });

  HermitianEigen out{RVector(n), CMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]).real();
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

inline RVector jacobi_eigenvalues(const CMatrix& input) { return jacobi_eigen(input).values; }

/// Kronecker product of two complex matrices (or vectors as one-column matrices).
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline bool is_hermitian(const CMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_unitary(const CMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace qtradeoff

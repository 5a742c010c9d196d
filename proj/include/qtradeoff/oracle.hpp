// Brute-force reference values: exhaustive search over encoding kernels
// on a row-wise grid, and closed-form / library eigensolvers used to check
// the Jacobi routine.
#pragma once

#include "qtradeoff/errors.hpp"
#include "qtradeoff/qcore.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace qtradeoff {

struct BruteForceOptions {
  int max_outputs = 0;  // J_max; 0 means m + 1
  int steps = 200;
  double slack = -1.0;  // rate slack; negative means 1/steps
  double budget = 1e9;  // kernels examined
};

namespace detail {

/// Compositions of `steps` into `parts` nonnegative integers.
inline std::vector<std::vector<int>> compositions(int steps, int parts) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(static_cast<std::size_t>(parts), 0);
  const std::function<void(int, int)> rec = [&](int pos, int rem) {
    if (pos == parts - 1) {
      c[static_cast<std::size_t>(pos)] = rem;
      out.push_back(c);
      return;
    }
    for (int v = 0; v <= rem; ++v) {
      c[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, rem - v);
    }
  };
  rec(0, steps);
  return out;
}

/// Exhaustive search shared by the M and N oracles. A kernel assigns every
/// row i a composition c_i of `steps`, p(j|i) = c_ij / steps. Each output
/// column contributes q_j S(f(q(.|j))) to S(A:B|C) and q_j H(q(.|j)) to
/// H(A|C), and both depend only on the column (c_1j, ..., c_mj); they are
/// tabulated once per column value.
inline std::vector<double> brute_force(const Ensemble& e, const std::vector<double>& rates, bool total_rate,
                                       const BruteForceOptions& opt) {
  const int m = e.size();
  const int nj = opt.max_outputs > 0 ? opt.max_outputs : m + 1;
  const int steps = opt.steps;
  if (m > 3) throw InvalidInput("brute force oracle supports at most 3 states");
  if (nj < 1 || nj > 4) throw InvalidInput("brute force oracle supports 1 to 4 output symbols");
  if (steps < 1) throw InvalidInput("brute force oracle needs steps >= 1");
  double per_row = 1.0;  // C(steps + nj - 1, nj - 1)
  for (int i = 1; i < nj; ++i) per_row = per_row * (steps + i) / i;
  const double kernels = std::pow(per_row, m);
  const double table = std::pow(steps + 1.0, m);
  if (kernels > opt.budget || table > 5e7)
    throw BudgetExceeded("brute force oracle: " + std::to_string(kernels) + " kernels exceed the budget");

  const double slack = opt.slack >= 0.0 ? opt.slack : 1.0 / steps;
  const double hp = shannon_entropy(e.probs());

  // column tables indexed by sum_i c_i (steps+1)^(m-1-i)
  const auto size = static_cast<std::size_t>(table);
  std::vector<double> tchi(size, 0.0), th(size, 0.0);
  std::vector<int> c(static_cast<std::size_t>(m), 0);
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t r = idx;
    for (int i = m - 1; i >= 0; --i) {
      c[static_cast<std::size_t>(i)] = static_cast<int>(r % static_cast<std::size_t>(steps + 1));
      r /= static_cast<std::size_t>(steps + 1);
    }
    double q = 0.0;
    std::vector<double> w(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      w[static_cast<std::size_t>(i)] = e.prob(i) * c[static_cast<std::size_t>(i)] / steps;
      q += w[static_cast<std::size_t>(i)];
    }
    if (q <= 0.0) continue;
    for (double& x : w) x /= q;
    tchi[idx] = q * spectrum_entropy(mixture(e.states(), w));
    th[idx] = q * shannon_entropy(w);
  }

  const auto comps = compositions(steps, nj);
  std::vector<double> best(rates.size(), std::numeric_limits<double>::infinity());
  std::vector<std::size_t> partial(static_cast<std::size_t>(nj), 0);
  const std::function<void(int)> rec = [&](int row) {
    if (row == m - 1) {
      for (const auto& last : comps) {
        double chi = 0.0, h = 0.0;
        for (int j = 0; j < nj; ++j) {
          const std::size_t idx = partial[static_cast<std::size_t>(j)] * static_cast<std::size_t>(steps + 1) + static_cast<std::size_t>(last[static_cast<std::size_t>(j)]);
          chi += tchi[idx];
          h += th[idx];
        }
        const double rate = hp - h + (total_rate ? chi : 0.0);
        for (std::size_t k = 0; k < rates.size(); ++k)
          if (rate <= rates[k] + slack && chi < best[k]) best[k] = chi;
      }
      return;
    }
    const std::vector<std::size_t> saved = partial;
    for (const auto& comp : comps) {
      for (int j = 0; j < nj; ++j)
        partial[static_cast<std::size_t>(j)] = saved[static_cast<std::size_t>(j)] * static_cast<std::size_t>(steps + 1) + static_cast<std::size_t>(comp[static_cast<std::size_t>(j)]);
      rec(row + 1);
    }
    partial = saved;
  };
  rec(0);
  return best;
}

}  // namespace detail

/// min S(A:B|C) over grid kernels with S(A:C) <= R + slack, for each R.
inline std::vector<double> brute_force_M(const Ensemble& e, const std::vector<double>& rates, const BruteForceOptions& opt = {}) {
  return detail::brute_force(e, rates, false, opt);
}

inline double brute_force_M(const Ensemble& e, double rate, const BruteForceOptions& opt = {}) {
  return brute_force_M(e, std::vector<double>{rate}, opt).front();
}

/// min S(A:B|C) over grid kernels with S(A:BC) <= R + slack, for each R
/// (infinity where no grid kernel qualifies).
inline std::vector<double> brute_force_N(const Ensemble& e, const std::vector<double>& rates, const BruteForceOptions& opt = {}) {
  return detail::brute_force(e, rates, true, opt);
}

inline double brute_force_N(const Ensemble& e, double rate, const BruteForceOptions& opt = {}) {
  return brute_force_N(e, std::vector<double>{rate}, opt).front();
}

/// Closed-form eigenpairs of a 2x2 Hermitian matrix, ascending.
inline HermitianEigen eig2(const CMatrix& a) {
  if (a.rows() != 2 || a.cols() != 2 || !is_hermitian(a, 1e-12)) throw InvalidInput("eig2: need a 2x2 Hermitian matrix");
  const double p = a(0, 0).real();
  const double s = a(1, 1).real();
  const cplx b = a(0, 1);
  const double mean = 0.5 * (p + s);
  const double rad = std::hypot(0.5 * (p - s), std::abs(b));
  HermitianEigen out;
  out.values = RVector(2);
  out.values << mean - rad, mean + rad;
  out.vectors = CMatrix(2, 2);
  if (std::abs(b) <= 1e-300) {
    if (p <= s) out.vectors << 1.0, 0.0, 0.0, 1.0;
    else out.vectors << 0.0, 1.0, 1.0, 0.0;
    return out;
  }
  for (int k = 0; k < 2; ++k) {
    // (A - l) v = 0  with  v = (b, l - p)
    CVector v(2);
    v << b, out.values[k] - p;
    if (v.norm() < 1e-150) v << out.values[k] - s, std::conj(b);
    out.vectors.col(k) = v.normalized();
  }
  return out;
}

/// Eigenpairs from Eigen's self-adjoint solver, ascending.
inline HermitianEigen eig_small(const CMatrix& a) {
  if (a.rows() != a.cols() || !is_hermitian(a, 1e-12)) throw InvalidInput("eig_small: need a Hermitian matrix");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace qtradeoff

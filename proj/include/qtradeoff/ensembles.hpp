// Named example sources and random ensemble generators.
#pragma once

#include "qtradeoff/qcore.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace qtradeoff {

/// Uniform double in [0,1) from the top 53 bits; independent of the
/// standard library's distribution implementations.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double standard_normal(std::mt19937_64& rng) {
  // Box-Muller; one variate per call keeps the stream position predictable.
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline PureState basis_state(int d, int k) {
  CVector v = CVector::Zero(d);
  v[k] = 1.0;
  return PureState(v);
}

inline PureState real_qubit(double angle) {
  CVector v(2);
  v << std::cos(angle), std::sin(angle);
  return PureState(v);
}

/// Qubit state with Bloch vector (sin t cos f, sin t sin f, cos t).
inline PureState bloch_state(double theta, double phi) {
  CVector v(2);
  v << std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), phi);
  return PureState::normalized(v);
}

/// {|0>, |+>} with equal weights.
inline Ensemble pair_ensemble() {
  return Ensemble::uniform({basis_state(2, 0), real_qubit(std::numbers::pi / 4.0)});
}

/// {|0>, (|0>+|1>)/sqrt 2, |2>} with equal weights.
inline Ensemble three_state_ensemble() {
  CVector plus = CVector::Zero(3);
  plus[0] = plus[1] = 1.0 / std::sqrt(2.0);
  return Ensemble::uniform({basis_state(3, 0), PureState::normalized(plus), basis_state(3, 2)});
}

/// |0>, cos t|0> + sin t|1>, |1>, -sin t|0> + cos t|1>, each with weight 1/4.
inline Ensemble bb84_ensemble(double theta) {
  return Ensemble::uniform({real_qubit(0.0), real_qubit(theta), real_qubit(std::numbers::pi / 2.0),
                            real_qubit(std::numbers::pi / 2.0 + theta)});
}

/// k orthonormal basis states of C^k with the given weights (uniform if empty).
inline Ensemble orthonormal_ensemble(int k, std::vector<double> probs = {}) {
  std::vector<PureState> s;
  for (int i = 0; i < k; ++i) s.push_back(basis_state(k, i));
  if (probs.empty()) return Ensemble::uniform(std::move(s));
  return Ensemble(std::move(s), std::move(probs));
}

/// E1 (x) E2: states |phi_i>|psi_j>, weights p_i q_j, label index i * m2 + j.
inline Ensemble tensor_product(const Ensemble& a, const Ensemble& b) {
  std::vector<PureState> s;
  std::vector<double> p;
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j) {
      const CMatrix v = kron(a.state(i).amplitudes(), b.state(j).amplitudes());
      s.push_back(PureState::normalized(v.col(0)));
      p.push_back(a.prob(i) * b.prob(j));
    }
  double total = 0.0;
  for (double x : p) total += x;
  for (double& x : p) x /= total;
  return Ensemble(std::move(s), std::move(p));
}

inline PureState random_state(int d, std::mt19937_64& rng) {
  CVector v(d);
  for (int k = 0; k < d; ++k) v[k] = cplx(standard_normal(rng), standard_normal(rng));
  return PureState::normalized(v);
}

/// Point on the probability simplex, uniform (Dirichlet(1)) distribution.
inline std::vector<double> random_distribution(int m, std::mt19937_64& rng) {
  std::vector<double> p(static_cast<std::size_t>(m));
  double total = 0.0;
  for (double& x : p) {
    double u = uniform01(rng);
    while (u <= 0.0) u = uniform01(rng);
    x = -std::log(u);
    total += x;
  }
  for (double& x : p) x /= total;
  return p;
}

/// m Haar-random states in C^d with a Dirichlet(1) prior.
inline Ensemble random_ensemble(int m, int d, std::mt19937_64& rng) {
  std::vector<PureState> s;
  for (int i = 0; i < m; ++i) s.push_back(random_state(d, rng));
  return Ensemble(std::move(s), random_distribution(m, rng));
}

}  // namespace qtradeoff

// The unitarily invariant qubit source: closed-form trade-off curve and
// finite Bloch-sphere discretizations used to cross-check it.
#pragma once

#include "qtradeoff/ensembles.hpp"
#include "qtradeoff/errors.hpp"
#include "qtradeoff/qcore.hpp"
#include "qtradeoff/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace qtradeoff {

struct RatePair {
  double rate = 0.0;     // R, classical bits
  double quantum = 0.0;  // Q, qubits
};

/// Point on the uniform-qubit trade-off curve for parameter lambda > 0.
///
/// Posteriors are von Mises-Fisher caps with concentration lambda. The rate
/// is their relative entropy to the uniform measure,
///   lambda/(e^lambda - 1) - 1 + ln(lambda e^lambda / (e^lambda - 1))  [nats],
/// converted to bits; the quantum part is H2(1/lambda - 1/(e^lambda - 1)),
/// the entropy of the cap's average state.
inline RatePair devetak_berger(double lambda) {
  if (!(lambda > 0.0)) throw InvalidInput("devetak_berger: lambda must be positive");
  // expm1 keeps the small-lambda end accurate.
  const double em1 = std::expm1(lambda);
  double nats;
  double minor;  // 1/lambda - 1/(e^lambda - 1)
  if (lambda < 1e-4) {
    // series: R ~ lambda^2/24 nats, minor ~ 1/2 - lambda/12
    nats = lambda * lambda / 24.0;
    minor = 0.5 - lambda / 12.0 + std::pow(lambda, 3) / 720.0;
  } else {
    // lambda - ln(e^lambda - 1) = -ln(1 - e^-lambda), finite for large lambda
    nats = lambda / em1 - 1.0 + std::log(lambda) - std::log(-std::expm1(-lambda));
    minor = 1.0 / lambda - 1.0 / em1;
  }
  minor = std::clamp(minor, 0.0, 0.5);
  return {nats / std::numbers::ln2, binary_entropy(minor)};
}

/// devetak_berger on a log-spaced lambda grid in [1e-3, 1e3], ordered by rate.
inline std::vector<RatePair> uniform_qubit_curve(int n_lambda, double lambda_min = 1e-3, double lambda_max = 1e3) {
  if (n_lambda < 2) throw InvalidInput("uniform_qubit_curve: need at least two samples");
  std::vector<RatePair> out;
  out.reserve(static_cast<std::size_t>(n_lambda));
  const double a = std::log(lambda_min);
  const double b = std::log(lambda_max);
  for (int k = 0; k < n_lambda; ++k) out.push_back(devetak_berger(std::exp(a + (b - a) * k / (n_lambda - 1))));
  return out;
}

/// Closed-form Q at a given rate, by bisection on lambda.
inline double devetak_berger_at_rate(double rate) {
  if (rate <= 0.0) return 1.0;
  double lo = 1e-6;
  double hi = 1.0;
  while (devetak_berger(hi).rate < rate) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (devetak_berger(mid).rate < rate ? lo : hi) = mid;
  }
  return devetak_berger(0.5 * (lo + hi)).quantum;
}

/// Bloch unit vector of a qubit state.
inline std::array<double, 3> bloch_vector(const PureState& s) {
  const cplx a = s.amplitudes()[0];
  const cplx b = s.amplitudes()[1];
  const cplx ab = std::conj(a) * b;
  return {2.0 * ab.real(), 2.0 * ab.imag(), std::norm(a) - std::norm(b)};
}

struct Discretization {
  Ensemble ensemble;
  double covering_radius = 0.0;  // max over pure states of trace distance to the nearest member
};

namespace detail {

inline std::vector<std::array<double, 3>> sphere_points(int n) {
  std::vector<std::array<double, 3>> pts;
  if (n == 2) return {{0, 0, 1}, {0, 0, -1}};
  if (n == 4) {
    const double s = 1.0 / std::sqrt(3.0);
    return {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  }
  if (n == 6) return {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  // Fibonacci lattice
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  return pts;
}

}  // namespace detail

/// Equal-weight qubit ensemble approximately uniform on the Bloch sphere:
/// antipodal pair, tetrahedron and octahedron for n = 2, 4, 6, otherwise a
/// Fibonacci lattice. The covering radius is estimated against a dense
/// Fibonacci probe set.
inline Discretization discretize_uniform_qubit(int n_points, int probe = 20000) {
  if (n_points < 2) throw InvalidInput("discretize_uniform_qubit: need at least two points");
  const auto pts = detail::sphere_points(n_points);
  std::vector<PureState> states;
  for (const auto& v : pts) {
    const double theta = std::acos(std::clamp(v[2], -1.0, 1.0));
    const double phi = std::atan2(v[1], v[0]);
    states.push_back(bloch_state(theta, phi));
  }
  Discretization out{Ensemble::uniform(std::move(states)), 0.0};

  const auto probes = detail::sphere_points(probe);
  double worst = 0.0;
  for (const auto& q : probes) {
    double best_dot = -1.0;
    for (const auto& v : pts) best_dot = std::max(best_dot, q[0] * v[0] + q[1] * v[1] + q[2] * v[2]);
    worst = std::max(worst, std::sqrt(std::max(0.0, (1.0 - best_dot) / 2.0)));
  }
  // trace distance between pure qubit states = |bloch difference| / 2 = sqrt((1 - cos)/2)
  out.covering_radius = worst;
  return out;
}

/// Number of cells C(d) eps^(-d^2) in the hypercube partition of pure states
/// into pieces of radius at most eps, with C(d) = (2 sqrt(2) d^3)^(d^2).
inline double partition_count_bound(int d, double eps) {
  if (d < 1 || !(eps > 0.0)) throw InvalidInput("partition_count_bound: need d >= 1 and eps > 0");
  const double d2 = static_cast<double>(d) * d;
  return std::pow(2.0 * std::numbers::sqrt2 * d * d * d, d2) * std::pow(eps, -d2);
}

/// Vertex grid of a discretized qubit ensemble plus von Mises-Fisher cap
/// posteriors x_i ~ exp(kappa (c . n_i)) around 4m directions c, which
/// is where the optimal decompositions of the continuum source live.
inline SimplexGrid cap_seeded_grid(const Ensemble& e, std::initializer_list<double> kappas = {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
  if (e.dim() != 2) throw InvalidInput("cap_seeded_grid: qubit ensembles only");
  const int m = e.size();
  SimplexGrid grid = SimplexGrid::build(e, 0);
  std::vector<std::array<double, 3>> bloch;
  for (const auto& s : e.states()) bloch.push_back(bloch_vector(s));
  for (const auto& c : detail::sphere_points(4 * m))
    for (double kappa : kappas) {
      std::vector<double> x(static_cast<std::size_t>(m));
      double total = 0.0;
      for (int i = 0; i < m; ++i) {
        const auto& b = bloch[static_cast<std::size_t>(i)];
        x[static_cast<std::size_t>(i)] = e.prob(i) * std::exp(kappa * (c[0] * b[0] + c[1] * b[1] + c[2] * b[2] - 1.0));
        total += x[static_cast<std::size_t>(i)];
      }
      for (double& v : x) v /= total;
      grid.insert(e, std::move(x));
    }
  return grid;
}

}  // namespace qtradeoff

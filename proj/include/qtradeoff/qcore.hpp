// Exact small-dimension information primitives: Shannon and von Neumann
// entropies, fidelity, Holevo quantity, and the two functionals of a
// classical encoding p(j|i) that define the trade-off curve.
//
// All logarithms are base 2.
#pragma once

#include "qtradeoff/errors.hpp"
#include "qtradeoff/linalg.hpp"

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qtradeoff {

inline constexpr double kStateTol = 1e-12;       // type invariants
inline constexpr double kIdentityTol = 1e-9;     // derived identities
inline constexpr double kNegEigenTol = 1e-10;    // PSD slack for density matrices

// ---------------------------------------------------------------------------
// Domain types

/// A normalized pure state |phi> in C^d.
class PureState {
 public:
  PureState() = default;

  /// Throws InvalidInput unless ||v||^2 = 1 within 1e-12.
  explicit PureState(CVector amplitudes) : amp_(std::move(amplitudes)) {
    if (amp_.size() == 0) throw InvalidInput("PureState: empty amplitude vector");
    if (std::abs(amp_.squaredNorm() - 1.0) > kStateTol)
      throw InvalidInput("PureState: squared norm " + std::to_string(amp_.squaredNorm()) + " != 1");
  }

  /// Rescales v to unit norm. Zero vectors are rejected.
  static PureState normalized(const CVector& v) {
    const double n = v.norm();
    if (!(n > 0.0)) throw InvalidInput("PureState: zero vector");
    return PureState(v / n);
  }

  [[nodiscard]] int dim() const { return static_cast<int>(amp_.size()); }
  [[nodiscard]] const CVector& amplitudes() const { return amp_; }
  [[nodiscard]] CMatrix projector() const { return amp_ * amp_.adjoint(); }

 private:
  CVector amp_;
};

/// Hermitian, positive semidefinite, unit-trace matrix.
class DensityMatrix {
 public:
  DensityMatrix() = default;

  explicit DensityMatrix(CMatrix entries) : rho_(std::move(entries)) {
    if (rho_.rows() == 0 || rho_.rows() != rho_.cols())
      throw InvalidInput("DensityMatrix: matrix must be square and nonempty");
    if (!is_hermitian(rho_, kStateTol)) throw InvalidInput("DensityMatrix: not Hermitian");
    const double tr = rho_.trace().real();
    if (std::abs(tr - 1.0) > kStateTol)
      throw InvalidInput("DensityMatrix: trace " + std::to_string(tr) + " != 1");
    if (jacobi_eigenvalues(rho_).minCoeff() < -kNegEigenTol)
      throw InvalidInput("DensityMatrix: negative eigenvalue");
  }

  static DensityMatrix pure(const PureState& s) { return DensityMatrix(s.projector()); }
  static DensityMatrix maximally_mixed(int d) {
    return DensityMatrix(CMatrix::Identity(d, d) / static_cast<double>(d));
  }

  [[nodiscard]] int dim() const { return static_cast<int>(rho_.rows()); }
  [[nodiscard]] const CMatrix& matrix() const { return rho_; }

 private:
  CMatrix rho_;
};

/// A pure-state source {|phi_i>, p_i}.
class Ensemble {
 public:
  Ensemble() = default;

  Ensemble(std::vector<PureState> states, std::vector<double> probs)
      : states_(std::move(states)), probs_(std::move(probs)) {
    if (states_.empty()) throw InvalidInput("Ensemble: needs at least one state");
    if (states_.size() != probs_.size()) throw InvalidInput("Ensemble: states/probs length mismatch");
    const int d = states_.front().dim();
    double total = 0.0;
    for (std::size_t i = 0; i < states_.size(); ++i) {
      if (states_[i].dim() != d) throw InvalidInput("Ensemble: states differ in dimension");
      if (!(probs_[i] >= 0.0)) throw InvalidInput("Ensemble: negative probability");
      total += probs_[i];
    }
    if (std::abs(total - 1.0) > kStateTol)
      throw InvalidInput("Ensemble: probabilities sum to " + std::to_string(total));
  }

  /// Equal weights.
  static Ensemble uniform(std::vector<PureState> states) {
    const auto m = states.size();
    return Ensemble(std::move(states), std::vector<double>(m, 1.0 / static_cast<double>(m)));
  }

  [[nodiscard]] int size() const { return static_cast<int>(states_.size()); }
  [[nodiscard]] int dim() const { return states_.front().dim(); }
  [[nodiscard]] const std::vector<PureState>& states() const { return states_; }
  [[nodiscard]] const std::vector<double>& probs() const { return probs_; }
  [[nodiscard]] const PureState& state(int i) const { return states_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] double prob(int i) const { return probs_[static_cast<std::size_t>(i)]; }

  /// Same states under a different prior.
  [[nodiscard]] Ensemble with_probs(std::vector<double> p) const { return Ensemble(states_, std::move(p)); }

 private:
  std::vector<PureState> states_;
  std::vector<double> probs_;
};

/// Row-stochastic matrix p(j|i): rows are source labels, columns classical symbols.
class EncodingKernel {
 public:
  EncodingKernel() = default;

  explicit EncodingKernel(RMatrix rows) : k_(std::move(rows)) {
    if (k_.rows() == 0 || k_.cols() == 0) throw InvalidInput("EncodingKernel: empty matrix");
    for (Eigen::Index i = 0; i < k_.rows(); ++i) {
      if (k_.row(i).minCoeff() < 0.0) throw InvalidInput("EncodingKernel: negative entry");
      if (std::abs(k_.row(i).sum() - 1.0) > kStateTol)
        throw InvalidInput("EncodingKernel: row " + std::to_string(i) + " does not sum to 1");
    }
  }

  static EncodingKernel trivial(int m) { return EncodingKernel(RMatrix::Ones(m, 1)); }
  static EncodingKernel identity(int m) { return EncodingKernel(RMatrix::Identity(m, m)); }

  [[nodiscard]] int inputs() const { return static_cast<int>(k_.rows()); }
  [[nodiscard]] int outputs() const { return static_cast<int>(k_.cols()); }
  [[nodiscard]] double operator()(int i, int j) const { return k_(i, j); }
  [[nodiscard]] const RMatrix& matrix() const { return k_; }

 private:
  RMatrix k_;
};

// ---------------------------------------------------------------------------
// Classical entropies

inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

inline double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) {
    if (x < 0.0) throw InvalidInput("shannon_entropy: negative probability");
    h -= xlog2x(x);
  }
  return h;
}

inline double binary_entropy(double x) {
  if (x < 0.0 || x > 1.0) throw InvalidInput("binary_entropy: argument outside [0,1]");
  return -xlog2x(x) - xlog2x(1.0 - x);
}

/// -x log x below 1/4, constant 1/2 above; the continuity modulus used in
/// the Fannes inequality and the typical-set bounds.
inline double eta(double x) {
  if (x < 0.0) throw InvalidInput("eta: negative argument");
  return x <= 0.25 ? -xlog2x(x) : 0.5;
}

/// Upper bound d * eta(eps/d) on |S(rho) - S(sigma)| when ||rho - sigma||_1 <= eps.
inline double fannes_bound(int d, double eps) {
  if (d < 1) throw InvalidInput("fannes_bound: dimension must be positive");
  if (eps < 0.0) throw InvalidInput("fannes_bound: negative distance");
  return d * eta(eps / d);
}

// ---------------------------------------------------------------------------
// Quantum quantities

/// Entropy of the spectrum of a Hermitian PSD matrix, no validation.
/// Eigenvalues are clipped to [0,1].
inline double spectrum_entropy(const CMatrix& rho) {
  const RVector ev = jacobi_eigenvalues(rho);
  double s = 0.0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) s -= xlog2x(std::clamp(ev[k], 0.0, 1.0));
  return s;
}

inline double von_neumann_entropy(const DensityMatrix& rho) { return spectrum_entropy(rho.matrix()); }

/// sum_i x_i |phi_i><phi_i| for the states of an ensemble.
inline CMatrix mixture(const std::vector<PureState>& states, std::span<const double> x) {
  const int d = states.front().dim();
  CMatrix rho = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < states.size(); ++i)
    if (x[i] != 0.0) rho.noalias() += x[i] * states[i].projector();
  return rho;
}

inline DensityMatrix average_state(const Ensemble& e) { return DensityMatrix(mixture(e.states(), e.probs())); }

/// S(E): entropy of the ensemble average.
inline double ensemble_entropy(const Ensemble& e) { return spectrum_entropy(mixture(e.states(), e.probs())); }

namespace detail {

inline bool rank_one(const RVector& ev) { return ev.size() == 1 || ev[ev.size() - 2] <= kNegEigenTol; }

inline CMatrix psd_sqrt(const HermitianEigen& eig) {
  RVector r = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * r.asDiagonal() * eig.vectors.adjoint();
}

}  // namespace detail

/// Uhlmann fidelity (Tr sqrt(sqrt(w) rho sqrt(w)))^2. When either argument is
/// rank one it reduces to <psi|other|psi>.
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& omega) {
  if (rho.dim() != omega.dim()) throw InvalidInput("fidelity: dimension mismatch");
  const HermitianEigen we = jacobi_eigen(omega.matrix());
  if (detail::rank_one(we.values)) {
    const CVector psi = we.vectors.col(we.values.size() - 1);
    return std::clamp((psi.adjoint() * rho.matrix() * psi)(0, 0).real(), 0.0, 1.0);
  }
  const HermitianEigen re = jacobi_eigen(rho.matrix());
  if (detail::rank_one(re.values)) {
    const CVector psi = re.vectors.col(re.values.size() - 1);
    return std::clamp((psi.adjoint() * omega.matrix() * psi)(0, 0).real(), 0.0, 1.0);
  }
  const CMatrix sw = detail::psd_sqrt(we);
  const RVector inner = jacobi_eigenvalues(sw * rho.matrix() * sw);
  double tr = 0.0;
  for (Eigen::Index k = 0; k < inner.size(); ++k) tr += std::sqrt(std::max(inner[k], 0.0));
  return std::clamp(tr * tr, 0.0, 1.0);
}

/// chi = S(sum_k p_k rho_k) - sum_k p_k S(rho_k).
inline double holevo_chi(const std::vector<std::pair<DensityMatrix, double>>& members) {
  if (members.empty()) throw InvalidInput("holevo_chi: empty ensemble");
  const int d = members.front().first.dim();
  CMatrix avg = CMatrix::Zero(d, d);
  double total = 0.0;
  double inner = 0.0;
  for (const auto& [rho, p] : members) {
    if (rho.dim() != d) throw InvalidInput("holevo_chi: dimension mismatch");
    if (p < 0.0) throw InvalidInput("holevo_chi: negative probability");
    avg += p * rho.matrix();
    inner += p * von_neumann_entropy(rho);
    total += p;
  }
  if (std::abs(total - 1.0) > kStateTol) throw InvalidInput("holevo_chi: probabilities do not sum to 1");
  return std::max(0.0, spectrum_entropy(avg) - inner);
}

// ---------------------------------------------------------------------------
// Functionals of an encoding

/// Output marginal q_j and Bayes posteriors q(i|j) of an encoding. Symbols
/// with q_j = 0 keep an all-zero posterior and are skipped by consumers.
struct Posteriors {
  std::vector<double> q;                  // q_j
  std::vector<std::vector<double>> post;  // post[j][i] = q(i|j)
};

inline Posteriors posteriors(const Ensemble& e, const EncodingKernel& k) {
  if (k.inputs() != e.size()) throw InvalidInput("kernel rows do not match ensemble size");
  Posteriors out;
  out.q.assign(static_cast<std::size_t>(k.outputs()), 0.0);
  out.post.assign(static_cast<std::size_t>(k.outputs()), std::vector<double>(static_cast<std::size_t>(e.size()), 0.0));
  for (int j = 0; j < k.outputs(); ++j) {
    double qj = 0.0;
    for (int i = 0; i < e.size(); ++i) qj += e.prob(i) * k(i, j);
    out.q[static_cast<std::size_t>(j)] = qj;
    if (qj <= 0.0) continue;
    for (int i = 0; i < e.size(); ++i) out.post[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = e.prob(i) * k(i, j) / qj;
  }
  return out;
}

/// S(A:C) = H(p) - sum_j q_j H(q(.|j)).
inline double classical_info(const Ensemble& e, const EncodingKernel& k) {
  const Posteriors pq = posteriors(e, k);
  double avg = 0.0;
  for (std::size_t j = 0; j < pq.q.size(); ++j)
    if (pq.q[j] > 0.0) avg += pq.q[j] * shannon_entropy(pq.post[j]);
  return std::max(0.0, shannon_entropy(e.probs()) - avg);
}

/// S(A:B|C) = sum_j q_j S(sum_i q(i|j) |phi_i><phi_i|); the conditional
/// ensembles have pure members so their Holevo quantity is the entropy of
/// their average.
inline double conditional_chi(const Ensemble& e, const EncodingKernel& k) {
  const Posteriors pq = posteriors(e, k);
  double s = 0.0;
  for (std::size_t j = 0; j < pq.q.size(); ++j)
    if (pq.q[j] > 0.0) s += pq.q[j] * spectrum_entropy(mixture(e.states(), pq.post[j]));
  return s;
}

/// Holevo quantity of the joint BC ensemble {|phi_i><phi_i| (x) sum_j p(j|i)|j><j|, p_i}.
/// Used to cross-check the chain rule S(A:C) + S(A:B|C) = S(A:BC).
inline double joint_chi(const Ensemble& e, const EncodingKernel& k) {
  const int nj = k.outputs();
  std::vector<std::pair<DensityMatrix, double>> members;
  members.reserve(static_cast<std::size_t>(e.size()));
  for (int i = 0; i < e.size(); ++i) {
    CMatrix c = CMatrix::Zero(nj, nj);
    for (int j = 0; j < nj; ++j) c(j, j) = k(i, j);
    CMatrix joint = kron(e.state(i).projector(), c);
    // absorb rounding in the kernel row sum
    joint /= joint.trace().real();
    members.emplace_back(DensityMatrix(joint), e.prob(i));
  }
  return holevo_chi(members);
}

}  // namespace qtradeoff

// Method of types at desk scale: typical and conditionally typical
// sequences, overlaps with conditional typical subspaces (by dynamic
// programming over count vectors), a reverse-Shannon channel simulator,
// Chernoff derandomization and a fidelity audit of the trade-off code.
#pragma once

#include "qtradeoff/ensembles.hpp"
#include "qtradeoff/errors.hpp"
#include "qtradeoff/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qtradeoff {

using Sequence = std::vector<int>;

// ---------------------------------------------------------------------------
// Types

struct TypeVector {
  std::vector<int> counts;  // N(i|I)
  int n = 0;

  [[nodiscard]] std::vector<double> distribution() const {
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) p[i] = n > 0 ? static_cast<double>(counts[i]) / n : 0.0;
    return p;
  }
};

inline TypeVector type_of(std::span<const int> seq, int alphabet) {
  TypeVector t{std::vector<int>(static_cast<std::size_t>(alphabet), 0), static_cast<int>(seq.size())};
  for (int s : seq) {
    if (s < 0 || s >= alphabet) throw InvalidInput("type_of: symbol outside the alphabet");
    ++t.counts[static_cast<std::size_t>(s)];
  }
  return t;
}

/// All count vectors of length k summing to n, in lexicographically
/// decreasing order.
inline std::vector<std::vector<int>> enumerate_types(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(static_cast<std::size_t>(k), 0);
  const std::function<void(int, int)> rec = [&](int pos, int rem) {
    if (pos == k - 1) {
      c[static_cast<std::size_t>(pos)] = rem;
      out.push_back(c);
      return;
    }
    for (int v = rem; v >= 0; --v) {
      c[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, rem - v);
    }
  };
  if (k > 0) rec(0, n);
  return out;
}

/// log2 of n! for n = 0..max.
inline std::vector<double> log2_factorials(int max) {
  std::vector<double> f(static_cast<std::size_t>(max) + 1, 0.0);
  for (int k = 2; k <= max; ++k) f[static_cast<std::size_t>(k)] = f[static_cast<std::size_t>(k) - 1] + std::log2(static_cast<double>(k));
  return f;
}

/// log2 of the multinomial coefficient n! / prod c_i!.
inline double log2_multinomial(std::span<const int> counts) {
  int n = 0;
  for (int c : counts) n += c;
  const auto f = log2_factorials(n);
  double v = f[static_cast<std::size_t>(n)];
  for (int c : counts) v -= f[static_cast<std::size_t>(c)];
  return v;
}

/// log2 sum_k 2^{v_k}.
inline double log2_sum(std::span<const double> v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp2(x - mx);
  return mx + std::log2(s);
}

// ---------------------------------------------------------------------------
// Channels

class ChannelMatrix {
 public:
  ChannelMatrix() = default;
  explicit ChannelMatrix(RMatrix w) : w_(std::move(w)) {
    if (w_.rows() == 0 || w_.cols() == 0) throw InvalidInput("ChannelMatrix: empty matrix");
    for (Eigen::Index i = 0; i < w_.rows(); ++i) {
      if (w_.row(i).minCoeff() < 0.0) throw InvalidInput("ChannelMatrix: negative entry");
      if (std::abs(w_.row(i).sum() - 1.0) > 1e-12) throw InvalidInput("ChannelMatrix: row does not sum to 1");
    }
  }
  static ChannelMatrix from(const EncodingKernel& k) { return ChannelMatrix(k.matrix()); }
  static ChannelMatrix bsc(double flip) {
    RMatrix w(2, 2);
    w << 1.0 - flip, flip, flip, 1.0 - flip;
    return ChannelMatrix(w);
  }

  [[nodiscard]] int inputs() const { return static_cast<int>(w_.rows()); }
  [[nodiscard]] int outputs() const { return static_cast<int>(w_.cols()); }
  [[nodiscard]] double operator()(int i, int j) const { return w_(i, j); }
  [[nodiscard]] const RMatrix& matrix() const { return w_; }
  [[nodiscard]] std::vector<double> row(int i) const {
    std::vector<double> r(static_cast<std::size_t>(outputs()));
    for (int j = 0; j < outputs(); ++j) r[static_cast<std::size_t>(j)] = w_(i, j);
    return r;
  }

  /// Output distribution q = P W.
  [[nodiscard]] std::vector<double> output(std::span<const double> p) const {
    std::vector<double> q(static_cast<std::size_t>(outputs()), 0.0);
    for (int i = 0; i < inputs(); ++i)
      for (int j = 0; j < outputs(); ++j) q[static_cast<std::size_t>(j)] += p[static_cast<std::size_t>(i)] * w_(i, j);
    return q;
  }
  /// H(W|P) = sum_i P(i) H(W(.|i)).
  [[nodiscard]] double conditional_entropy(std::span<const double> p) const {
    double h = 0.0;
    for (int i = 0; i < inputs(); ++i) h += p[static_cast<std::size_t>(i)] * shannon_entropy(row(i));
    return h;
  }
  /// H(P:W) = H(PW) - H(W|P).
  [[nodiscard]] double mutual_information(std::span<const double> p) const {
    return shannon_entropy(output(p)) - conditional_entropy(p);
  }

 private:
  RMatrix w_;
};

// ---------------------------------------------------------------------------
// Typical sequences

/// |N(i)/n - P(i)| <= delta/sqrt(n) for every symbol.
inline bool is_typical_counts(std::span<const int> counts, std::span<const double> p, double delta) {
  int n = 0;
  for (int c : counts) n += c;
  if (n == 0) return true;
  const double slack = delta / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (std::abs(static_cast<double>(counts[i]) / n - p[i]) > slack + 1e-12) return false;
  return true;
}

inline bool is_typical(std::span<const int> seq, std::span<const double> p, double delta) {
  if (!(delta > 0.0)) throw InvalidInput("is_typical: delta must be positive");
  return is_typical_counts(type_of(seq, static_cast<int>(p.size())).counts, p, delta);
}

/// The four cardinality bounds, as log2 values:
///   class_lower = -|I| log(n+1) + nH(P)          <= log|T_P|
///   class_upper = nH(P)                          >= log|T_P|
///   set_lower   = -|I| log(n+1) + n(H(P) - |I| eta(delta/sqrt n))  <= log|T_{P,delta}|
///   set_upper   =  |I| log(n+1) + n(H(P) + |I| eta(delta/sqrt n))  >= log|T_{P,delta}|
struct TypicalBounds {
  double class_lower = 0.0;
  double class_upper = 0.0;
  double set_lower = 0.0;
  double set_upper = 0.0;
};

inline TypicalBounds typical_count_bounds(std::span<const double> p, double delta, int n) {
  if (!(delta > 0.0) || n < 1) throw InvalidInput("typical_count_bounds: need delta > 0 and n >= 1");
  const double k = static_cast<double>(p.size());
  const double h = shannon_entropy(p);
  const double poly = k * std::log2(n + 1.0);
  const double corr = k * eta(delta / std::sqrt(static_cast<double>(n)));
  return {-poly + n * h, n * h, -poly + n * (h - corr), poly + n * (h + corr)};
}

/// Exact log2 |T_{P,delta}| at block length n, by summing type classes.
inline double log2_typical_set_size(std::span<const double> p, double delta, int n) {
  std::vector<double> terms;
  for (const auto& c : enumerate_types(n, static_cast<int>(p.size())))
    if (is_typical_counts(c, p, delta)) terms.push_back(log2_multinomial(c));
  return log2_sum(terms);
}

/// Count form of conditional typicality, with the robust slack:
///   |N(ij) - N(i) W(j|i)| <= delta sqrt(N(i)) + eps N(i).
/// joint is row-major |I| x |J|.
inline bool is_cond_typical_counts(std::span<const int> joint, std::span<const int> input_counts, const ChannelMatrix& w,
                                   double delta, double eps_robust = 0.0) {
  const int nj = w.outputs();
  for (int i = 0; i < w.inputs(); ++i) {
    const double ni = input_counts[static_cast<std::size_t>(i)];
    const double slack = delta * std::sqrt(ni) + eps_robust * ni;
    for (int j = 0; j < nj; ++j) {
      const double dev = std::abs(joint[static_cast<std::size_t>(i * nj + j)] - ni * w(i, j));
      if (dev > slack + 1e-9) return false;
    }
  }
  return true;
}

inline bool is_cond_typical(std::span<const int> out, std::span<const int> in, const ChannelMatrix& w, double delta,
                            double eps_robust = 0.0) {
  if (out.size() != in.size()) throw InvalidInput("is_cond_typical: sequence lengths differ");
  if (!(delta > 0.0) || eps_robust < 0.0) throw InvalidInput("is_cond_typical: need delta > 0 and eps >= 0");
  std::vector<int> joint(static_cast<std::size_t>(w.inputs() * w.outputs()), 0);
  std::vector<int> ni(static_cast<std::size_t>(w.inputs()), 0);
  for (std::size_t t = 0; t < in.size(); ++t) {
    if (in[t] < 0 || in[t] >= w.inputs() || out[t] < 0 || out[t] >= w.outputs())
      throw InvalidInput("is_cond_typical: symbol outside the alphabet");
    ++joint[static_cast<std::size_t>(in[t] * w.outputs() + out[t])];
    ++ni[static_cast<std::size_t>(in[t])];
  }
  return is_cond_typical_counts(joint, ni, w, delta, eps_robust);
}

// ---------------------------------------------------------------------------
// Sampling

inline int sample_index(std::span<const double> p, std::mt19937_64& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  int last = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    acc += p[i];
    last = static_cast<int>(i);
    if (u < acc) return last;
  }
  return last;
}

inline Sequence sample_sequence(std::span<const double> p, int n, std::mt19937_64& rng) {
  Sequence s(static_cast<std::size_t>(n));
  for (int& x : s) x = sample_index(p, rng);
  return s;
}

inline Sequence sample_channel(std::span<const int> in, const ChannelMatrix& w, std::mt19937_64& rng) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < w.inputs(); ++i) rows.push_back(w.row(i));
  Sequence out(in.size());
  for (std::size_t t = 0; t < in.size(); ++t) out[t] = sample_index(rows[static_cast<std::size_t>(in[t])], rng);
  return out;
}

/// A typical sequence drawn from P^n conditioned on typicality (rejection).
inline Sequence sample_typical(std::span<const double> p, int n, double delta, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Sequence s = sample_sequence(p, n, rng);
    if (is_typical(s, p, delta)) return s;
  }
  throw BudgetExceeded("sample_typical: typical set too small to hit by rejection");
}

struct Estimate {
  double mean = 0.0;
  double half_width = 0.0;  // 95% normal-approximation half width
  int samples = 0;
  [[nodiscard]] double lower() const { return mean - half_width; }
  [[nodiscard]] double upper() const { return mean + half_width; }
};

inline Estimate estimate_from(double sum, double sum_sq, int n) {
  Estimate e;
  e.samples = n;
  e.mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum_sq - n * e.mean * e.mean) / (n - 1)) : 0.0;
  e.half_width = 1.96 * std::sqrt(var / n);
  return e;
}

/// Monte-Carlo estimate of P^n(T_{P,delta}).
inline Estimate typical_probability_mc(std::span<const double> p, int n, double delta, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double hits = 0.0;
  for (int s = 0; s < samples; ++s) hits += is_typical(sample_sequence(p, n, rng), p, delta) ? 1.0 : 0.0;
  return estimate_from(hits, hits, samples);
}

/// Monte-Carlo estimate of W_I(T_{W,delta}(I)).
inline Estimate cond_typical_probability_mc(const ChannelMatrix& w, std::span<const int> in, double delta, int samples,
                                            std::uint64_t seed, double eps_robust = 0.0) {
  std::mt19937_64 rng(seed);
  double hits = 0.0;
  for (int s = 0; s < samples; ++s) hits += is_cond_typical(sample_channel(in, w, rng), in, w, delta, eps_robust) ? 1.0 : 0.0;
  return estimate_from(hits, hits, samples);
}

// ---------------------------------------------------------------------------
// Conditional typical subspace overlaps

/// Which conditional states define the eigenbases e_{k|j}:
///  empirical:  rho_j = sum_i (N(ij)/N(j)) |phi_i><phi_i|   (joint type of I and J)
///  kernel:     rho_j = sum_i q(i|j) |phi_i><phi_i|          (Bayes posteriors of the kernel)
enum class OverlapBasis { empirical, kernel };

namespace detail {

struct SubspaceData {
  int d = 0;
  std::vector<RVector> r;                       // eigenvalues per symbol j
  std::vector<std::vector<RVector>> amplitude;  // amplitude[j][i][k] = |<e_{k|j}|phi_i>|^2
  std::vector<int> nj;                          // N(j)
  std::vector<std::vector<int>> nij;            // nij[j][i]
};

inline SubspaceData subspace_data(std::span<const int> in, std::span<const int> out, const Ensemble& e,
                                  const EncodingKernel& k, OverlapBasis basis) {
  if (in.size() != out.size()) throw InvalidInput("projector_overlap: sequence lengths differ");
  const int m = e.size();
  const int nj = k.outputs();
  SubspaceData s;
  s.d = e.dim();
  s.nj.assign(static_cast<std::size_t>(nj), 0);
  s.nij.assign(static_cast<std::size_t>(nj), std::vector<int>(static_cast<std::size_t>(m), 0));
  for (std::size_t t = 0; t < in.size(); ++t) {
    if (in[t] < 0 || in[t] >= m || out[t] < 0 || out[t] >= nj) throw InvalidInput("projector_overlap: symbol outside the alphabet");
    ++s.nj[static_cast<std::size_t>(out[t])];
    ++s.nij[static_cast<std::size_t>(out[t])][static_cast<std::size_t>(in[t])];
  }
  const Posteriors post = posteriors(e, k);
  s.r.resize(static_cast<std::size_t>(nj));
  s.amplitude.resize(static_cast<std::size_t>(nj));
  for (int j = 0; j < nj; ++j) {
    std::vector<double> x(static_cast<std::size_t>(m), 0.0);
    if (basis == OverlapBasis::empirical && s.nj[static_cast<std::size_t>(j)] > 0) {
      for (int i = 0; i < m; ++i) x[static_cast<std::size_t>(i)] = static_cast<double>(s.nij[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) / s.nj[static_cast<std::size_t>(j)];
    } else if (post.q[static_cast<std::size_t>(j)] > 0.0) {
      x = post.post[static_cast<std::size_t>(j)];
    } else {
      x.assign(static_cast<std::size_t>(m), 1.0 / m);
    }
    const HermitianEigen eig = jacobi_eigen(mixture(e.states(), x));
    RVector r = eig.values.cwiseMax(0.0);
    r /= r.sum();
    s.r[static_cast<std::size_t>(j)] = r;
    for (int i = 0; i < m; ++i) {
      const CVector proj = eig.vectors.adjoint() * e.state(i).amplitudes();
      s.amplitude[static_cast<std::size_t>(j)].push_back(proj.cwiseAbs2());
    }
  }
  return s;
}

inline bool counts_typical(std::span<const int> c, int total, const RVector& r, double delta, double eps) {
  const double slack = delta * std::sqrt(static_cast<double>(total)) + eps * total;
  for (std::size_t k = 0; k < c.size(); ++k)
    if (std::abs(c[k] - total * r[static_cast<Eigen::Index>(k)]) > slack + 1e-9) return false;
  return true;
}

}  // namespace detail

/// Tr(phi_I Pi(J)) where Pi(J) is the (robust) conditional typical subspace
/// projector of the conditional states rho_j along J. The value factorizes
/// over symbols j; for each j the distribution of eigen-index counts is a
/// convolution of the per-position distributions |<e_{k|j}|phi_i>|^2,
/// accumulated by dynamic programming over count vectors.
inline double projector_overlap(std::span<const int> in, std::span<const int> out, const Ensemble& e,
                                const EncodingKernel& k, double delta, double eps_robust = 0.0,
                                OverlapBasis basis = OverlapBasis::empirical) {
  if (!(delta > 0.0) || eps_robust < 0.0) throw InvalidInput("projector_overlap: need delta > 0 and eps >= 0");
  const auto s = detail::subspace_data(in, out, e, k, basis);
  const int d = s.d;
  double overlap = 1.0;
  for (std::size_t j = 0; j < s.nj.size(); ++j) {
    const int total = s.nj[j];
    if (total == 0) continue;
    std::map<std::vector<int>, double> dp{{std::vector<int>(static_cast<std::size_t>(d), 0), 1.0}};
    for (std::size_t i = 0; i < s.nij[j].size(); ++i) {
      const RVector& a = s.amplitude[j][i];
      for (int rep = 0; rep < s.nij[j][i]; ++rep) {
        std::map<std::vector<int>, double> next;
        for (const auto& [c, prob] : dp)
          for (int kk = 0; kk < d; ++kk) {
            if (a[kk] <= 0.0) continue;
            std::vector<int> c2 = c;
            ++c2[static_cast<std::size_t>(kk)];
            next[c2] += prob * a[kk];
          }
        dp = std::move(next);
      }
    }
    double pj = 0.0;
    for (const auto& [c, prob] : dp)
      if (detail::counts_typical(c, total, s.r[j], delta, eps_robust)) pj += prob;
    overlap *= pj;
  }
  return std::clamp(overlap, 0.0, 1.0);
}

/// The same quantity by enumerating all d^n eigen-index strings.
inline double projector_overlap_bruteforce(std::span<const int> in, std::span<const int> out, const Ensemble& e,
                                           const EncodingKernel& k, double delta, double eps_robust = 0.0,
                                           OverlapBasis basis = OverlapBasis::empirical) {
  const auto s = detail::subspace_data(in, out, e, k, basis);
  const int d = s.d;
  const std::size_t n = in.size();
  if (std::pow(static_cast<double>(d), static_cast<double>(n)) > 1e7) throw BudgetExceeded("projector_overlap_bruteforce: too many strings");
  std::vector<int> kstr(n, 0);
  double total = 0.0;
  while (true) {
    double prod = 1.0;
    std::vector<std::vector<int>> counts(s.nj.size(), std::vector<int>(static_cast<std::size_t>(d), 0));
    for (std::size_t t = 0; t < n; ++t) {
      prod *= s.amplitude[static_cast<std::size_t>(out[t])][static_cast<std::size_t>(in[t])][kstr[t]];
      ++counts[static_cast<std::size_t>(out[t])][static_cast<std::size_t>(kstr[t])];
    }
    bool typ = true;
    for (std::size_t j = 0; j < s.nj.size() && typ; ++j)
      if (s.nj[j] > 0) typ = detail::counts_typical(counts[j], s.nj[j], s.r[j], delta, eps_robust);
    if (typ) total += prod;
    std::size_t pos = 0;
    while (pos < n && ++kstr[pos] == d) kstr[pos++] = 0;
    if (pos == n) break;
  }
  return total;
}

/// log2 Tr Pi(J): the number of qubits needed to carry the projected state.
inline double log2_projector_rank(std::span<const int> in, std::span<const int> out, const Ensemble& e,
                                  const EncodingKernel& k, double delta, double eps_robust = 0.0,
                                  OverlapBasis basis = OverlapBasis::empirical) {
  const auto s = detail::subspace_data(in, out, e, k, basis);
  double total = 0.0;
  for (std::size_t j = 0; j < s.nj.size(); ++j) {
    if (s.nj[j] == 0) continue;
    std::vector<double> terms;
    for (const auto& c : enumerate_types(s.nj[j], s.d))
      if (detail::counts_typical(c, s.nj[j], s.r[j], delta, eps_robust)) terms.push_back(log2_multinomial(c));
    if (terms.empty()) return -std::numeric_limits<double>::infinity();
    total += log2_sum(terms);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Reverse Shannon simulation
//
// Shared randomness is a codebook of M candidates drawn i.i.d. from q^n
// (q = PW) together with one uniform coin per candidate. Given I the
// encoder sends the index of the first candidate J that is conditionally
// typical and whose coin falls below min(1, W_I(J) / (2^L q^n(J))); the
// decoder outputs that candidate. If no candidate is accepted the encoder
// sends index 0. Accepted outputs are distributed as W_I restricted to the
// typical set and capped where W_I/q^n exceeds 2^L; L is the (1 - tau)
// quantile of log2 W_I(J)/q^n(J) under W_I, so the capped mass is at most
// tau. M = ln(1/fail) / a with a the per-candidate acceptance probability.
//
// Every quantity depends on J only through the joint type of (I, J), so
// for small alphabets the output distribution is evaluated exactly by
// enumerating joint count tables; otherwise by sampling.

struct RstOptions {
  double tau = 0.03;         // capped mass
  double fail = 1e-6;        // target probability that no candidate is accepted
  int panel = 20;            // typical inputs examined
  int trials = 10000;        // Monte-Carlo outputs (spread over the panel)
  double enum_limit = 2e5;   // largest number of joint count tables enumerated
  int model_samples = 20000; // samples for L and a when not enumerating
};

struct RstInputModel {
  Sequence input;
  std::vector<int> counts;  // N(i|I)
  double L = 0.0;           // log2 cap
  double log2_accept = 0.0; // log2 a
  double fail = 0.0;        // (1 - a)^M once M is fixed
  bool exact = false;
  double tv_exact = std::numeric_limits<double>::quiet_NaN();
  double output_entropy = std::numeric_limits<double>::quiet_NaN();  // H of the simulated J given I, if exact
};

struct RstReport {
  double log_M = 0.0;  // log2 codebook size
  double log_N = 0.0;  // output entropy the shared randomness supplies, averaged over the panel
  Estimate tv;         // Monte-Carlo total variation to W^n(.|I), averaged over the panel
  double tv_exact = std::numeric_limits<double>::quiet_NaN();  // panel average when enumerable
  double tv_bound = 0.0;            // |I||J|/delta^2
  double mutual_information = 0.0;  // H(P:W)
  double conditional_entropy = 0.0; // H(W|P)
  double log_M_budget = 0.0;        // nH(P:W) + n|I||J|eta(delta/sqrt n) + |I||J|log(n+1)
  double log_N_budget = 0.0;        // nH(W|P) + n|I||J|eta(delta/sqrt n) + |I||J|log(n+1)
  int failures = 0;                 // Monte-Carlo outputs produced by the failure action
  std::vector<RstInputModel> inputs;
};

namespace detail {

struct JointTable {
  double log2_count = 0.0;  // number of J strings with this table
  double log2_w = 0.0;      // log2 W_I(J) of each such string
  double log2_q = 0.0;      // log2 q^n(J)
  bool typical = false;
};

inline double log2_or_ninf(double x) { return x > 0.0 ? std::log2(x) : -std::numeric_limits<double>::infinity(); }

inline double table_count(const ChannelMatrix& w, const std::vector<int>& counts) {
  double total = 1.0;
  for (int i = 0; i < w.inputs(); ++i)
    for (int j = 1; j < w.outputs(); ++j) total = total * (counts[static_cast<std::size_t>(i)] + j) / j;
  return total;
}

inline std::vector<JointTable> joint_tables(const ChannelMatrix& w, std::span<const double> q, const std::vector<int>& counts,
                                            double delta) {
  const int nj = w.outputs();
  std::vector<std::vector<JointTable>> per_input;
  for (int i = 0; i < w.inputs(); ++i) {
    const int ni = counts[static_cast<std::size_t>(i)];
    std::vector<JointTable> list;
    for (const auto& c : enumerate_types(ni, nj)) {
      JointTable t;
      t.log2_count = log2_multinomial(c);
      bool ok = true;
      for (int j = 0; j < nj; ++j) {
        const int cj = c[static_cast<std::size_t>(j)];
        if (cj == 0) continue;
        if (w(i, j) <= 0.0) ok = false;
        t.log2_w += cj * log2_or_ninf(w(i, j));
        t.log2_q += cj * log2_or_ninf(q[static_cast<std::size_t>(j)]);
      }
      if (!ok) continue;
      const double slack = delta * std::sqrt(static_cast<double>(ni));
      t.typical = true;
      for (int j = 0; j < nj; ++j)
        t.typical = t.typical && std::abs(c[static_cast<std::size_t>(j)] - ni * w(i, j)) <= slack + 1e-9;
      list.push_back(t);
    }
    per_input.push_back(std::move(list));
  }
  std::vector<JointTable> tables{JointTable{0.0, 0.0, 0.0, true}};
  for (const auto& list : per_input) {
    std::vector<JointTable> next;
    next.reserve(tables.size() * list.size());
    for (const auto& a : tables)
      for (const auto& b : list)
        next.push_back({a.log2_count + b.log2_count, a.log2_w + b.log2_w, a.log2_q + b.log2_q, a.typical && b.typical});
    tables = std::move(next);
  }
  return tables;
}

/// Per-string simulated probability sim(J) from the string's log2 W_I(J),
/// log2 q^n(J) and typicality.
struct SimulatedLaw {
  double L = 0.0;
  double log2_a = 0.0;
  double fail = 0.0;

  [[nodiscard]] double accept(double lw, double lq, bool typ) const {
    if (!typ || !std::isfinite(lq)) return 0.0;
    return std::min(1.0, std::exp2(lw - L - lq));
  }
  /// log2 sim(J)
  [[nodiscard]] double log2_prob(double lw, double lq, bool typ) const {
    const double acc = accept(lw, lq, typ);
    const double a = std::exp2(log2_a);
    std::vector<double> terms;
    if (acc > 0.0) terms.push_back(std::log2(1.0 - fail) + std::min(lq, lw - L) - log2_a);
    if (fail > 0.0 && acc < 1.0) terms.push_back(std::log2(fail) + lq + std::log2(1.0 - acc) - std::log2(1.0 - a));
    return log2_sum(terms);
  }
};

inline void build_model(RstInputModel& model, const ChannelMatrix& w, std::span<const double> q, double delta,
                        const RstOptions& opt, std::mt19937_64& rng) {
  if (table_count(w, model.counts) <= opt.enum_limit) {
    const auto tables = joint_tables(w, q, model.counts, delta);
    std::vector<std::pair<double, double>> llr;  // (log2 W/q, W-mass)
    for (const auto& t : tables) llr.emplace_back(t.log2_w - t.log2_q, std::exp2(t.log2_count + t.log2_w));
    std::sort(llr.begin(), llr.end());
    double cum = 0.0;
    model.L = llr.back().first;
    for (const auto& [v, mass] : llr) {
      cum += mass;
      if (cum >= 1.0 - opt.tau) {
        model.L = v;
        break;
      }
    }
    std::vector<double> acc_terms;
    for (const auto& t : tables)
      if (t.typical && std::isfinite(t.log2_q)) acc_terms.push_back(t.log2_count + std::min(t.log2_q, t.log2_w - model.L));
    model.log2_accept = log2_sum(acc_terms);
    model.exact = true;
    return;
  }
  // sampled model: L from the empirical quantile, a = 2^-L E_W[g]
  std::vector<double> llr;
  std::vector<double> lws, lqs;
  std::vector<bool> typ;
  for (int s = 0; s < opt.model_samples; ++s) {
    const Sequence out = sample_channel(model.input, w, rng);
    double lw = 0.0, lq = 0.0;
    for (std::size_t t = 0; t < out.size(); ++t) {
      lw += std::log2(w(model.input[t], out[t]));
      lq += log2_or_ninf(q[static_cast<std::size_t>(out[t])]);
    }
    lws.push_back(lw);
    lqs.push_back(lq);
    typ.push_back(is_cond_typical(out, model.input, w, delta));
    llr.push_back(lw - lq);
  }
  std::vector<double> sorted = llr;
  std::sort(sorted.begin(), sorted.end());
  const auto idx = static_cast<std::size_t>(std::ceil((1.0 - opt.tau) * static_cast<double>(sorted.size()))) - 1;
  model.L = sorted[std::min(idx, sorted.size() - 1)];
  double g = 0.0;
  for (std::size_t s = 0; s < lws.size(); ++s)
    if (typ[s] && std::isfinite(lqs[s])) g += std::min(1.0, std::exp2(model.L + lqs[s] - lws[s]));
  g /= static_cast<double>(lws.size());
  model.log2_accept = std::log2(std::max(g, 1e-300)) - model.L;
  model.exact = false;
}

inline void exact_statistics(RstInputModel& model, const ChannelMatrix& w, std::span<const double> q, double delta) {
  const SimulatedLaw law{model.L, model.log2_accept, model.fail};
  double tv = 0.0;
  double h = 0.0;
  for (const auto& t : joint_tables(w, q, model.counts, delta)) {
    const double ls = law.log2_prob(t.log2_w, t.log2_q, t.typical);
    const double sim_mass = std::isfinite(ls) ? std::exp2(t.log2_count + ls) : 0.0;
    const double w_mass = std::exp2(t.log2_count + t.log2_w);
    tv += std::max(0.0, sim_mass - w_mass);
    if (sim_mass > 0.0) h -= sim_mass * ls;
  }
  model.tv_exact = tv;
  model.output_entropy = h;
}

}  // namespace detail

/// One output of the simulation for input I (lazy: the first accepted
/// candidate is drawn directly from its law instead of scanning M
/// candidates). Sets failed when the failure action fired.
inline Sequence rst_sample_output(const RstInputModel& model, const ChannelMatrix& w, std::span<const double> q, double delta,
                                  std::mt19937_64& rng, bool* failed = nullptr) {
  const detail::SimulatedLaw law{model.L, model.log2_accept, model.fail};
  const bool fail = uniform01(rng) < model.fail;
  if (failed) *failed = fail;
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    if (fail) {
      // candidate 0 given that no candidate was accepted
      const Sequence out = sample_sequence(q, static_cast<int>(model.input.size()), rng);
      double lw = 0.0, lq = 0.0;
      for (std::size_t t = 0; t < out.size(); ++t) {
        lw += detail::log2_or_ninf(w(model.input[t], out[t]));
        lq += std::log2(q[static_cast<std::size_t>(out[t])]);
      }
      if (uniform01(rng) >= law.accept(lw, lq, is_cond_typical(out, model.input, w, delta))) return out;
    } else {
      // accepted candidate: propose from W_I, keep with probability min(1, 2^L q/W) on the typical set
      const Sequence out = sample_channel(model.input, w, rng);
      if (!is_cond_typical(out, model.input, w, delta)) continue;
      double lw = 0.0, lq = 0.0;
      for (std::size_t t = 0; t < out.size(); ++t) {
        lw += std::log2(w(model.input[t], out[t]));
        lq += detail::log2_or_ninf(q[static_cast<std::size_t>(out[t])]);
      }
      if (uniform01(rng) < std::min(1.0, std::exp2(model.L + lq - lw))) return out;
    }
  }
  throw BudgetExceeded("rst_sample_output: rejection sampler did not terminate");
}

/// Codebook construction shared by the simulator and the coding audit:
/// models for each panel input and the common log2 M.
struct RstPlan {
  ChannelMatrix channel;
  std::vector<double> prior;
  std::vector<double> output;  // q = PW
  int n = 0;
  double delta = 0.0;
  double log_M = 0.0;
  std::vector<RstInputModel> inputs;
};

inline RstPlan rst_plan(const ChannelMatrix& w, std::span<const double> p, int n, double delta,
                        const std::vector<Sequence>& panel, const RstOptions& opt, std::mt19937_64& rng) {
  if (n < 1 || n > 10000) throw InvalidInput("reverse_shannon_sim: block length must be in [1, 10^4]");
  if (!(delta > 0.0)) throw InvalidInput("reverse_shannon_sim: delta must be positive");
  if (static_cast<int>(p.size()) != w.inputs()) throw InvalidInput("reverse_shannon_sim: prior does not match channel");
  if (!(opt.tau > 0.0 && opt.tau < 1.0) || !(opt.fail > 0.0 && opt.fail < 1.0))
    throw InvalidInput("reverse_shannon_sim: tau and fail must lie in (0,1)");
  RstPlan plan;
  plan.channel = w;
  plan.prior.assign(p.begin(), p.end());
  plan.output = w.output(p);
  plan.n = n;
  plan.delta = delta;
  double min_log_a = std::numeric_limits<double>::infinity();
  for (const auto& in : panel) {
    RstInputModel model;
    model.input = in;
    model.counts = type_of(in, w.inputs()).counts;
    detail::build_model(model, w, plan.output, delta, opt, rng);
    min_log_a = std::min(min_log_a, model.log2_accept);
    plan.inputs.push_back(std::move(model));
  }
  // M = ceil(ln(1/fail) / a_min)
  plan.log_M = std::log2(std::ceil(std::exp2(std::log2(std::log(1.0 / opt.fail)) - min_log_a)));
  if (!std::isfinite(plan.log_M)) plan.log_M = std::log2(std::log(1.0 / opt.fail)) - min_log_a;
  for (auto& model : plan.inputs) {
    const double a = std::exp2(model.log2_accept);
    model.fail = a >= 1.0 ? 0.0 : std::exp(std::exp2(plan.log_M) * std::log1p(-a));
    if (model.exact) detail::exact_statistics(model, w, plan.output, delta);
  }
  return plan;
}

/// Simulates W^n on a panel of typical inputs and reports the codebook
/// size, shared randomness, and total variation distance to W^n(.|I).
inline RstReport reverse_shannon_sim(const ChannelMatrix& w, std::span<const double> p, int n, double delta,
                                     std::uint64_t seed, const RstOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  std::vector<Sequence> panel;
  for (int k = 0; k < opt.panel; ++k) panel.push_back(sample_typical(p, n, delta, rng));
  const RstPlan plan = rst_plan(w, p, n, delta, panel, opt, rng);

  RstReport rep;
  rep.log_M = plan.log_M;
  rep.mutual_information = w.mutual_information(p);
  rep.conditional_entropy = w.conditional_entropy(p);
  const double ij = static_cast<double>(w.inputs()) * w.outputs();
  rep.tv_bound = ij / (delta * delta);
  const double corr = n * ij * eta(delta / std::sqrt(static_cast<double>(n))) + ij * std::log2(n + 1.0);
  rep.log_M_budget = n * rep.mutual_information + corr;
  rep.log_N_budget = n * rep.conditional_entropy + corr;

  // Monte-Carlo: TV = E_sim[(1 - W/sim)^+]
  double sum = 0.0, sum_sq = 0.0, ent = 0.0;
  const int per = std::max(1, opt.trials / std::max<int>(1, static_cast<int>(plan.inputs.size())));
  int count = 0;
  for (const auto& model : plan.inputs) {
    const detail::SimulatedLaw law{model.L, model.log2_accept, model.fail};
    for (int t = 0; t < per; ++t) {
      bool failed = false;
      const Sequence out = rst_sample_output(model, w, plan.output, delta, rng, &failed);
      rep.failures += failed ? 1 : 0;
      double lw = 0.0, lq = 0.0;
      for (std::size_t s = 0; s < out.size(); ++s) {
        lw += detail::log2_or_ninf(w(model.input[s], out[s]));
        lq += detail::log2_or_ninf(plan.output[static_cast<std::size_t>(out[s])]);
      }
      const double ls = law.log2_prob(lw, lq, is_cond_typical(out, model.input, w, delta));
      const double v = std::max(0.0, 1.0 - std::exp2(lw - ls));
      sum += v;
      sum_sq += v * v;
      ent -= ls;
      ++count;
    }
  }
  rep.tv = estimate_from(sum, sum_sq, count);
  rep.log_N = ent / count;

  double tv_exact = 0.0, h_exact = 0.0;
  bool all_exact = true;
  for (const auto& model : plan.inputs) {
    all_exact = all_exact && model.exact;
    tv_exact += model.tv_exact;
    h_exact += model.output_entropy;
  }
  if (all_exact) {
    rep.tv_exact = tv_exact / static_cast<double>(plan.inputs.size());
    rep.log_N = h_exact / static_cast<double>(plan.inputs.size());
  }
  rep.inputs = plan.inputs;
  return rep;
}

/// Runs the encoder literally on `codebooks` independently drawn codebooks
/// of M = 2^log_M candidates for input I; returns output frequencies indexed
/// by the base-|J| value of the output string. Small n only.
inline std::vector<double> rst_materialized_distribution(const RstInputModel& model, const RstPlan& plan, int codebooks,
                                                         std::uint64_t seed) {
  const int n = plan.n;
  const int nj = plan.channel.outputs();
  if (std::pow(static_cast<double>(nj), n) > 1e6 || plan.log_M > 24.0)
    throw BudgetExceeded("rst_materialized_distribution: instance too large to materialize");
  const auto M = static_cast<long long>(std::llround(std::exp2(plan.log_M)));
  std::vector<double> freq(static_cast<std::size_t>(std::llround(std::pow(nj, n))), 0.0);
  std::mt19937_64 rng(seed);
  const detail::SimulatedLaw law{model.L, model.log2_accept, model.fail};
  for (int c = 0; c < codebooks; ++c) {
    Sequence chosen;
    Sequence first;
    for (long long idx = 0; idx < M; ++idx) {
      const Sequence cand = sample_sequence(plan.output, n, rng);
      const double coin = uniform01(rng);
      if (idx == 0) first = cand;
      double lw = 0.0, lq = 0.0;
      for (int t = 0; t < n; ++t) {
        lw += detail::log2_or_ninf(plan.channel(model.input[static_cast<std::size_t>(t)], cand[static_cast<std::size_t>(t)]));
        lq += std::log2(plan.output[static_cast<std::size_t>(cand[static_cast<std::size_t>(t)])]);
      }
      if (coin < law.accept(lw, lq, is_cond_typical(cand, model.input, plan.channel, plan.delta))) {
        chosen = cand;
        break;
      }
    }
    if (chosen.empty()) chosen = first;
    long long code = 0;
    for (int t = n - 1; t >= 0; --t) code = code * nj + chosen[static_cast<std::size_t>(t)];
    freq[static_cast<std::size_t>(code)] += 1.0 / codebooks;
  }
  return freq;
}

/// Exact simulated output law sim(J) for every J (same indexing as above).
inline std::vector<double> rst_model_distribution(const RstInputModel& model, const RstPlan& plan) {
  const int n = plan.n;
  const int nj = plan.channel.outputs();
  const detail::SimulatedLaw law{model.L, model.log2_accept, model.fail};
  const auto total = static_cast<long long>(std::llround(std::pow(nj, n)));
  std::vector<double> out(static_cast<std::size_t>(total));
  Sequence s(static_cast<std::size_t>(n));
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    double lw = 0.0, lq = 0.0;
    for (int t = 0; t < n; ++t) {
      s[static_cast<std::size_t>(t)] = static_cast<int>(c % nj);
      c /= nj;
      lw += detail::log2_or_ninf(plan.channel(model.input[static_cast<std::size_t>(t)], s[static_cast<std::size_t>(t)]));
      lq += detail::log2_or_ninf(plan.output[static_cast<std::size_t>(s[static_cast<std::size_t>(t)])]);
    }
    const double ls = law.log2_prob(lw, lq, is_cond_typical(s, model.input, plan.channel, plan.delta));
    out[static_cast<std::size_t>(code)] = std::isfinite(ls) ? std::exp2(ls) : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Derandomization

/// L > (2 delta^4 ln 2 / (|I|^2 |J|^2 mu)) n log|I|.
inline double derandomization_length(double delta, int inputs, int outputs, double mu, int n) {
  const double ij = static_cast<double>(inputs) * outputs;
  return 2.0 * std::pow(delta, 4) * std::numbers::ln2 / (ij * ij * mu) * n * std::log2(static_cast<double>(inputs));
}

struct DerandomizeResult {
  std::vector<int> chosen;  // nu_1..nu_L
  double mu = 0.0;          // min_I sum_nu x_nu F_I(nu)
  double worst_mean = 0.0;  // min_I (1/L) sum_l F_I(nu_l)
  int attempts = 0;
};

/// Draws L indices i.i.d. from x and checks (1/L) sum_l F_I(nu_l) >=
/// (1 - eps) mu for every row I, with mu the smallest row expectation.
/// Up to 10 attempts with derived seeds.
inline DerandomizeResult derandomize(const std::vector<std::vector<double>>& table, std::span<const double> x, int L,
                                     double eps, std::uint64_t seed) {
  if (!(eps > 0.0)) throw InvalidInput("derandomize: eps must be positive");
  if (L < 1 || table.empty()) throw InvalidInput("derandomize: need L >= 1 and a nonempty table");
  double total = 0.0;
  for (double v : x) {
    if (v < 0.0) throw InvalidInput("derandomize: negative weight");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("derandomize: weights must sum to 1");
  DerandomizeResult out;
  out.mu = std::numeric_limits<double>::infinity();
  for (const auto& row : table) {
    if (row.size() != x.size()) throw InvalidInput("derandomize: table row length mismatch");
    double mean = 0.0;
    for (std::size_t v = 0; v < row.size(); ++v) {
      if (row[v] < 0.0 || row[v] > 1.0) throw InvalidInput("derandomize: fidelities must lie in [0,1]");
      mean += x[v] * row[v];
    }
    out.mu = std::min(out.mu, mean);
  }
  for (int attempt = 0; attempt < 10; ++attempt) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt));
    std::vector<int> pick(static_cast<std::size_t>(L));
    for (int& v : pick) v = sample_index(x, rng);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& row : table) {
      double s = 0.0;
      for (int v : pick) s += row[static_cast<std::size_t>(v)];
      worst = std::min(worst, s / L);
    }
    out.attempts = attempt + 1;
    if (worst >= (1.0 - eps) * out.mu) {
      out.chosen = std::move(pick);
      out.worst_mean = worst;
      return out;
    }
  }
  throw BudgetExceeded("derandomize: verification failed after 10 attempts");
}

// ---------------------------------------------------------------------------
// Fidelity audit of the trade-off code

struct AuditRow {
  Sequence input;
  Estimate fidelity;       // E_J[1{J cond. typical} Tr(phi_I Pi(J))^2]
  double lower = 0.0;      // 95% lower confidence bound
  double mean_overlap = 0.0;
  double mean_log2_rank = 0.0;
  bool passes = false;
};

struct AuditReport {
  double bound = 0.0;  // 1 - 4|I||J|/delta^2
  std::vector<AuditRow> rows;
  double classical_leading = 0.0;     // n S(A:C)
  double classical_correction = 0.0;  // n|I||J|eta(delta/sqrt n) + |I||J|log(n+1), unit constants
  double quantum_leading = 0.0;       // n S(A:B|C)
  double quantum_correction = 0.0;    // 3dn|I||J|eta(2 delta|I||J|/sqrt n) + d|J|log(n+1)
  double classical_measured = 0.0;    // log2 M of the simulation codebook
  double quantum_measured = 0.0;      // mean log2 Tr Pi(J)
  bool all_pass = false;
};

struct AuditOptions {
  int inputs = 20;          // typical I sampled
  int outputs_per_input = 64;
  OverlapBasis basis = OverlapBasis::empirical;
  RstOptions rst{};
};

/// For typical I drawn from p^n: J from the channel simulation of the
/// kernel, then projection onto the conditional typical subspace. The
/// fidelity of the decoded state is at least Tr(phi_I Pi)^2 when J is
/// conditionally typical (the projection succeeds with probability
/// Tr(phi_I Pi) and then leaves fidelity Tr(phi_I Pi)); other outcomes are
/// counted as fidelity 0.
inline AuditReport coded_fidelity_audit(const Ensemble& e, const EncodingKernel& k, int n, double delta, std::uint64_t seed,
                                        const AuditOptions& opt = {}) {
  if (n < 1 || n > 400) throw InvalidInput("coded_fidelity_audit: block length must be in [1, 400]");
  if (k.inputs() != e.size()) throw InvalidInput("coded_fidelity_audit: kernel does not match ensemble");
  const ChannelMatrix w = ChannelMatrix::from(k);
  const double ij = static_cast<double>(e.size()) * k.outputs();
  const int d = e.dim();
  std::mt19937_64 rng(seed);

  std::vector<Sequence> panel;
  for (int s = 0; s < opt.inputs; ++s) panel.push_back(sample_typical(e.probs(), n, delta, rng));
  RstOptions ro = opt.rst;
  const RstPlan plan = rst_plan(w, e.probs(), n, delta, panel, ro, rng);

  AuditReport rep;
  rep.bound = 1.0 - 4.0 * ij / (delta * delta);
  rep.classical_leading = n * classical_info(e, k);
  rep.classical_correction = n * ij * eta(delta / std::sqrt(static_cast<double>(n))) + ij * std::log2(n + 1.0);
  rep.quantum_leading = n * conditional_chi(e, k);
  rep.quantum_correction = 3.0 * d * n * ij * eta(2.0 * delta * ij / std::sqrt(static_cast<double>(n))) + d * k.outputs() * std::log2(n + 1.0);
  rep.classical_measured = plan.log_M;
  rep.all_pass = true;
  double rank_sum = 0.0;
  int rank_count = 0;
  for (const auto& model : plan.inputs) {
    AuditRow row;
    row.input = model.input;
    double sum = 0.0, sum_sq = 0.0, ov = 0.0, rk = 0.0;
    int rk_n = 0;
    for (int t = 0; t < opt.outputs_per_input; ++t) {
      const Sequence out = rst_sample_output(model, w, plan.output, delta, rng);
      double f = 0.0;
      if (is_cond_typical(out, model.input, w, delta)) {
        const double o = projector_overlap(model.input, out, e, k, delta, 0.0, opt.basis);
        f = o * o;
        ov += o;
        const double r = log2_projector_rank(model.input, out, e, k, delta, 0.0, opt.basis);
        if (std::isfinite(r)) {
          rk += r;
          ++rk_n;
        }
      }
      sum += f;
      sum_sq += f * f;
    }
    row.fidelity = estimate_from(sum, sum_sq, opt.outputs_per_input);
    row.lower = row.fidelity.lower();
    row.mean_overlap = ov / opt.outputs_per_input;
    row.mean_log2_rank = rk_n > 0 ? rk / rk_n : 0.0;
    rank_sum += rk;
    rank_count += rk_n;
    row.passes = row.lower >= rep.bound;
    rep.all_pass = rep.all_pass && row.passes;
    rep.rows.push_back(std::move(row));
  }
  rep.quantum_measured = rank_count > 0 ? rank_sum / rank_count : 0.0;
  return rep;
}

}  // namespace qtradeoff

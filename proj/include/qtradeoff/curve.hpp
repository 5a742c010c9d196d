// Trade-off curves and the quantities derived from M(E,R): tensor
// combination, blind compression rate, AVS supremum and the
// unitary-mixing monotonicity check.
#pragma once

#include "qtradeoff/errors.hpp"
#include "qtradeoff/qcore.hpp"
#include "qtradeoff/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>
#include <vector>

namespace qtradeoff {

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware).
inline void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// TradeoffCurve

struct CurveSample {
  double rate = 0.0;     // R
  double quantum = 0.0;  // Q
  int grid_resolution = 0;
  std::vector<DecompositionPoint> witness;

  [[nodiscard]] int support() const { return static_cast<int>(witness.size()); }
  [[nodiscard]] EncodingKernel kernel(const Ensemble& e) const { return kernel_from_decomposition(e, witness); }
};

/// Samples of M(E,.) on [0, H(p)]: R strictly increasing, Q nonincreasing
/// and convex.
struct TradeoffCurve {
  std::vector<CurveSample> samples;
  double entropy = 0.0;        // S(E)
  double prior_entropy = 0.0;  // H(p)
  double tolerance = kSolverTol;

  [[nodiscard]] std::size_t size() const { return samples.size(); }

  /// Piecewise-linear interpolation; 0 beyond H(p), S(E) below 0.
  [[nodiscard]] double operator()(double r) const {
    if (samples.empty()) throw InvalidInput("empty curve");
    if (r <= samples.front().rate) return samples.front().quantum;
    if (r >= samples.back().rate) return samples.back().quantum;
    const auto it = std::upper_bound(samples.begin(), samples.end(), r,
                                     [](double v, const CurveSample& s) { return v < s.rate; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double t = (r - a.rate) / (b.rate - a.rate);
    return (1.0 - t) * a.quantum + t * b.quantum;
  }

  /// Largest violation of midpoint convexity over consecutive triples.
  [[nodiscard]] double convexity_violation() const {
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < samples.size(); ++k) {
      const auto& a = samples[k - 1];
      const auto& b = samples[k];
      const auto& c = samples[k + 1];
      const double t = (b.rate - a.rate) / (c.rate - a.rate);
      worst = std::max(worst, b.quantum - ((1.0 - t) * a.quantum + t * c.quantum));
    }
    return worst;
  }
};

namespace detail {

inline std::vector<DecompositionPoint> mix_witnesses(const std::vector<DecompositionPoint>& a,
                                                     const std::vector<DecompositionPoint>& b, double t) {
  std::vector<DecompositionPoint> out;
  for (const auto& w : a)
    if ((1.0 - t) * w.weight > 0.0) out.push_back({w.posterior, (1.0 - t) * w.weight});
  for (const auto& w : b)
    if (t * w.weight > 0.0) out.push_back({w.posterior, t * w.weight});
  return out;
}

/// Replaces increases by the previous sample, then lifts every sample to
/// the lower convex hull. Both operations keep achievability: the earlier
/// witness also satisfies the larger rate budget, and a hull point is
/// attained by mixing its neighbours' decompositions.
inline void enforce_shape(std::vector<CurveSample>& s) {
  for (std::size_t k = 1; k < s.size(); ++k)
    if (s[k].quantum > s[k - 1].quantum) {
      s[k].quantum = s[k - 1].quantum;
      s[k].witness = s[k - 1].witness;
    }
  std::vector<std::size_t> hull;
  for (std::size_t k = 0; k < s.size(); ++k) {
    while (hull.size() >= 2) {
      const auto& a = s[hull[hull.size() - 2]];
      const auto& b = s[hull.back()];
      const double cross = (b.rate - a.rate) * (s[k].quantum - a.quantum) - (b.quantum - a.quantum) * (s[k].rate - a.rate);
      if (cross <= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(k);
  }
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const CurveSample a = s[hull[h]];
    const CurveSample b = s[hull[h + 1]];
    for (std::size_t k = hull[h] + 1; k < hull[h + 1]; ++k) {
      const double t = (s[k].rate - a.rate) / (b.rate - a.rate);
      const double q = (1.0 - t) * a.quantum + t * b.quantum;
      if (q < s[k].quantum) {
        s[k].quantum = q;
        s[k].witness = mix_witnesses(a.witness, b.witness, t);
      }
    }
  }
}

}  // namespace detail

/// M(E,R) at n_samples equally spaced rates in [0, H(p)], solved
/// independently (in parallel) and then made monotone and convex.
inline TradeoffCurve trade_off_curve(const Ensemble& e, int n_samples, const SimplexGrid& grid,
                                     const SolveOptions& opt = {}, int threads = 1) {
  if (n_samples < 2) throw InvalidInput("trade_off_curve: need at least two samples");
  TradeoffCurve c;
  c.entropy = ensemble_entropy(e);
  c.prior_entropy = shannon_entropy(e.probs());
  c.samples.resize(static_cast<std::size_t>(n_samples));
  std::vector<double> tol(static_cast<std::size_t>(n_samples), kSolverTol);
  parallel_for(n_samples, threads, [&](int k) {
    const double r = k == n_samples - 1 ? c.prior_entropy : c.prior_entropy * k / (n_samples - 1);
    SolveOptions o = opt;
    o.seed = opt.seed + static_cast<std::uint64_t>(k);
    const Solution s = solve_M(e, r, grid, o);
    auto& out = c.samples[static_cast<std::size_t>(k)];
    out.rate = r;
    out.quantum = s.value;
    out.grid_resolution = s.grid_resolution;
    out.witness = s.witness;
    tol[static_cast<std::size_t>(k)] = s.tolerance();
  });
  detail::enforce_shape(c.samples);
  c.tolerance = *std::max_element(tol.begin(), tol.end());
  return c;
}

inline TradeoffCurve trade_off_curve(const Ensemble& e, int n_samples, const SolveOptions& opt = {}, int threads = 1) {
  return trade_off_curve(e, n_samples, SimplexGrid::build(e), opt, threads);
}

// ---------------------------------------------------------------------------
// Tensor products

/// min { M1(R1) + M2(R2) : R1 + R2 = R } on the interpolated curves. Both
/// interpolants are convex, so the minimum sits where R1 or R - R1 is a
/// sample rate.
inline double tensor_tradeoff(const TradeoffCurve& c1, const TradeoffCurve& c2, double r) {
  const double h1 = c1.samples.back().rate;
  const double h2 = c2.samples.back().rate;
  if (r < 0.0) throw Infeasible("tensor_tradeoff: negative rate");
  if (r > h1 + h2 + 1e-9) throw InvalidInput("tensor_tradeoff: rate exceeds H(p1) + H(p2)");
  const double lo = std::max(0.0, r - h2);
  const double hi = std::min(h1, r);
  std::vector<double> splits{lo, hi};
  for (const auto& s : c1.samples)
    if (s.rate >= lo && s.rate <= hi) splits.push_back(s.rate);
  for (const auto& s : c2.samples)
    if (r - s.rate >= lo && r - s.rate <= hi) splits.push_back(r - s.rate);
  double best = std::numeric_limits<double>::infinity();
  for (double r1 : splits) best = std::min(best, c1(r1) + c2(r - r1));
  return best;
}

// ---------------------------------------------------------------------------
// Blind compression

struct BlindRate {
  double rate = 0.0;              // sum_l a_l S(E_l)
  double rate_via_entropy = 0.0;  // S(E) - H(a)
  std::vector<std::vector<int>> components;
  std::vector<double> weights;  // a_l
};

/// Irreducible components of E (connected components of the graph with an
/// edge wherever |<phi_i|phi_j>| > 1e-10) and the blind rate, computed both
/// as sum_l a_l S(E_l) and as S(E) - H(a).
inline BlindRate blind_rate(const Ensemble& e) {
  const int m = e.size();
  std::vector<int> parent(static_cast<std::size_t>(m));
  std::iota(parent.begin(), parent.end(), 0);
  const std::function<int(int)> find = [&](int i) {
    while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
    return i;
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (std::abs(e.state(i).amplitudes().dot(e.state(j).amplitudes())) > 1e-10) parent[static_cast<std::size_t>(find(j))] = find(i);

  BlindRate out;
  std::vector<int> index(static_cast<std::size_t>(m), -1);
  for (int i = 0; i < m; ++i) {
    const int r = find(i);
    if (index[static_cast<std::size_t>(r)] < 0) {
      index[static_cast<std::size_t>(r)] = static_cast<int>(out.components.size());
      out.components.emplace_back();
    }
    out.components[static_cast<std::size_t>(index[static_cast<std::size_t>(r)])].push_back(i);
  }
  for (const auto& comp : out.components) {
    double a = 0.0;
    for (int i : comp) a += e.prob(i);
    out.weights.push_back(a);
    if (a <= 0.0) continue;
    std::vector<PureState> s;
    std::vector<double> p;
    for (int i : comp) {
      s.push_back(e.state(i));
      p.push_back(e.prob(i) / a);
    }
    out.rate += a * spectrum_entropy(mixture(s, p));
  }
  out.rate_via_entropy = ensemble_entropy(e) - shannon_entropy(out.weights);
  if (std::abs(out.rate - out.rate_via_entropy) > kIdentityTol)
    throw std::logic_error("blind_rate: component formula and entropy formula disagree");
  return out;
}

// ---------------------------------------------------------------------------
// Arbitrarily varying sources

struct AvsResult {
  double value = 0.0;
  std::vector<double> prior;    // maximizing p
  std::vector<double> weights;  // its barycentric coordinates over the vertices
  int evaluations = 0;
};

namespace detail {

inline std::vector<std::vector<double>> simplex_lattice(int n, int k) {
  std::vector<std::vector<double>> out;
  std::vector<int> c(static_cast<std::size_t>(n), 0);
  const std::function<void(int, int)> rec = [&](int pos, int rem) {
    if (pos == n - 1) {
      c[static_cast<std::size_t>(pos)] = rem;
      std::vector<double> x(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = static_cast<double>(c[static_cast<std::size_t>(i)]) / k;
      out.push_back(std::move(x));
      return;
    }
    for (int v = rem; v >= 0; --v) {
      c[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, rem - v);
    }
  };
  rec(0, k);
  return out;
}

}  // namespace detail

/// sup of M(E_p, R) over p in conv(vertices). Coarse search over the hull
/// (a resolution-16 lattice when it has at most 1000 points, otherwise the
/// centroids of all 2^V - 1 vertex subsets), then Nelder-Mead on the
/// barycentric weights from the best mesh point.
inline AvsResult avs_sup(const std::vector<PureState>& states, const std::vector<std::vector<double>>& vertices, double r,
                         const SimplexGrid& grid, const SolveOptions& opt = {}, int threads = 1) {
  if (vertices.empty()) throw InvalidInput("avs_sup: empty vertex list");
  const int nv = static_cast<int>(vertices.size());
  const std::size_t m = states.size();
  for (const auto& v : vertices) {
    if (v.size() != m) throw InvalidInput("avs_sup: vertex length does not match the number of states");
    Ensemble(states, v);  // validates
  }

  const auto prior_of = [&](const std::vector<double>& w) {
    std::vector<double> p(m, 0.0);
    for (int v = 0; v < nv; ++v)
      for (std::size_t i = 0; i < m; ++i) p[i] += w[static_cast<std::size_t>(v)] * vertices[static_cast<std::size_t>(v)][i];
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& x : p) x = std::max(0.0, x) / total;
    return p;
  };
  const auto value_at = [&](const std::vector<double>& w) {
    const Ensemble e(states, prior_of(w));
    return solve_M(e, std::min(r, shannon_entropy(e.probs())), grid.with_prior(e), opt).value;
  };

  std::vector<std::vector<double>> mesh;
  if (SimplexGrid::lattice_size(nv, 16) <= 1000.0) {
    mesh = detail::simplex_lattice(nv, 16);
  } else {
    for (unsigned mask = 1; mask < (1u << nv); ++mask) {
      std::vector<double> w(static_cast<std::size_t>(nv), 0.0);
      const int bits = std::popcount(mask);
      for (int v = 0; v < nv; ++v)
        if (mask & (1u << v)) w[static_cast<std::size_t>(v)] = 1.0 / bits;
      mesh.push_back(std::move(w));
    }
  }
  std::vector<double> values(mesh.size());
  parallel_for(static_cast<int>(mesh.size()), threads, [&](int k) { values[static_cast<std::size_t>(k)] = value_at(mesh[static_cast<std::size_t>(k)]); });

  AvsResult out;
  out.evaluations = static_cast<int>(mesh.size());
  const std::size_t best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  out.value = values[best];
  out.weights = mesh[best];

  if (nv >= 2) {
    // Nelder-Mead over the first nv-1 barycentric coordinates; points
    // outside the simplex score -infinity.
    const int n = nv - 1;
    const auto full = [&](const std::vector<double>& y) -> std::vector<double> {
      std::vector<double> w(y);
      double s = 0.0;
      for (double v : y) {
        if (v < -1e-12) return {};
        s += v;
      }
      if (s > 1.0 + 1e-12) return {};
      w.push_back(std::max(0.0, 1.0 - s));
      for (double& v : w) v = std::max(0.0, v);
      return w;
    };
    const auto score = [&](const std::vector<double>& y) {
      const auto w = full(y);
      ++out.evaluations;
      return w.empty() ? -std::numeric_limits<double>::infinity() : value_at(w);
    };
    std::vector<std::vector<double>> simplex;
    std::vector<double> f;
    std::vector<double> y0(mesh[best].begin(), mesh[best].end() - 1);
    simplex.push_back(y0);
    f.push_back(out.value);
    for (int i = 0; i < n; ++i) {
      std::vector<double> y = y0;
      y[static_cast<std::size_t>(i)] += (y[static_cast<std::size_t>(i)] + 1.0 / 16.0 <= 1.0 ? 1.0 : -1.0) / 16.0;
      simplex.push_back(y);
      f.push_back(score(y));
    }
    for (int it = 0; it < 40 * nv; ++it) {
      std::vector<std::size_t> order(simplex.size());
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });
      const std::size_t hi = order.front();
      const std::size_t lo = order.back();
      double spread = 0.0;
      for (const auto& y : simplex)
        for (int i = 0; i < n; ++i) spread = std::max(spread, std::abs(y[static_cast<std::size_t>(i)] - simplex[hi][static_cast<std::size_t>(i)]));
      if (spread < 1e-4) break;

      std::vector<double> centroid(static_cast<std::size_t>(n), 0.0);
      for (std::size_t k = 0; k < simplex.size(); ++k)
        if (k != lo)
          for (int i = 0; i < n; ++i) centroid[static_cast<std::size_t>(i)] += simplex[k][static_cast<std::size_t>(i)] / n;
      const auto along = [&](double t) {
        std::vector<double> y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
          y[static_cast<std::size_t>(i)] = centroid[static_cast<std::size_t>(i)] + t * (simplex[lo][static_cast<std::size_t>(i)] - centroid[static_cast<std::size_t>(i)]);
        return y;
      };
      const auto yr = along(-1.0);
      const double fr = score(yr);
      if (fr > f[hi]) {
        const auto ye = along(-2.0);
        const double fe = score(ye);
        if (fe > fr) simplex[lo] = ye, f[lo] = fe;
        else simplex[lo] = yr, f[lo] = fr;
        continue;
      }
      if (fr > f[order[order.size() - 2]]) {
        simplex[lo] = yr;
        f[lo] = fr;
        continue;
      }
      const auto yc = along(0.5);
      const double fc = score(yc);
      if (fc > f[lo]) {
        simplex[lo] = yc;
        f[lo] = fc;
        continue;
      }
      for (std::size_t k = 0; k < simplex.size(); ++k) {
        if (k == hi) continue;
        for (int i = 0; i < n; ++i)
          simplex[k][static_cast<std::size_t>(i)] = 0.5 * (simplex[k][static_cast<std::size_t>(i)] + simplex[hi][static_cast<std::size_t>(i)]);
        f[k] = score(simplex[k]);
      }
    }
    const std::size_t top = static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
    if (f[top] > out.value) {
      out.value = f[top];
      out.weights = full(simplex[top]);
    }
  }
  out.prior = prior_of(out.weights);
  return out;
}

// ---------------------------------------------------------------------------
// Unitary mixing

struct MonotonicityReport {
  bool holds = false;
  double original = 0.0;  // M(E,R)
  double mixed = 0.0;     // M(F,R)
};

/// Builds F = {U_k|phi_i>, p_i a_k} and compares M(E,R) with M(F,R) at the
/// common rate R, each on its default grid.
inline MonotonicityReport schur_monotonicity_check(const Ensemble& e, const std::vector<CMatrix>& unitaries,
                                                   const std::vector<double>& weights, double r,
                                                   const SolveOptions& opt = {}) {
  if (unitaries.empty() || unitaries.size() != weights.size())
    throw InvalidInput("schur_monotonicity_check: need one weight per unitary");
  std::vector<PureState> s;
  std::vector<double> p;
  for (std::size_t k = 0; k < unitaries.size(); ++k) {
    const CMatrix& u = unitaries[k];
    if (u.rows() != e.dim() || !is_unitary(u, 1e-10)) throw InvalidInput("schur_monotonicity_check: matrix is not unitary");
    for (int i = 0; i < e.size(); ++i) {
      s.push_back(PureState::normalized(u * e.state(i).amplitudes()));
      p.push_back(e.prob(i) * weights[k]);
    }
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= total;
  const Ensemble f(std::move(s), std::move(p));

  MonotonicityReport out;
  const Solution a = solve_M(e, r, opt);
  const Solution b = solve_M(f, r, SimplexGrid::build(f, f.size() <= 4 ? SimplexGrid::default_resolution(f.size()) : 0), opt);
  out.original = a.value;
  out.mixed = b.value;
  out.holds = a.value <= b.value + std::max(a.tolerance(), b.tolerance());
  return out;
}

}  // namespace qtradeoff

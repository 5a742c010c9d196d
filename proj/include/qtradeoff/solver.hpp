// M(E,R), N(E,R) and X(E,R) via the barycentric formulation: an encoding is
// a probability measure on posteriors x in the simplex whose barycenter is
// the prior p. Objective and rate constraint are linear in the weights once
// every candidate posterior carries S(f(x)) and H(x), where
// f(x) = sum_i x_i |phi_i><phi_i|.
//
// Candidates come from a lattice on the simplex (SimplexGrid). The LP over
// the lattice is then refined by column generation: the LP duals define a
// reduced cost over the whole simplex, which is minimized locally by
// exponentiated-gradient descent, and improving posteriors enter the LP.
#pragma once

#include "qtradeoff/ensembles.hpp"
#include "qtradeoff/errors.hpp"
#include "qtradeoff/lp.hpp"
#include "qtradeoff/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qtradeoff {

inline constexpr double kSolverTol = 1e-6;

// ---------------------------------------------------------------------------
// Candidate posteriors

struct GridPoint {
  std::vector<double> x;
  double quantum = 0.0;  // S(f(x))
  double shannon = 0.0;  // H(x)
};

inline GridPoint make_grid_point(const Ensemble& e, std::vector<double> x) {
  GridPoint g;
  g.quantum = spectrum_entropy(mixture(e.states(), x));
  g.shannon = shannon_entropy(x);
  g.x = std::move(x);
  return g;
}

/// Integer-coordinate points of the simplex with denominator k, plus the
/// prior. Resolution 0 means vertices and prior only (column generation
/// supplies everything else).
class SimplexGrid {
 public:
  static constexpr double kMaxPoints = 5e6;

  /// 64, 24, 12 for m = 2, 3, 4. Larger m has no default: the lattice size
  /// C(k+m-1, m-1) grows like k^(m-1).
  static int default_resolution(int m) {
    switch (m) {
      case 1: return 1;
      case 2: return 64;
      case 3: return 24;
      case 4: return 12;
      default:
        throw InvalidInput("grid resolution must be supplied for m >= 5 (" + std::to_string(m) +
                           " states); lattice size grows like k^(m-1)");
    }
  }

  static double lattice_size(int m, int k) {
    double c = 1.0;
    for (int i = 1; i < m; ++i) c = c * (k + i) / i;
    return c;
  }

  static SimplexGrid build(const Ensemble& e, int k) {
    if (k < 0) throw InvalidInput("grid resolution must be nonnegative");
    SimplexGrid g;
    g.m_ = e.size();
    g.k_ = k;
    if (k == 0) {
      for (int i = 0; i < g.m_; ++i) {
        std::vector<double> x(static_cast<std::size_t>(g.m_), 0.0);
        x[static_cast<std::size_t>(i)] = 1.0;
        g.pts_.push_back(make_grid_point(e, std::move(x)));
      }
    } else {
      if (lattice_size(g.m_, k) > kMaxPoints)
        throw BudgetExceeded("simplex lattice with k=" + std::to_string(k) + " and m=" + std::to_string(g.m_) +
                             " exceeds the point budget");
      std::vector<int> counts(static_cast<std::size_t>(g.m_), 0);
      g.enumerate(e, counts, 0, k);
    }
    g.insert(e, e.probs());
    return g;
  }

  static SimplexGrid build(const Ensemble& e) { return build(e, default_resolution(e.size())); }

  /// Adds x unless an identical point is present.
  void insert(const Ensemble& e, std::vector<double> x) {
    if (!contains(x)) pts_.push_back(make_grid_point(e, std::move(x)));
  }

  [[nodiscard]] bool contains(std::span<const double> x, double tol = 1e-14) const {
    for (const auto& p : pts_) {
      bool same = true;
      for (std::size_t i = 0; i < x.size() && same; ++i) same = std::abs(p.x[i] - x[i]) <= tol;
      if (same) return true;
    }
    return false;
  }

  /// Same lattice for a different prior on the same states.
  [[nodiscard]] SimplexGrid with_prior(const Ensemble& e) const {
    SimplexGrid g = *this;
    g.insert(e, e.probs());
    return g;
  }

  [[nodiscard]] int resolution() const { return k_; }
  [[nodiscard]] int dimension() const { return m_; }
  [[nodiscard]] const std::vector<GridPoint>& points() const { return pts_; }

 private:
  void enumerate(const Ensemble& e, std::vector<int>& counts, int pos, int remaining) {
    if (pos == m_ - 1) {
      counts[static_cast<std::size_t>(pos)] = remaining;
      std::vector<double> x(static_cast<std::size_t>(m_));
      for (int i = 0; i < m_; ++i) x[static_cast<std::size_t>(i)] = static_cast<double>(counts[static_cast<std::size_t>(i)]) / k_;
      pts_.push_back(make_grid_point(e, std::move(x)));
      return;
    }
    for (int c = remaining; c >= 0; --c) {
      counts[static_cast<std::size_t>(pos)] = c;
      enumerate(e, counts, pos + 1, remaining - c);
    }
  }

  int m_ = 0;
  int k_ = 0;
  std::vector<GridPoint> pts_;
};

// ---------------------------------------------------------------------------
// Results

struct DecompositionPoint {
  std::vector<double> posterior;  // q(.|j)
  double weight = 0.0;            // q_j
};

/// Bayes inversion p(j|i) = q_j q(i|j) / p_i. Rows with p_i = 0 get p(j|i) = q_j.
inline EncodingKernel kernel_from_decomposition(const Ensemble& e, const std::vector<DecompositionPoint>& pts) {
  const int m = e.size();
  RMatrix k(m, static_cast<Eigen::Index>(pts.size()));
  for (int i = 0; i < m; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double v = e.prob(i) > 0.0 ? pts[j].weight * pts[j].posterior[static_cast<std::size_t>(i)] : pts[j].weight;
      k(i, static_cast<Eigen::Index>(j)) = std::max(0.0, v);
      row += k(i, static_cast<Eigen::Index>(j));
    }
    if (row <= 0.0) throw InvalidInput("decomposition does not cover label " + std::to_string(i));
    k.row(i) /= row;
  }
  return EncodingKernel(std::move(k));
}

struct Solution {
  double value = 0.0;  // optimal Q (or N) in bits
  double rate = 0.0;   // realized value of the constrained quantity
  std::vector<DecompositionPoint> witness;
  int grid_resolution = 0;
  int rounds = 0;            // column-generation rounds
  int columns = 0;           // LP columns at termination
  double pricing_gap = 0.0;  // -(most negative reduced cost found at the final duals)

  [[nodiscard]] int support() const { return static_cast<int>(witness.size()); }
  /// Declared accuracy of value: the Lagrangian gap estimate, floored at 1e-6.
  [[nodiscard]] double tolerance() const { return std::max(kSolverTol, pricing_gap); }
  [[nodiscard]] EncodingKernel kernel(const Ensemble& e) const { return kernel_from_decomposition(e, witness); }
};

struct SolveOptions {
  bool refine = true;
  int max_rounds = 500;
  double improvement_tol = 1e-9;
  int stall_rounds = 3;
  int random_starts = 4;
  int lattice_starts = 4;
  int descent_steps = 300;
  std::uint64_t seed = 0x51ed5eedULL;
};

enum class RateKind {
  classical,  // S(A:C) <= R           (M and X)
  total       // S(A:C) + S(A:B|C) <= R (N)
};

// ---------------------------------------------------------------------------
// Column generation engine

namespace detail {

/// Reduced cost of a posterior at fixed duals:
///   rc(x) = alpha S(f(x)) - lambda H(x) - y.x + lambda H(p)
/// with alpha = 1 (+ lambda for RateKind::total).
struct ReducedCost {
  const Ensemble* ens = nullptr;
  std::vector<double> y;
  double lambda = 0.0;
  double alpha = 1.0;
  double offset = 0.0;

  double of_point(const GridPoint& g) const {
    double yx = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) yx += y[i] * g.x[i];
    return alpha * g.quantum - lambda * g.shannon - yx + offset;
  }

  /// Value and gradient (up to an additive constant common to all
  /// coordinates, which is irrelevant on the simplex).
  double evaluate(std::span<const double> x, std::vector<double>& grad) const {
    const int m = ens->size();
    const CMatrix rho = mixture(ens->states(), x);
    const HermitianEigen eig = jacobi_eigen(rho);
    double s = 0.0;
    RVector logr(eig.values.size());
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
      const double r = std::clamp(eig.values[k], 0.0, 1.0);
      s -= xlog2x(r);
      logr[k] = std::log2(std::max(r, 1e-30));
    }
    double h = 0.0;
    double yx = 0.0;
    grad.assign(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
      const double xi = x[static_cast<std::size_t>(i)];
      h -= xlog2x(xi);
      yx += y[static_cast<std::size_t>(i)] * xi;
      const CVector proj = eig.vectors.adjoint() * ens->state(i).amplitudes();
      double lr = 0.0;
      for (Eigen::Index k = 0; k < proj.size(); ++k) lr += std::norm(proj[k]) * logr[k];
      grad[static_cast<std::size_t>(i)] =
          -alpha * lr + lambda * std::log2(std::max(xi, 1e-300)) - y[static_cast<std::size_t>(i)];
    }
    return alpha * s - lambda * h - yx + offset;
  }
};

/// Local minimization of the reduced cost over the simplex by
/// exponentiated gradient with backtracking; when lambda > 0 the
/// Blahut-Arimoto-style fixed point x_i ~ 2^((y_i + alpha <phi_i|log rho|phi_i>)/lambda)
/// is tried as an extra proposal each step.
inline double descend(const ReducedCost& rc, std::vector<double>& x, int steps) {
  const std::size_t m = x.size();
  std::vector<double> grad, trial_grad, trial(m);
  double value = rc.evaluate(x, grad);
  double step = 1.0;
  for (int it = 0; it < steps; ++it) {
    bool moved = false;
    double best_value = value;
    std::vector<double> best_x;

    if (rc.lambda > 1e-12) {
      // grad_i = -alpha lr_i + lambda log x_i - y_i  =>  alpha lr_i + y_i = lambda log x_i - grad_i
      double mx = -std::numeric_limits<double>::infinity();
      std::vector<double> ex(m);
      for (std::size_t i = 0; i < m; ++i) {
        if (x[i] <= 0.0) {
          ex[i] = -std::numeric_limits<double>::infinity();
          continue;
        }
        ex[i] = (rc.lambda * std::log2(x[i]) - grad[i]) / rc.lambda;
        mx = std::max(mx, ex[i]);
      }
      double total = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        trial[i] = std::isfinite(ex[i]) ? std::exp2(ex[i] - mx) : 0.0;
        total += trial[i];
      }
      for (double& t : trial) t /= total;
      const double v = rc.evaluate(trial, trial_grad);
      if (v < best_value - 1e-15) {
        best_value = v;
        best_x = trial;
      }
    }

    for (int bt = 0; bt < 40; ++bt) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i)
        if (x[i] > 0.0) mx = std::max(mx, -step * grad[i]);
      double total = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        trial[i] = x[i] > 0.0 ? x[i] * std::exp(-step * grad[i] - mx) : 0.0;
        total += trial[i];
      }
      for (double& t : trial) t /= total;
      const double v = rc.evaluate(trial, trial_grad);
      if (v < best_value - 1e-15) {
        best_value = v;
        best_x = trial;
        step = std::min(step * 2.0, 64.0);
        break;
      }
      step *= 0.5;
      if (step < 1e-12) break;
    }

    if (!best_x.empty() && best_value < value - 1e-15) {
      const double improvement = value - best_value;
      x = std::move(best_x);
      value = rc.evaluate(x, grad);
      moved = true;
      if (improvement < 1e-13) break;
    }
    if (!moved) break;
  }
  return value;
}

/// Maps a posterior to the member posteriors that share one LP weight
/// (identity by default; group orbits for covariant solves).
using Expander = std::function<std::vector<std::vector<double>>(const std::vector<double>&)>;

class DecompositionLp {
 public:
  DecompositionLp(const Ensemble& e, RateKind kind, double rate, Expander expand = {})
      : e_(e), kind_(kind), hp_(shannon_entropy(e.probs())), expand_(std::move(expand)),
        lp_(rhs(e, rate)) {
    std::vector<double> slack(static_cast<std::size_t>(e.size() + 1), 0.0);
    slack.back() = 1.0;
    lp_.add_column(slack, 0.0);
    members_.push_back({});
  }

  void add(const GridPoint& g) {
    std::vector<std::vector<double>> members = expand_ ? expand_(g.x) : std::vector<std::vector<double>>{g.x};
    const std::size_t m = static_cast<std::size_t>(e_.size());
    std::vector<double> col(m + 1, 0.0);
    for (const auto& x : members)
      for (std::size_t i = 0; i < m; ++i) col[i] += x[i] / static_cast<double>(members.size());
    col[m] = coefficient(g);
    lp_.add_column(col, g.quantum);
    members_.push_back(std::move(members));
    points_.push_back(g);
  }

  [[nodiscard]] double coefficient(const GridPoint& g) const {
    return hp_ - g.shannon + (kind_ == RateKind::total ? g.quantum : 0.0);
  }

  lp::Result solve() { return lp_.solve(); }

  [[nodiscard]] ReducedCost reduced_cost(const lp::Result& r, const std::function<std::vector<double>(std::vector<double>)>& sym) const {
    ReducedCost rc;
    rc.ens = &e_;
    rc.y.assign(r.duals.begin(), r.duals.end() - 1);
    if (sym) rc.y = sym(rc.y);
    rc.lambda = -r.duals.back();
    rc.alpha = 1.0 + (kind_ == RateKind::total ? rc.lambda : 0.0);
    rc.offset = rc.lambda * hp_;
    return rc;
  }

  /// Witness from an optimal basis; column 0 is the slack.
  [[nodiscard]] std::vector<DecompositionPoint> witness(const lp::Result& r) const {
    std::vector<DecompositionPoint> out;
    for (std::size_t j = 1; j < r.x.size(); ++j) {
      if (r.x[j] <= 1e-10) continue;  // degenerate basic columns
      const auto& mem = members_[j];
      for (const auto& x : mem) out.push_back({x, r.x[j] / static_cast<double>(mem.size())});
    }
    double total = 0.0;
    for (const auto& p : out) total += p.weight;
    for (auto& p : out) p.weight /= total;
    return out;
  }

  [[nodiscard]] const GridPoint& point(int column) const { return points_[static_cast<std::size_t>(column - 1)]; }
  [[nodiscard]] int columns() const { return lp_.columns(); }

 private:
  static std::vector<double> rhs(const Ensemble& e, double rate) {
    std::vector<double> b(e.probs());
    b.push_back(rate);
    return b;
  }

  const Ensemble& e_;
  RateKind kind_;
  double hp_;
  Expander expand_;
  lp::RevisedSimplex lp_;
  std::vector<std::vector<std::vector<double>>> members_;
  std::vector<GridPoint> points_;
};

struct EngineHooks {
  Expander expand;                                              // orbit expansion
  std::function<std::vector<double>(std::vector<double>)> symmetrize_duals;
};

inline Solution run_decomposition(const Ensemble& e, RateKind kind, double rate, const SimplexGrid& grid,
                                  const SolveOptions& opt, const EngineHooks& hooks = {},
                                  const std::vector<GridPoint>* candidates = nullptr) {
  if (grid.dimension() != e.size()) throw InvalidInput("grid dimension does not match ensemble size");
  if (!grid.contains(e.probs())) throw std::logic_error("grid is missing the prior");

  DecompositionLp lp(e, kind, rate, hooks.expand);
  const std::vector<GridPoint>& pool = candidates ? *candidates : grid.points();
  for (const auto& g : pool) lp.add(g);

  lp::Result res = lp.solve();
  if (res.status == lp::Status::infeasible) throw Infeasible("no decomposition satisfies the rate constraint");
  if (res.status != lp::Status::optimal) throw std::runtime_error("decomposition LP did not reach optimality");

  Solution sol;
  sol.grid_resolution = grid.resolution();
  std::mt19937_64 rng(opt.seed);
  const std::size_t m = static_cast<std::size_t>(e.size());
  std::vector<GridPoint> added;
  int stall = 0;

  if (opt.refine) {
    for (int round = 0; round < opt.max_rounds; ++round) {
      const ReducedCost rc = lp.reduced_cost(res, hooks.symmetrize_duals);

      std::vector<std::vector<double>> starts;
      for (int col : res.basis)
        if (col > 0) {
          std::vector<double> x = lp.point(col).x;
          starts.push_back(x);
          for (std::size_t i = 0; i < m; ++i) x[i] = 0.999 * x[i] + 0.001 / static_cast<double>(m);
          starts.push_back(std::move(x));
        }
      std::vector<std::pair<double, std::size_t>> ranked;
      ranked.reserve(pool.size() + added.size());
      for (std::size_t k = 0; k < pool.size(); ++k) ranked.emplace_back(rc.of_point(pool[k]), k);
      const std::size_t nl = std::min<std::size_t>(static_cast<std::size_t>(opt.lattice_starts), ranked.size());
      std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(nl), ranked.end());
      for (std::size_t k = 0; k < nl; ++k) {
        std::vector<double> x = pool[ranked[k].second].x;
        for (std::size_t i = 0; i < m; ++i) x[i] = 0.99 * x[i] + 0.01 * e.probs()[i];
        starts.push_back(std::move(x));
      }
      for (int k = 0; k < opt.random_starts; ++k) starts.push_back(random_distribution(e.size(), rng));

      double best = 0.0;
      std::vector<std::vector<double>> fresh;
      for (auto& x : starts) {
        const double v = descend(rc, x, opt.descent_steps);
        best = std::min(best, v);
        if (v >= -1e-10) continue;
        // near-duplicate columns make the basis ill-conditioned
        const auto close = [&](const std::vector<double>& f) {
          double diff = 0.0;
          for (std::size_t i = 0; i < m; ++i) diff = std::max(diff, std::abs(f[i] - x[i]));
          return diff < 1e-6;
        };
        bool dup = false;
        for (const auto& f : fresh) dup = dup || close(f);
        for (int col : res.basis)
          if (col > 0) dup = dup || close(lp.point(col).x);
        if (!dup) fresh.push_back(x);
      }
      // Lattice points are already columns; their reduced cost only informs the gap.
      if (!ranked.empty()) best = std::min(best, ranked.front().first);
      sol.pricing_gap = std::max(0.0, -best);
      sol.rounds = round + 1;
      if (fresh.empty()) break;

      const double before = res.objective;
      for (auto& x : fresh) {
        added.push_back(make_grid_point(e, std::move(x)));
        lp.add(added.back());
      }
      res = lp.solve();
      if (res.status != lp::Status::optimal) throw std::runtime_error("decomposition LP failed during refinement");
      stall = (before - res.objective < opt.improvement_tol) ? stall + 1 : 0;
      // degenerate pivots move the duals without moving the objective
      if (stall >= opt.stall_rounds && (sol.pricing_gap <= kSolverTol || stall >= 4 * opt.stall_rounds)) break;
    }
  }

  sol.witness = lp.witness(res);
  sol.value = 0.0;
  sol.rate = 0.0;
  const double hp = shannon_entropy(e.probs());
  for (const auto& w : sol.witness) {
    const double s = spectrum_entropy(mixture(e.states(), w.posterior));
    const double h = shannon_entropy(w.posterior);
    sol.value += w.weight * s;
    sol.rate += w.weight * ((kind == RateKind::total ? s : 0.0) - h);
  }
  sol.rate += hp;
  sol.rate = std::max(0.0, sol.rate);
  sol.columns = lp.columns();
  return sol;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public operations

/// M(E,R) = min S(A:B|C) subject to S(A:C) <= R.
inline Solution solve_M(const Ensemble& e, double rate, const SimplexGrid& grid, const SolveOptions& opt = {}) {
  if (rate < 0.0) throw Infeasible("classical rate must be nonnegative");
  const double hp = shannon_entropy(e.probs());
  if (rate > hp + 1e-9) rate = hp;
  return detail::run_decomposition(e, RateKind::classical, std::min(rate, hp), grid, opt);
}

inline Solution solve_M(const Ensemble& e, double rate, const SolveOptions& opt = {}) {
  return solve_M(e, rate, SimplexGrid::build(e), opt);
}

/// X(E,R) = R + M(E,R).
inline double solve_X(const Ensemble& e, double rate, const SimplexGrid& grid, const SolveOptions& opt = {}) {
  return rate + solve_M(e, rate, grid, opt).value;
}

/// N(E,R) = min S(A:B|C) subject to S(A:BC) <= R. Infeasible below S(E).
inline Solution solve_N_rsp(const Ensemble& e, double rate, const SimplexGrid& grid, const SolveOptions& opt = {}) {
  const double se = ensemble_entropy(e);
  if (rate < se - 1e-9)
    throw Infeasible("N(E,R) requires R >= S(E) = " + std::to_string(se) + ", got " + std::to_string(rate));
  return detail::run_decomposition(e, RateKind::total, std::max(rate, se), grid, opt);
}

}  // namespace qtradeoff

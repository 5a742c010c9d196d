// Finite group actions on ensembles: verification, orbits, symmetrization
// and the covariant (orbit-restricted) version of the decomposition LP.
#pragma once

#include "qtradeoff/errors.hpp"
#include "qtradeoff/qcore.hpp"
#include "qtradeoff/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace qtradeoff {

/// One group element: label permutation g (perm[i] = g(i), zero-based) and
/// a unitary with U|phi_i><phi_i|U^dag = |phi_g(i)><phi_g(i)|.
struct GroupElement {
  std::vector<int> perm;
  CMatrix unitary;
};

struct GroupAction {
  std::vector<GroupElement> elements;
  [[nodiscard]] int order() const { return static_cast<int>(elements.size()); }

  /// Identity element only.
  static GroupAction trivial(int m, int d) {
    std::vector<int> id(static_cast<std::size_t>(m));
    std::iota(id.begin(), id.end(), 0);
    return {{{id, CMatrix::Identity(d, d)}}};
  }
};

struct ActionCheck {
  bool ok = true;
  int element = -1;  // first offending element (or -1)
  int label = -1;    // first offending label (or -1)
  double gap = 0.0;  // size of the violation
  std::string reason;
};

namespace detail {

inline bool is_permutation(const std::vector<int>& p, int m) {
  if (static_cast<int>(p.size()) != m) return false;
  std::vector<bool> seen(static_cast<std::size_t>(m), false);
  for (int v : p) {
    if (v < 0 || v >= m || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

inline double projective_distance(const CMatrix& a, const CMatrix& b) {
  // 0 iff a = c b for a unit phase c
  const double d = static_cast<double>(a.rows());
  return std::abs(d - std::abs((a.adjoint() * b).trace()));
}

}  // namespace detail

/// Checks permutations, unitarity, the covariance relation at projector
/// level, presence of the identity, and closure up to phase. Reports the
/// first violation.
inline ActionCheck verify_action(const Ensemble& e, const GroupAction& g, double tol = 1e-9) {
  const int m = e.size();
  const int d = e.dim();
  const auto fail = [](int el, int lab, double gap, std::string why) { return ActionCheck{false, el, lab, gap, std::move(why)}; };
  if (g.elements.empty()) return fail(-1, -1, 0.0, "empty group");
  bool has_identity = false;
  for (int k = 0; k < g.order(); ++k) {
    const auto& el = g.elements[static_cast<std::size_t>(k)];
    if (!detail::is_permutation(el.perm, m)) return fail(k, -1, 0.0, "not a permutation of the labels");
    if (el.unitary.rows() != d || el.unitary.cols() != d) return fail(k, -1, 0.0, "unitary has wrong dimension");
    const double ugap = (el.unitary.adjoint() * el.unitary - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (ugap > tol) return fail(k, -1, ugap, "matrix is not unitary");
    bool id = true;
    for (int i = 0; i < m; ++i) id = id && el.perm[static_cast<std::size_t>(i)] == i;
    has_identity = has_identity || id;
    for (int i = 0; i < m; ++i) {
      const CMatrix moved = el.unitary * e.state(i).projector() * el.unitary.adjoint();
      const double gap = (moved - e.state(el.perm[static_cast<std::size_t>(i)]).projector()).cwiseAbs().maxCoeff();
      if (gap > tol) return fail(k, i, gap, "U_g phi_i U_g^dag != phi_g(i)");
    }
  }
  if (!has_identity) return fail(-1, -1, 0.0, "identity element missing");
  for (int a = 0; a < g.order(); ++a)
    for (int b = 0; b < g.order(); ++b) {
      const auto& ga = g.elements[static_cast<std::size_t>(a)];
      const auto& gb = g.elements[static_cast<std::size_t>(b)];
      std::vector<int> comp(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) comp[static_cast<std::size_t>(i)] = ga.perm[static_cast<std::size_t>(gb.perm[static_cast<std::size_t>(i)])];
      const CMatrix u = ga.unitary * gb.unitary;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : g.elements)
        if (c.perm == comp) best = std::min(best, detail::projective_distance(c.unitary, u));
      if (best > 1e-6) return fail(a, b, best, "not closed under composition");
    }
  return {};
}

/// Orbits of the label action, each sorted, ordered by smallest member.
inline std::vector<std::vector<int>> orbits(const GroupAction& g, int m) {
  std::vector<int> parent(static_cast<std::size_t>(m));
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int i) {
    while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)];
    return i;
  };
  for (const auto& el : g.elements)
    for (int i = 0; i < m; ++i) {
      const int a = find(i);
      const int b = find(el.perm[static_cast<std::size_t>(i)]);
      if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < m; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

/// Group average (1/|G|) sum_g p^g, where p^g(i) = p(g^-1 i).
inline std::vector<double> symmetrize(const std::vector<double>& p, const GroupAction& g) {
  std::vector<double> out(p.size(), 0.0);
  for (const auto& el : g.elements)
    for (std::size_t i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(el.perm[i])] += p[i] / g.order();
  return out;
}

/// Z2 x Z2 acting on BB84(theta): rotation by pi/2 and reflection about the
/// theta/2 axis.
inline GroupAction bb84_action(double theta) {
  CMatrix rot(2, 2);
  rot << 0.0, -1.0, 1.0, 0.0;
  CMatrix ref(2, 2);
  ref << std::cos(theta), std::sin(theta), std::sin(theta), -std::cos(theta);
  const std::vector<int> prot{2, 3, 0, 1};
  const std::vector<int> pref{1, 0, 3, 2};
  std::vector<int> both(4);
  for (int i = 0; i < 4; ++i) both[static_cast<std::size_t>(i)] = prot[static_cast<std::size_t>(pref[static_cast<std::size_t>(i)])];
  return {{{{0, 1, 2, 3}, CMatrix::Identity(2, 2)}, {prot, rot}, {pref, ref}, {both, rot * ref}}};
}

/// Z2 swapping two real qubit states at angles a and b (reflection about
/// the bisecting axis).
inline GroupAction swap_action(double a, double b) {
  CMatrix ref(2, 2);
  ref << std::cos(a + b), std::sin(a + b), std::sin(a + b), -std::cos(a + b);
  return {{{{0, 1}, CMatrix::Identity(2, 2)}, {{1, 0}, ref}}};
}

struct CovariantSolution {
  Solution solution;
  int group_order = 1;
  int orbit_count = 0;  // t
  int families = 0;     // orbit-closed candidate families in the initial LP
  [[nodiscard]] int support_bound() const { return group_order * (orbit_count + 1); }
};

namespace detail {

/// Distinct images x^g of a posterior, canonical (lexicographically
/// smallest after rounding) first.
inline std::vector<std::vector<double>> orbit_of(const std::vector<double>& x, const GroupAction& g) {
  std::map<std::vector<long long>, std::vector<double>> uniq;
  for (const auto& el : g.elements) {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[static_cast<std::size_t>(el.perm[i])] = x[i];
    std::vector<long long> key(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) key[i] = std::llround(y[i] * 1e9);
    uniq.emplace(std::move(key), std::move(y));
  }
  std::vector<std::vector<double>> out;
  for (auto& [k, v] : uniq) out.push_back(std::move(v));
  return out;
}

}  // namespace detail

/// M(E,R) restricted to group-covariant encodings: each candidate posterior
/// enters together with its whole orbit under one shared weight. The prior
/// must be invariant; with symmetrize_prior it is replaced by its group
/// average instead.
inline CovariantSolution covariant_solve_M(const Ensemble& e, const GroupAction& g, double rate, const SimplexGrid& grid,
                                           const SolveOptions& opt = {}, bool symmetrize_prior = false) {
  const ActionCheck chk = verify_action(e, g);
  if (!chk.ok) throw InvalidInput("covariant_solve_M: invalid group action (" + chk.reason + ")");
  Ensemble ens = e;
  const std::vector<double> sym = symmetrize(e.probs(), g);
  double dev = 0.0;
  for (std::size_t i = 0; i < sym.size(); ++i) dev = std::max(dev, std::abs(sym[i] - e.probs()[i]));
  if (dev > 1e-12) {
    if (!symmetrize_prior) throw InvalidInput("covariant_solve_M: prior is not invariant under the group");
    double total = std::accumulate(sym.begin(), sym.end(), 0.0);
    std::vector<double> p(sym);
    for (double& x : p) x /= total;
    ens = e.with_probs(std::move(p));
  }
  if (rate < 0.0) throw Infeasible("classical rate must be nonnegative");
  const double hp = shannon_entropy(ens.probs());
  const SimplexGrid full = grid.with_prior(ens);

  // one representative per orbit-closed family
  std::set<std::vector<long long>> seen;
  std::vector<GridPoint> reps;
  for (const auto& pt : full.points()) {
    const auto orb = detail::orbit_of(pt.x, g);
    std::vector<long long> key(orb.front().size());
    for (std::size_t i = 0; i < key.size(); ++i) key[i] = std::llround(orb.front()[i] * 1e9);
    if (seen.insert(key).second) reps.push_back(pt);
  }

  detail::EngineHooks hooks;
  hooks.expand = [&g](const std::vector<double>& x) { return detail::orbit_of(x, g); };
  hooks.symmetrize_duals = [&g](std::vector<double> y) { return symmetrize(y, g); };

  CovariantSolution out;
  out.solution = detail::run_decomposition(ens, RateKind::classical, std::min(rate, hp), full, opt, hooks, &reps);
  out.group_order = g.order();
  out.orbit_count = static_cast<int>(orbits(g, e.size()).size());
  out.families = static_cast<int>(reps.size());
  return out;
}

/// Q*(R) for the unrestricted AVS over a transitive action: M at the
/// uniform prior, computed covariantly.
inline double avs_transitive(const std::vector<PureState>& states, const GroupAction& g, double rate,
                             const SimplexGrid& grid, const SolveOptions& opt = {}) {
  const Ensemble u = Ensemble::uniform(states);
  if (orbits(g, u.size()).size() != 1) throw InvalidInput("avs_transitive: group action is not transitive");
  return covariant_solve_M(u, g, rate, grid, opt).solution.value;
}

}  // namespace qtradeoff

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "qtradeoff/cli.hpp"
#include "qtradeoff/closedform.hpp"
#include "qtradeoff/curve.hpp"
#include "qtradeoff/ensembles.hpp"
#include "qtradeoff/io.hpp"
#include "qtradeoff/oracle.hpp"
#include "qtradeoff/symmetry.hpp"
#include "qtradeoff/typicality.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace qtradeoff;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// S(E) from Eigen's eigensolver, independent of the Jacobi routine in qcore.
double oracle_entropy(const Ensemble& e) {
  CMatrix rho = CMatrix::Zero(e.dim(), e.dim());
  for (int i = 0; i < e.size(); ++i) rho += e.prob(i) * e.state(i).amplitudes() * e.state(i).amplitudes().adjoint();
  const HermitianEigen eig = eig_small(rho);
  double s = 0.0;
  for (int k = 0; k < eig.values.size(); ++k) s -= xlog2x(std::max(0.0, eig.values[k]));
  return s;
}

Outcome c1_endpoints() {
  std::mt19937_64 rng(1001);
  double worst0 = 0.0, worst_h = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int t = 0; t < 50; ++t) {
    const int m = 2 + static_cast<int>(rng() % 3);
    const int d = 2 + static_cast<int>(rng() % 3);
    const Ensemble e = random_ensemble(m, d, rng);
    worst0 = std::max(worst0, std::abs(solve_M(e, 0.0).value - oracle_entropy(e)));
    worst_h = std::max(worst_h, solve_M(e, shannon_entropy(e.probs())).value);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst0 <= 1e-6 && worst_h <= 1e-6 && secs < 60.0,
          fmt("max|M(0)-S|=%.2e max M(H(p))=%.2e time=%.1fs", worst0, worst_h, secs)};
}

Outcome c2_schumacher_convexity() {
  std::mt19937_64 rng(1002);
  std::vector<Ensemble> es{pair_ensemble(), three_state_ensemble(), bb84_ensemble(std::numbers::pi / 8.0)};
  for (int t = 0; t < 3; ++t) es.push_back(random_ensemble(3, 2 + t, rng));
  double worst_sb = 0.0, worst_cvx = 0.0;
  for (const auto& e : es) {
    const TradeoffCurve c = trade_off_curve(e, 21, {}, 4);
    const double s = oracle_entropy(e);
    for (const auto& p : c.samples) worst_sb = std::max(worst_sb, s - (p.quantum + p.rate));
    worst_cvx = std::max(worst_cvx, c.convexity_violation());
  }
  return {worst_sb <= 1e-4 && worst_cvx <= 1e-9,
          fmt("max(S-Q-R)=%.2e convexity violation=%.2e over %d curves", worst_sb, worst_cvx, static_cast<int>(es.size()))};
}

Outcome c3_orthonormal() {
  double worst = 0.0;
  for (int k = 2; k <= 4; ++k) {
    const TradeoffCurve c = trade_off_curve(orthonormal_ensemble(k), 21, {}, 4);
    for (const auto& p : c.samples) worst = std::max(worst, std::abs(p.quantum - (std::log2(k) - p.rate)));
  }
  return {worst <= 3e-3, fmt("max|Q-(log k - R)|=%.2e", worst)};
}

Outcome c4_three_state() {
  const Ensemble e3 = three_state_ensemble();
  const double s = oracle_entropy(e3);
  const TradeoffCurve c = trade_off_curve(e3, 21, {}, 4);
  const double h = binary_entropy(1.0 / 3.0);
  double worst = 0.0;
  for (const auto& p : c.samples)
    if (p.rate <= h) worst = std::max(worst, std::abs(p.quantum - (s - p.rate)));
  for (double r : {0.3, 0.6, 0.9}) worst = std::max(worst, std::abs(solve_M(e3, r).value - (s - r)));
  // direct sum of the pair ensemble (weight 2/3) and a single state
  const double lam = 0.5 * (1.0 + std::sqrt(0.5));
  const double split = 2.0 / 3.0 * binary_entropy(lam) + h;
  return {worst <= 5e-3 && std::abs(s - split) < 1e-12 && std::abs(s - 1.3190) < 2e-4,
          fmt("S(E3)=%.6f max|Q-(S-R)|=%.2e", s, worst)};
}

Outcome c5_bb84() {
  const double theta = std::numbers::pi / 8.0;
  const Ensemble bb84 = bb84_ensemble(theta);
  const double target = binary_entropy(0.5 * (1.0 + std::cos(theta)));
  const double q1 = solve_M(bb84, 1.0).value;
  const double s = oracle_entropy(bb84);
  double gap = 0.0;
  for (int k = 1; k < 20; ++k) {
    const double r = k / 20.0;
    gap = std::max(gap, (1.0 - r) * s + r * target - solve_M(bb84, r).value);
  }
  return {std::abs(q1 - target) <= 5e-3 && gap > 1e-3,
          fmt("Q(1)=%.7f H2=%.7f max gap below time sharing=%.4f", q1, target, gap)};
}

Outcome c6_concavity() {
  const Ensemble two = orthonormal_ensemble(2);
  std::vector<PureState> s2;
  for (const auto& st : two.states()) {
    CVector v = CVector::Zero(4);
    v.head(2) = st.amplitudes();
    s2.emplace_back(v);
  }
  const Ensemble e1 = orthonormal_ensemble(4);
  const Ensemble e2 = Ensemble::uniform(s2);
  const Ensemble mix = orthonormal_ensemble(4, {3.0 / 8, 3.0 / 8, 1.0 / 8, 1.0 / 8});
  const double avg = 0.5 * (solve_M(e1, 1.9).value + solve_M(e2, 1.9).value);
  const double m = solve_M(mix, 1.9).value;
  return {m + 1e-6 < avg && std::abs(avg - 0.05) < 1e-3, fmt("M(mix,1.9)=%.5f average=%.5f", m, avg)};
}

Outcome c7_oracle() {
  std::mt19937_64 rng(1007);
  const std::vector<double> rates{0.2, 0.5, 0.8};
  BruteForceOptions bo;
  bo.steps = 200;
  double worst = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int t = 0; t < 20; ++t) {
    const Ensemble e = random_ensemble(2, 2, rng);
    const SimplexGrid grid = SimplexGrid::build(e, 128);
    const auto bf = brute_force_M(e, rates, bo);
    for (std::size_t k = 0; k < rates.size(); ++k) {
      if (rates[k] > shannon_entropy(e.probs())) continue;
      worst = std::max(worst, std::abs(solve_M(e, rates[k], grid).value - bf[k]));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 5e-3 && secs < 300.0, fmt("max|solver-oracle|=%.2e time=%.1fs", worst, secs)};
}

Outcome c8_uniform_qubit() {
  const Discretization d = discretize_uniform_qubit(64);
  const SimplexGrid grid = cap_seeded_grid(d.ensemble);
  SolveOptions o;
  o.improvement_tol = 1e-6;
  o.random_starts = 2;
  o.lattice_starts = 2;
  double worst = 0.0, lowest = 1.0;
  for (double r : {0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0}) {
    const double disc = solve_M(d.ensemble, r, grid, o).value;
    const double closed = devetak_berger_at_rate(r);
    worst = std::max(worst, std::abs(disc - closed));
    lowest = std::min(lowest, disc - closed);
  }
  return {worst <= 0.02 && lowest >= -1e-6,
          fmt("max|Q_disc-Q_DB|=%.2e min(Q_disc-Q_DB)=%.2e (upper-bound clause needs >= -1e-6)", worst, lowest)};
}

Outcome c9_blind() {
  std::mt19937_64 rng(1009);
  double worst = 0.0;
  for (int t = 0; t < 30; ++t) {
    const int blocks = 2 + static_cast<int>(rng() % 2);
    std::vector<int> dims, sizes;
    int dim = 0;
    for (int b = 0; b < blocks; ++b) {
      dims.push_back(1 + static_cast<int>(rng() % 2));
      sizes.push_back(1 + static_cast<int>(rng() % 3));
      dim += dims.back();
    }
    const std::vector<double> a = random_distribution(blocks, rng);
    std::vector<PureState> states;
    std::vector<double> probs;
    std::vector<Ensemble> parts;
    int offset = 0;
    for (int b = 0; b < blocks; ++b) {
      const std::vector<double> q = random_distribution(sizes[b], rng);
      std::vector<PureState> local;
      for (int i = 0; i < sizes[b]; ++i) {
        const PureState s = random_state(dims[b], rng);
        local.push_back(s);
        CVector v = CVector::Zero(dim);
        v.segment(offset, dims[b]) = s.amplitudes();
        states.emplace_back(v);
        probs.push_back(a[b] * q[i]);
      }
      parts.emplace_back(local, q);
      offset += dims[b];
    }
    double total = 0.0;
    for (double p : probs) total += p;
    for (double& p : probs) p /= total;
    const Ensemble e(states, probs);
    double lhs = 0.0;
    for (int b = 0; b < blocks; ++b) lhs += a[b] * oracle_entropy(parts[b]);
    const double rhs = oracle_entropy(e) - shannon_entropy(a);
    const BlindRate br = blind_rate(e);
    worst = std::max({worst, std::abs(lhs - rhs), std::abs(br.rate - lhs)});
  }
  return {worst <= 1e-9, fmt("max identity gap=%.2e", worst)};
}

Outcome c10_tensor() {
  const Ensemble a = orthonormal_ensemble(2, {0.7, 0.3});
  const Ensemble b = orthonormal_ensemble(4, {0.4, 0.3, 0.2, 0.1});
  const Ensemble ab = tensor_product(a, b);
  const TradeoffCurve ca = trade_off_curve(a, 21, {}, 4);
  const TradeoffCurve cb = trade_off_curve(b, 41, {}, 4);
  const SimplexGrid grid = SimplexGrid::build(ab, 2);
  const double h = shannon_entropy(ab.probs());
  double worst = 0.0;
  for (int k = 0; k <= 8; ++k) {
    const double r = h * k / 8.0;
    worst = std::max(worst, std::abs(solve_M(ab, r, grid).value - tensor_tradeoff(ca, cb, r)));
  }
  return {worst <= 1e-2, fmt("max|direct-split|=%.2e on %d states", worst, ab.size())};
}

Outcome c11_covariance() {
  const double theta = std::numbers::pi / 8.0;
  const Ensemble bb84 = bb84_ensemble(theta);
  const SimplexGrid grid = SimplexGrid::build(bb84);
  const Solution full = solve_M(bb84, 1.0, grid);
  const CovariantSolution cov = covariant_solve_M(bb84, bb84_action(theta), 1.0, grid);
  const double tol = 2.0 * std::max(full.tolerance(), cov.solution.tolerance());
  const double diff = std::abs(full.value - cov.solution.value);
  return {diff <= tol && cov.solution.support() <= 8,
          fmt("|cov-full|=%.2e allowed=%.2e support=%d bound=%d", diff, tol, cov.solution.support(), cov.support_bound())};
}

Outcome c12_avs() {
  const Ensemble pair = pair_ensemble();
  const SimplexGrid grid = SimplexGrid::build(pair, 64);
  const GroupAction swap = swap_action(0.0, std::numbers::pi / 4.0);
  double worst_prior = 0.0, worst_value = 0.0;
  for (double r : {0.25, 0.5, 0.75}) {
    const AvsResult res = avs_sup(pair.states(), {{1.0, 0.0}, {0.0, 1.0}}, r, grid, {}, 4);
    const double cov = covariant_solve_M(pair, swap, r, grid).solution.value;
    for (double x : res.prior) worst_prior = std::max(worst_prior, std::abs(x - 0.5));
    worst_value = std::max(worst_value, std::abs(res.value - cov));
  }
  return {worst_prior <= 0.02 && worst_value <= 1e-5,
          fmt("max|p-u|=%.2e max|sup-covariant|=%.2e", worst_prior, worst_value)};
}

Outcome c13_typicality() {
  const std::vector<double> p{0.6, 0.3, 0.1};
  const Estimate e = typical_probability_mc(p, 100, 4.0, 100000, 1013);
  bool ok = e.upper() >= 1.0 - 1.0 / 16.0;

  std::mt19937_64 rng(1013);
  const ChannelMatrix w = ChannelMatrix::bsc(0.2);
  const Sequence in = sample_typical(std::vector<double>{0.5, 0.5}, 100, 4.0, rng);
  const Estimate ce = cond_typical_probability_mc(w, in, 4.0, 100000, 1014);
  ok = ok && ce.upper() >= 1.0 - 2.0 / 16.0;

  int checked = 0, violations = 0;
  for (int n = 1; n <= 20; ++n)
    for (int k = 1; k <= 3; ++k)
      for (const auto& c : enumerate_types(n, k)) {
        std::vector<double> q;
        for (int x : c) q.push_back(static_cast<double>(x) / n);
        const double exact = log2_multinomial(c);
        for (double delta : {0.5, 1.0, 2.0}) {
          const TypicalBounds b = typical_count_bounds(q, delta, n);
          const double set = log2_typical_set_size(q, delta, n);
          if (!(b.class_lower <= exact + 1e-9 && exact <= b.class_upper + 1e-9 && b.set_lower <= set + 1e-9 &&
                set <= b.set_upper + 1e-9))
            ++violations;
          ++checked;
        }
      }
  ok = ok && violations == 0;
  return {ok, fmt("P(T)=%.4f+-%.4f P(T_W|I)=%.4f+-%.4f type bounds %d/%d hold", e.mean, e.half_width, ce.mean,
                  ce.half_width, checked - violations, checked)};
}

Outcome c14_projector() {
  const double theta = std::numbers::pi / 8.0;
  const Ensemble bb84 = bb84_ensemble(theta);
  RMatrix km(4, 2);
  km << 0.9, 0.1, 0.8, 0.2, 0.15, 0.85, 0.1, 0.9;
  const EncodingKernel soft(km);
  double worst = 0.0;
  for (int n = 1; n <= 8; ++n) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(1400 + n));
    const Sequence in = sample_sequence(bb84.probs(), n, rng);
    const Sequence out = sample_channel(in, ChannelMatrix::from(soft), rng);
    for (auto basis : {OverlapBasis::empirical, OverlapBasis::kernel})
      for (double delta : {0.3, 1.0})
        worst = std::max(worst, std::abs(projector_overlap(in, out, bb84, soft, delta, 0.0, basis) -
                                         projector_overlap_bruteforce(in, out, bb84, soft, delta, 0.0, basis)));
  }
  RMatrix pm(4, 2);
  pm << 1, 0, 1, 0, 0, 1, 0, 1;
  const EncodingKernel part(pm);
  std::mt19937_64 rng(1414);
  double lowest = 1.0;
  for (int t = 0; t < 20; ++t) {
    const Sequence in = sample_typical(bb84.probs(), 200, 10.0, rng);
    const Sequence out = sample_channel(in, ChannelMatrix::from(part), rng);
    lowest = std::min(lowest, projector_overlap(in, out, bb84, part, 10.0));
  }
  return {worst <= 1e-10 && lowest >= 1.0 - 2.0 / 100.0, fmt("max|DP-enum|=%.2e min overlap=%.5f (bound 0.98)", worst, lowest)};
}

Outcome c15_rst() {
  const auto t0 = std::chrono::steady_clock::now();
  const RstReport r = reverse_shannon_sim(ChannelMatrix::bsc(0.11), std::vector<double>{0.5, 0.5}, 400, 8.0, 1015);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double rate = r.log_M / 400.0;
  return {r.tv.mean <= 0.0625 + r.tv.half_width && rate <= r.mutual_information + 0.15 && secs < 120.0,
          fmt("TV=%.4f+-%.4f logM/n=%.4f H(P:W)=%.4f time=%.1fs", r.tv.mean, r.tv.half_width, rate,
              r.mutual_information, secs)};
}

Outcome c16_audit() {
  const Ensemble bb84 = bb84_ensemble(std::numbers::pi / 8.0);
  RMatrix pm(4, 2);
  pm << 1, 0, 1, 0, 0, 1, 0, 1;
  const AuditReport r = coded_fidelity_audit(bb84, EncodingKernel(pm), 200, 20.0, 1016);
  double lowest = 1.0;
  for (const auto& row : r.rows) lowest = std::min(lowest, row.lower);
  const bool ok = r.all_pass && std::abs(r.bound - (1.0 - 4.0 * 4 * 2 / 400.0)) < 1e-12;
  return {ok, fmt("min fidelity lower bound=%.5f required=%.2f inputs=%d", lowest, r.bound, static_cast<int>(r.rows.size()))};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome c17_reproducibility() {
  const fs::path dir = fs::temp_directory_path() / "qtradeoff_acceptance";
  fs::create_directories(dir);
  const fs::path ens = dir / "bb84.json";
  std::ofstream(ens) << io::ensemble_json(bb84_ensemble(std::numbers::pi / 8.0), bb84_action(std::numbers::pi / 8.0)).dump(2);
  const fs::path pair = dir / "pair.json";
  std::ofstream(pair) << io::ensemble_json(pair_ensemble(), std::nullopt).dump(2);

  const std::vector<std::vector<std::string>> runs{
      {"curve", "--ensemble", ens.string(), "--samples", "21", "--threads", "4"},
      {"point", "--ensemble", pair.string(), "--R", "0.4"},
      {"avs", "--ensemble", pair.string(), "--R", "0.5"},
      {"simulate-rst", "--flip", "0.11", "--n", "100", "--delta", "4"},
      {"audit-coding", "--ensemble", ens.string(), "--R", "1", "--n", "60", "--delta", "20", "--inputs", "3"},
      {"uniform-qubit", "--lambdas", "9"},
  };
  int identical = 0;
  std::string bad;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    std::string outputs[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = dir / fmt("run%zu_%d.csv", k, rep);
      auto args = runs[k];
      args.insert(args.end(), {"--seed", "12345", "--out", out.string()});
      std::ostringstream sink, err;
      if (cli::run(args, sink, err) != 0) bad += runs[k][0] + "(exit) ";
      outputs[rep] = slurp(out);
    }
    if (!outputs[0].empty() && outputs[0] == outputs[1]) ++identical;
    else bad += runs[k][0] + " ";
  }
  return {identical == static_cast<int>(runs.size()),
          fmt("%d/%d subcommands byte-identical %s", identical, static_cast<int>(runs.size()), bad.c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, c1_endpoints},   {2, c2_schumacher_convexity}, {3, c3_orthonormal}, {4, c4_three_state},
      {5, c5_bb84},        {6, c6_concavity},            {7, c7_oracle},      {8, c8_uniform_qubit},
      {9, c9_blind},       {10, c10_tensor},             {11, c11_covariance}, {12, c12_avs},
      {13, c13_typicality}, {14, c14_projector},         {15, c15_rst},       {16, c16_audit},
      {17, c17_reproducibility},
  };
  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("criterion %2d: %s  %s  [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

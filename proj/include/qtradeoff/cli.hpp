// Batch front end. run() parses a command line, writes CSV to --out (or the
// given stream) and a JSON run manifest, and maps errors to exit codes:
// 1 malformed input, 2 infeasible query, 3 budget exceeded, 4 internal error.
#pragma once

#include "qtradeoff/closedform.hpp"
#include "qtradeoff/curve.hpp"
#include "qtradeoff/errors.hpp"
#include "qtradeoff/io.hpp"
#include "qtradeoff/oracle.hpp"
#include "qtradeoff/solver.hpp"
#include "qtradeoff/symmetry.hpp"
#include "qtradeoff/typicality.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace qtradeoff::cli {

using io::json;
using io::num;

inline constexpr std::uint64_t kDefaultSeed = 0x51ed5eedULL;

namespace detail {

/// "0.5,0.5;1,0" -> rows.
inline std::vector<std::vector<double>> parse_rows(const std::string& text, const std::string& what) {
  std::vector<std::vector<double>> rows;
  std::stringstream rs(text);
  std::string row;
  while (std::getline(rs, row, ';')) {
    std::vector<double> r;
    std::stringstream cs(row);
    std::string cell;
    while (std::getline(cs, cell, ',')) {
      try {
        std::size_t used = 0;
        r.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw InvalidInput(what + ": cannot parse '" + cell + "'");
      }
    }
    if (r.empty()) throw InvalidInput(what + ": empty row");
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw InvalidInput(what + ": no rows");
  return rows;
}

inline RMatrix to_matrix(const std::vector<std::vector<double>>& rows, const std::string& what) {
  const auto cols = rows.front().size();
  RMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw InvalidInput(what + ": ragged rows");
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

inline std::string bracket_list(const std::vector<int>& v, int offset) {
  std::string s = "[";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k] + offset);
  return s + "]";
}

/// Every option of a subcommand with its effective value.
inline json flag_values(const CLI::App& app) {
  json flags = json::object();
  for (const CLI::Option* o : app.get_options()) {
    const std::string name = o->get_single_name();
    if (name.empty() || name == "help") continue;
    if (o->count() > 0) {
      const auto& res = o->results();
      flags[name] = res.size() == 1 ? json(res.front()) : json(res);
    } else {
      flags[name] = o->get_default_str();
    }
  }
  return flags;
}

}  // namespace detail

/// Options shared by every subcommand.
struct Common {
  int threads = 0;
  std::string seed_text;
  std::string out;
  std::string manifest;
  int grid = -1;
  double improvement_tol = -1.0;

  std::uint64_t seed = kDefaultSeed;
  std::string seed_source = "default";
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(std::vector<std::string> args) {
    CLI::App app{"Quantum-classical trade-off curves for visible pure-state sources", "qtradeoff"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.set_version_flag("--version", std::string("qtradeoff schema ") + io::kSchemaVersion);

    add_curve(app);
    add_point(app);
    add_avs(app);
    add_blind(app);
    add_tensor(app);
    add_uniform_qubit(app);
    add_simulate_rst(app);
    add_audit(app);
    add_oracle(app);

    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp&) {
      out_ << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
      return 0;
    } catch (const CLI::CallForVersion&) {
      out_ << app.version() << '\n';
      return 0;
    } catch (const CLI::ParseError& ex) {
      err_ << "error: " << ex.what() << '\n';
      return 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    const auto start = std::chrono::steady_clock::now();
    try {
      resolve_common();
      manifest_ = io::make_manifest(sub->get_name(), detail::flag_values(*sub));
      manifest_["seed"] = common_.seed;
      manifest_["seed_source"] = common_.seed_source;
      manifest_["threads"] = threads();
      std::ostringstream csv;
      action_(csv);
      if (common_.out.empty()) {
        out_ << csv.str();
      } else {
        std::ofstream f(common_.out, std::ios::binary);
        if (!f) throw InvalidInput("cannot write " + common_.out);
        f << csv.str();
      }
      manifest_["output"] = common_.out.empty() ? "stdout" : common_.out;
      manifest_["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const std::string mpath = manifest_path();
      if (!mpath.empty()) io::write_manifest(mpath, manifest_);
    } catch (const InvalidInput& ex) {
      err_ << "invalid input: " << ex.what() << '\n';
      return 1;
    } catch (const Infeasible& ex) {
      err_ << "infeasible: " << ex.what() << '\n';
      return 2;
    } catch (const BudgetExceeded& ex) {
      err_ << "budget exceeded: " << ex.what() << '\n';
      return 3;
    } catch (const std::exception& ex) {
      err_ << "internal error: " << ex.what() << '\n';
      return 4;
    }
    return 0;
  }

 private:
  // ---- shared plumbing -----------------------------------------------------

  void add_common(CLI::App* sub, bool with_grid) {
    sub->add_option("--threads", common_.threads, "worker threads (0 = logical cores)")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", common_.seed_text, "random seed (default: $TRADEOFF_SEED, else fixed)");
    sub->add_option("--out", common_.out, "CSV output path (default: stdout)");
    sub->add_option("--manifest", common_.manifest, "manifest path (default: <out>.manifest.json; none for stdout)");
    if (with_grid) {
      sub->add_option("--grid", common_.grid, "simplex grid resolution k (default depends on m)")->check(CLI::NonNegativeNumber);
      sub->add_option("--improvement-tol", common_.improvement_tol, "column-generation stopping tolerance");
    }
  }

  void resolve_common() {
    std::string text = common_.seed_text;
    common_.seed_source = "flag";
    if (text.empty()) {
      if (const char* env = std::getenv("TRADEOFF_SEED"); env && *env) {
        text = env;
        common_.seed_source = "TRADEOFF_SEED";
      }
    }
    if (text.empty()) {
      common_.seed = kDefaultSeed;
      common_.seed_source = "default";
      return;
    }
    try {
      std::size_t used = 0;
      common_.seed = std::stoull(text, &used, 0);
      if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw InvalidInput("seed must be an unsigned integer, got '" + text + "'");
    }
  }

  [[nodiscard]] int threads() const {
    if (common_.threads > 0) return common_.threads;
    return std::max(1u, std::thread::hardware_concurrency());
  }

  [[nodiscard]] std::string manifest_path() const {
    if (!common_.manifest.empty()) return common_.manifest;
    if (!common_.out.empty()) return common_.out + ".manifest.json";
    return {};
  }

  [[nodiscard]] SolveOptions solve_options() const {
    SolveOptions o;
    o.seed = common_.seed;
    if (common_.improvement_tol > 0.0) o.improvement_tol = common_.improvement_tol;
    return o;
  }

  io::EnsembleFile load(const std::string& path) {
    io::EnsembleFile f = io::load_ensemble(path);
    for (const auto& w : f.warnings) err_ << "warning: " << path << ": " << w << '\n';
    manifest_["inputs"][path] = io::ensemble_json(f.ensemble, f.group);
    return f;
  }

  SimplexGrid grid_for(const Ensemble& e) {
    const int k = common_.grid >= 0 ? common_.grid : SimplexGrid::default_resolution(e.size());
    manifest_["grid_resolution"] = k;
    return SimplexGrid::build(e, k);
  }

  void on(CLI::App* sub, std::function<void(std::ostream&)> body) {
    sub->callback([this, body = std::move(body)] { action_ = body; });
  }

  // ---- subcommands ---------------------------------------------------------

  void add_curve(CLI::App& app) {
    auto* sub = app.add_subcommand("curve", "trade-off curve M(E,R) on [0, H(p)]");
    add_common(sub, true);
    auto path = std::make_shared<std::string>();
    auto samples = std::make_shared<int>(41);
    sub->add_option("--ensemble", *path, "ensemble JSON file")->required();
    sub->add_option("--samples", *samples, "number of equally spaced rates")->check(CLI::Range(2, 100000));
    on(sub, [this, path, samples](std::ostream& os) {
      const auto f = load(*path);
      const TradeoffCurve c = trade_off_curve(f.ensemble, *samples, grid_for(f.ensemble), solve_options(), threads());
      io::write_curve_csv(os, c);
      manifest_["results"] = {{"entropy", c.entropy}, {"prior_entropy", c.prior_entropy}, {"tolerance", c.tolerance}};
    });
  }

  void add_point(CLI::App& app) {
    auto* sub = app.add_subcommand("point", "single value of M, X or N");
    add_common(sub, true);
    auto path = std::make_shared<std::string>();
    auto rate = std::make_shared<double>(0.0);
    auto quantity = std::make_shared<std::string>("M");
    sub->add_option("--ensemble", *path, "ensemble JSON file")->required();
    sub->add_option("--R", *rate, "rate R")->required();
    sub->add_option("--quantity", *quantity, "M, X or N")->check(CLI::IsMember({"M", "X", "N"}));
    on(sub, [this, path, rate, quantity](std::ostream& os) {
      const auto f = load(*path);
      const SimplexGrid g = grid_for(f.ensemble);
      const Solution s = *quantity == "N" ? solve_N_rsp(f.ensemble, *rate, g, solve_options())
                                          : solve_M(f.ensemble, *rate, g, solve_options());
      const double value = *quantity == "X" ? *rate + s.value : s.value;
      os << "quantity,R,value,grid_k,support_size,tolerance\n";
      os << *quantity << ',' << num(*rate) << ',' << num(value) << ',' << s.grid_resolution << ',' << s.support() << ','
         << num(s.tolerance()) << '\n';
      manifest_["results"] = {{"value", value}, {"rounds", s.rounds}, {"columns", s.columns}, {"realized_rate", s.rate}};
    });
  }

  void add_avs(CLI::App& app) {
    auto* sub = app.add_subcommand("avs", "supremum of M over the convex hull of vertex priors");
    add_common(sub, true);
    auto path = std::make_shared<std::string>();
    auto rate = std::make_shared<double>(0.0);
    auto vertices = std::make_shared<std::vector<std::string>>();
    sub->add_option("--ensemble", *path, "ensemble JSON file (probs ignored)")->required();
    sub->add_option("--R", *rate, "rate R")->required();
    sub->add_option("--vertex", *vertices, "vertex prior 'p1,p2,...' (repeatable; default: all point masses)");
    on(sub, [this, path, rate, vertices](std::ostream& os) {
      const auto f = load(*path);
      const int m = f.ensemble.size();
      std::vector<std::vector<double>> verts;
      for (const auto& v : *vertices) verts.push_back(detail::parse_rows(v, "--vertex").front());
      if (verts.empty())
        for (int i = 0; i < m; ++i) {
          std::vector<double> x(static_cast<std::size_t>(m), 0.0);
          x[static_cast<std::size_t>(i)] = 1.0;
          verts.push_back(std::move(x));
        }
      const AvsResult r = avs_sup(f.ensemble.states(), verts, *rate, grid_for(f.ensemble), solve_options(), threads());
      os << "R,value";
      for (int i = 0; i < m; ++i) os << ",p" << i + 1;
      os << ",evaluations\n" << num(*rate) << ',' << num(r.value);
      for (double p : r.prior) os << ',' << num(p);
      os << ',' << r.evaluations << '\n';
      manifest_["results"] = {{"value", r.value}, {"prior", r.prior}, {"weights", r.weights}};
    });
  }

  void add_blind(CLI::App& app) {
    auto* sub = app.add_subcommand("blind", "blind compression rate and irreducible components");
    add_common(sub, false);
    auto path = std::make_shared<std::string>();
    sub->add_option("--ensemble", *path, "ensemble JSON file")->required();
    on(sub, [this, path](std::ostream& os) {
      const auto f = load(*path);
      const BlindRate b = blind_rate(f.ensemble);
      std::string comps, weights;
      for (std::size_t l = 0; l < b.components.size(); ++l) {
        comps += (l ? "," : "") + detail::bracket_list(b.components[l], 1);
        weights += (l ? ";" : "") + num(b.weights[l]);
      }
      os << "Q_blind,Q_blind_via_entropy,components,weights\n";
      os << num(b.rate) << ',' << num(b.rate_via_entropy) << ",\"" << comps << "\"," << weights << '\n';
      manifest_["results"] = {{"rate", b.rate}, {"components", comps}};
    });
  }

  void add_tensor(CLI::App& app) {
    auto* sub = app.add_subcommand("tensor", "min over R1 + R2 = R of M1(R1) + M2(R2) from two curve files");
    add_common(sub, false);
    auto c1 = std::make_shared<std::string>();
    auto c2 = std::make_shared<std::string>();
    auto samples = std::make_shared<int>(41);
    auto rates = std::make_shared<std::vector<double>>();
    sub->add_option("--curve1", *c1, "first curve CSV")->required();
    sub->add_option("--curve2", *c2, "second curve CSV")->required();
    sub->add_option("--samples", *samples, "equally spaced rates on [0, H1 + H2]")->check(CLI::Range(2, 100000));
    sub->add_option("--R", *rates, "explicit rates (overrides --samples)")->delimiter(',');
    on(sub, [this, c1, c2, samples, rates](std::ostream& os) {
      const TradeoffCurve a = io::read_curve_csv(*c1);
      const TradeoffCurve b = io::read_curve_csv(*c2);
      manifest_["inputs"] = {*c1, *c2};
      std::vector<double> rs = *rates;
      const double h = a.samples.back().rate + b.samples.back().rate;
      if (rs.empty())
        for (int k = 0; k < *samples; ++k) rs.push_back(k == *samples - 1 ? h : h * k / (*samples - 1));
      os << "R,Q\n";
      for (double r : rs) os << num(r) << ',' << num(tensor_tradeoff(a, b, r)) << '\n';
    });
  }

  void add_uniform_qubit(CLI::App& app) {
    auto* sub = app.add_subcommand("uniform-qubit", "closed-form curve of the uniform qubit source, optionally checked "
                                                    "against a discretized ensemble");
    add_common(sub, true);
    auto lambdas = std::make_shared<int>(41);
    auto points = std::make_shared<int>(0);
    auto rates = std::make_shared<std::vector<double>>(std::vector<double>{0.1, 0.25, 0.5, 1.0, 1.5, 2.0});
    sub->add_option("--lambdas", *lambdas, "closed-form samples (log-spaced lambda in [1e-3, 1e3])")->check(CLI::Range(2, 100000));
    sub->add_option("--discretize", *points, "Bloch-sphere points of the discretized ensemble (0 = closed form only)")
        ->check(CLI::Range(0, 512));
    sub->add_option("--R", *rates, "rates for the discretized cross-check")->delimiter(',');
    on(sub, [this, lambdas, points, rates](std::ostream& os) {
      if (*points == 0) {
        os << "lambda,R,Q\n";
        const double a = std::log(1e-3), b = std::log(1e3);
        for (int k = 0; k < *lambdas; ++k) {
          const double lam = std::exp(a + (b - a) * k / (*lambdas - 1));
          const RatePair p = devetak_berger(lam);
          os << num(lam) << ',' << num(p.rate) << ',' << num(p.quantum) << '\n';
        }
        return;
      }
      const Discretization disc = discretize_uniform_qubit(*points);
      const SimplexGrid grid = cap_seeded_grid(disc.ensemble);
      manifest_["grid_resolution"] = 0;
      manifest_["grid_points"] = grid.points().size();
      manifest_["results"]["covering_radius"] = disc.covering_radius;
      std::vector<Solution> sols(rates->size());
      SolveOptions opt = solve_options();
      if (common_.improvement_tol <= 0.0) opt.improvement_tol = 1e-6;
      opt.random_starts = 2;
      opt.lattice_starts = 2;
      parallel_for(static_cast<int>(rates->size()), threads(), [&](int k) {
        SolveOptions o = opt;
        o.seed = opt.seed + static_cast<std::uint64_t>(k);
        sols[static_cast<std::size_t>(k)] = solve_M(disc.ensemble, (*rates)[static_cast<std::size_t>(k)], grid, o);
      });
      os << "R,Q_closed,Q_discrete,grid_k,support_size\n";
      for (std::size_t k = 0; k < rates->size(); ++k)
        os << num((*rates)[k]) << ',' << num(devetak_berger_at_rate((*rates)[k])) << ',' << num(sols[k].value) << ','
           << sols[k].grid_resolution << ',' << sols[k].support() << '\n';
    });
  }

  void add_simulate_rst(CLI::App& app) {
    auto* sub = app.add_subcommand("simulate-rst", "reverse Shannon channel simulation on typical inputs");
    add_common(sub, false);
    auto channel = std::make_shared<std::string>();
    auto flip = std::make_shared<double>(0.11);
    auto prior = std::make_shared<std::string>();
    auto n = std::make_shared<int>(400);
    auto delta = std::make_shared<double>(8.0);
    auto ro = std::make_shared<RstOptions>();
    sub->add_option("--channel", *channel, "channel rows 'w11,w12;w21,w22' (default: BSC with --flip)");
    sub->add_option("--flip", *flip, "BSC crossover probability")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--prior", *prior, "input distribution 'p1,p2,...' (default uniform)");
    sub->add_option("--n", *n, "block length")->check(CLI::Range(1, 10000));
    sub->add_option("--delta", *delta, "typicality parameter")->check(CLI::PositiveNumber);
    sub->add_option("--trials", ro->trials, "Monte-Carlo outputs")->check(CLI::PositiveNumber);
    sub->add_option("--panel", ro->panel, "typical inputs examined")->check(CLI::PositiveNumber);
    sub->add_option("--tau", ro->tau, "capped likelihood mass");
    sub->add_option("--fail", ro->fail, "target probability of no accepted candidate");
    on(sub, [this, channel, flip, prior, n, delta, ro](std::ostream& os) {
      const ChannelMatrix w = channel->empty() ? ChannelMatrix::bsc(*flip)
                                               : ChannelMatrix(detail::to_matrix(detail::parse_rows(*channel, "--channel"), "--channel"));
      std::vector<double> p = prior->empty() ? std::vector<double>(static_cast<std::size_t>(w.inputs()), 1.0 / w.inputs())
                                             : detail::parse_rows(*prior, "--prior").front();
      const RstReport r = reverse_shannon_sim(w, p, *n, *delta, common_.seed, *ro);
      os << "n,delta,log_M_per_n,H_PW,log_N_per_n,H_W_given_P,tv,tv_half_width,tv_exact,tv_bound,failures\n";
      os << *n << ',' << num(*delta) << ',' << num(r.log_M / *n) << ',' << num(r.mutual_information) << ','
         << num(r.log_N / *n) << ',' << num(r.conditional_entropy) << ',' << num(r.tv.mean) << ',' << num(r.tv.half_width)
         << ',' << num(r.tv_exact) << ',' << num(r.tv_bound) << ',' << r.failures << '\n';
      manifest_["results"] = {{"log_M_budget", r.log_M_budget}, {"log_N_budget", r.log_N_budget}};
    });
  }

  void add_audit(CLI::App& app) {
    auto* sub = app.add_subcommand("audit-coding", "fidelity audit of the trade-off code on typical inputs");
    add_common(sub, true);
    auto path = std::make_shared<std::string>();
    auto kernel = std::make_shared<std::string>();
    auto rate = std::make_shared<double>(-1.0);
    auto n = std::make_shared<int>(200);
    auto delta = std::make_shared<double>(20.0);
    auto basis = std::make_shared<std::string>("empirical");
    auto ao = std::make_shared<AuditOptions>();
    sub->add_option("--ensemble", *path, "ensemble JSON file")->required();
    sub->add_option("--kernel", *kernel, "encoding kernel rows 'p(1|1),p(2|1);...'");
    sub->add_option("--R", *rate, "use the optimal kernel at this rate instead of --kernel");
    sub->add_option("--n", *n, "block length")->check(CLI::Range(1, 400));
    sub->add_option("--delta", *delta, "typicality parameter")->check(CLI::PositiveNumber);
    sub->add_option("--inputs", ao->inputs, "typical inputs sampled")->check(CLI::PositiveNumber);
    sub->add_option("--outputs", ao->outputs_per_input, "encoder outputs per input")->check(CLI::PositiveNumber);
    sub->add_option("--basis", *basis, "conditional subspace basis")->check(CLI::IsMember({"empirical", "kernel"}));
    on(sub, [this, path, kernel, rate, n, delta, basis, ao](std::ostream& os) {
      const auto f = load(*path);
      EncodingKernel k;
      if (!kernel->empty()) {
        k = EncodingKernel(detail::to_matrix(detail::parse_rows(*kernel, "--kernel"), "--kernel"));
      } else if (*rate >= 0.0) {
        k = solve_M(f.ensemble, *rate, grid_for(f.ensemble), solve_options()).kernel(f.ensemble);
      } else {
        throw InvalidInput("audit-coding needs --kernel or --R");
      }
      AuditOptions opt = *ao;
      opt.basis = *basis == "kernel" ? OverlapBasis::kernel : OverlapBasis::empirical;
      const AuditReport r = coded_fidelity_audit(f.ensemble, k, *n, *delta, common_.seed, opt);
      os << "input,fidelity,half_width,lower,bound,passes,mean_overlap,mean_log2_rank\n";
      for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& row = r.rows[i];
        os << i + 1 << ',' << num(row.fidelity.mean) << ',' << num(row.fidelity.half_width) << ',' << num(row.lower) << ','
           << num(r.bound) << ',' << (row.passes ? 1 : 0) << ',' << num(row.mean_overlap) << ',' << num(row.mean_log2_rank)
           << '\n';
      }
      manifest_["results"] = {{"all_pass", r.all_pass},
                              {"classical_leading", r.classical_leading},
                              {"classical_correction", r.classical_correction},
                              {"classical_measured", r.classical_measured},
                              {"quantum_leading", r.quantum_leading},
                              {"quantum_correction", r.quantum_correction},
                              {"quantum_measured", r.quantum_measured}};
    });
  }

  void add_oracle(CLI::App& app) {
    auto* sub = app.add_subcommand("oracle", "brute-force reference values of M or N (m <= 3)");
    add_common(sub, false);
    auto path = std::make_shared<std::string>();
    auto quantity = std::make_shared<std::string>("M");
    auto rates = std::make_shared<std::vector<double>>();
    auto bo = std::make_shared<BruteForceOptions>();
    sub->add_option("--ensemble", *path, "ensemble JSON file")->required();
    sub->add_option("--quantity", *quantity, "M or N")->check(CLI::IsMember({"M", "N"}));
    sub->add_option("--R", *rates, "rates")->delimiter(',')->required();
    sub->add_option("--steps", bo->steps, "kernel grid steps per row")->check(CLI::PositiveNumber);
    sub->add_option("--slack", bo->slack, "rate slack (negative: 1/steps)");
    sub->add_option("--max-outputs", bo->max_outputs, "output alphabet size (0: m + 1)")->check(CLI::NonNegativeNumber);
    on(sub, [this, path, quantity, rates, bo](std::ostream& os) {
      const auto f = load(*path);
      const auto v = *quantity == "N" ? brute_force_N(f.ensemble, *rates, *bo) : brute_force_M(f.ensemble, *rates, *bo);
      os << "R,Q\n";
      for (std::size_t k = 0; k < rates->size(); ++k) os << num((*rates)[k]) << ',' << num(v[k]) << '\n';
    });
  }

  std::ostream& out_;
  std::ostream& err_;
  Common common_;
  json manifest_;
  std::function<void(std::ostream&)> action_;
};

/// Runs one command line (without the program name); returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Runner r(out, err);
  return r.run(args);
}

}  // namespace qtradeoff::cli

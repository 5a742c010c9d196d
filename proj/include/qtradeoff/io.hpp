// Ensemble files (JSON), curve CSV and run manifests.
//
// Ensemble format:
//   {"dim": d,
//    "states": [[[re, im], ...], ...],      amplitudes; a bare number is a real amplitude
//    "probs": [...],                        optional, uniform if absent
//    "group": {"perms": [[...], ...],       optional, zero-based g(i)
//              "unitaries": [[[[re, im], ...], ...], ...]}}   row-major d x d
#pragma once

#include "qtradeoff/curve.hpp"
#include "qtradeoff/errors.hpp"
#include "qtradeoff/qcore.hpp"
#include "qtradeoff/symmetry.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace qtradeoff::io {

using nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";

struct EnsembleFile {
  Ensemble ensemble;
  std::optional<GroupAction> group;
  std::vector<std::string> warnings;
};

namespace detail {

inline cplx parse_amplitude(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) return {v[0].get<double>(), v[1].get<double>()};
  throw InvalidInput("amplitude must be a number or a [re, im] pair");
}

inline json amplitude_json(cplx z) { return json::array({z.real(), z.imag()}); }

}  // namespace detail

inline EnsembleFile parse_ensemble(const json& j) {
  if (!j.is_object()) throw InvalidInput("ensemble file must hold a JSON object");
  if (!j.contains("states") || !j["states"].is_array() || j["states"].empty())
    throw InvalidInput("ensemble file needs a nonempty \"states\" array");
  EnsembleFile out;
  const int d = j.contains("dim") ? j["dim"].get<int>() : static_cast<int>(j["states"][0].size());
  if (d < 1) throw InvalidInput("\"dim\" must be positive");
  std::vector<PureState> states;
  for (std::size_t s = 0; s < j["states"].size(); ++s) {
    const json& row = j["states"][s];
    if (!row.is_array() || static_cast<int>(row.size()) != d)
      throw InvalidInput("state " + std::to_string(s) + " does not have " + std::to_string(d) + " amplitudes");
    CVector v(d);
    for (int k = 0; k < d; ++k) v[k] = detail::parse_amplitude(row[static_cast<std::size_t>(k)]);
    const double norm2 = v.squaredNorm();
    if (!(norm2 > 0.0)) throw InvalidInput("state " + std::to_string(s) + " is the zero vector");
    if (std::abs(norm2 - 1.0) > 1e-6)
      out.warnings.push_back("state " + std::to_string(s) + " had squared norm " + std::to_string(norm2) + "; normalized");
    states.push_back(PureState::normalized(v));
  }
  std::vector<double> probs;
  if (j.contains("probs")) {
    probs = j["probs"].get<std::vector<double>>();
    if (probs.size() != states.size()) throw InvalidInput("\"probs\" length does not match \"states\"");
    double total = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0)) throw InvalidInput("\"probs\" must be nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-6) throw InvalidInput("\"probs\" sum to " + std::to_string(total));
    for (double& p : probs) p /= total;
  } else {
    probs.assign(states.size(), 1.0 / static_cast<double>(states.size()));
  }
  out.ensemble = Ensemble(std::move(states), std::move(probs));

  if (j.contains("group")) {
    const json& g = j["group"];
    if (!g.contains("perms") || !g.contains("unitaries") || g["perms"].size() != g["unitaries"].size())
      throw InvalidInput("\"group\" needs equally long \"perms\" and \"unitaries\"");
    GroupAction act;
    for (std::size_t k = 0; k < g["perms"].size(); ++k) {
      GroupElement el;
      el.perm = g["perms"][k].get<std::vector<int>>();
      const json& u = g["unitaries"][k];
      if (!u.is_array() || static_cast<int>(u.size()) != d) throw InvalidInput("unitary " + std::to_string(k) + " has the wrong shape");
      el.unitary = CMatrix(d, d);
      for (int r = 0; r < d; ++r) {
        if (!u[static_cast<std::size_t>(r)].is_array() || static_cast<int>(u[static_cast<std::size_t>(r)].size()) != d)
          throw InvalidInput("unitary " + std::to_string(k) + " has the wrong shape");
        for (int c = 0; c < d; ++c) el.unitary(r, c) = detail::parse_amplitude(u[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
      }
      act.elements.push_back(std::move(el));
    }
    out.group = std::move(act);
  }
  return out;
}

inline EnsembleFile load_ensemble(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open ensemble file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw InvalidInput("malformed JSON in " + path + ": " + ex.what());
  }
  try {
    return parse_ensemble(j);
  } catch (const json::exception& ex) {
    throw InvalidInput("bad ensemble file " + path + ": " + ex.what());
  }
}

inline json ensemble_json(const Ensemble& e, const std::optional<GroupAction>& g = std::nullopt) {
  json j;
  j["dim"] = e.dim();
  j["states"] = json::array();
  for (const auto& s : e.states()) {
    json row = json::array();
    for (int k = 0; k < e.dim(); ++k) row.push_back(detail::amplitude_json(s.amplitudes()[k]));
    j["states"].push_back(row);
  }
  j["probs"] = e.probs();
  if (g) {
    json perms = json::array(), us = json::array();
    for (const auto& el : g->elements) {
      perms.push_back(el.perm);
      json u = json::array();
      for (Eigen::Index r = 0; r < el.unitary.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < el.unitary.cols(); ++c) row.push_back(detail::amplitude_json(el.unitary(r, c)));
        u.push_back(row);
      }
      us.push_back(u);
    }
    j["group"] = {{"perms", perms}, {"unitaries", us}};
  }
  return j;
}

// ---------------------------------------------------------------------------
// CSV

/// Locale-independent fixed formatting with up to 10 significant digits.
inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v == 0.0 ? 0.0 : v);
  std::string s(buf);
  for (char& c : s)
    if (c == ',') c = '.';
  return s;
}

inline void write_curve_csv(std::ostream& os, const TradeoffCurve& c) {
  os << "R,Q,grid_k,support_size\n";
  for (const auto& s : c.samples) os << num(s.rate) << ',' << num(s.quantum) << ',' << s.grid_resolution << ',' << s.support() << '\n';
}

/// Reads the R and Q columns of a curve CSV into a TradeoffCurve.
inline TradeoffCurve read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open curve file " + path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("empty curve file " + path);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const auto col = [&](const std::string& name) {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (header[k] == name) return static_cast<int>(k);
    throw InvalidInput("curve file " + path + " has no column " + name);
  };
  const int cr = col("R");
  const int cq = col("Q");
  TradeoffCurve c;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) <= std::max(cr, cq)) throw InvalidInput("short row in " + path);
    CurveSample s;
    try {
      s.rate = std::stod(cells[static_cast<std::size_t>(cr)]);
      s.quantum = std::stod(cells[static_cast<std::size_t>(cq)]);
    } catch (const std::exception&) {
      throw InvalidInput("non-numeric entry in " + path);
    }
    if (!c.samples.empty() && s.rate <= c.samples.back().rate) throw InvalidInput("curve rates must increase in " + path);
    c.samples.push_back(std::move(s));
  }
  if (c.samples.size() < 2) throw InvalidInput("curve file " + path + " needs at least two rows");
  c.entropy = c.samples.front().quantum;
  c.prior_entropy = c.samples.back().rate;
  return c;
}

// ---------------------------------------------------------------------------
// Run manifest

/// Skeleton manifest: schema version, subcommand and every flag value.
/// Callers add "inputs", "grid_resolution", "seed", "results" and
/// "wall_time_s" as they become known.
inline json make_manifest(const std::string& command, const json& flags) {
  return json{{"schema", kSchemaVersion}, {"command", command}, {"flags", flags}};
}

inline void write_manifest(const std::string& path, const json& manifest) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write manifest " + path);
  out << manifest.dump(2) << '\n';
}

}  // namespace qtradeoff::io

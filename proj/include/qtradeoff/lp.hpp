// Dense revised simplex for small equality-form linear programs
//
//     minimize c^T x  subject to  A x = b,  x >= 0,
//
// with few rows (tens) and up to several thousand columns. Columns can be
// appended after a solve; the next solve warm-starts from the previous
// basis, which is what column generation needs.
#pragma once

#include "qtradeoff/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace qtradeoff::lp {

enum class Status { optimal, infeasible, unbounded, iteration_limit };

struct Result {
  Status status = Status::iteration_limit;
  double objective = 0.0;
  std::vector<double> x;      // structural variables only
  std::vector<double> duals;  // one per row, sign convention of the caller's rows
  std::vector<int> basis;     // basic structural columns (artificials omitted)
  int iterations = 0;
};

struct Options {
  int max_iterations = 200000;
  double cost_tol = 1e-11;
  double pivot_tol = 1e-11;
  double feasibility_tol = 1e-9;
  int refactor_every = 64;
  // Dantzig pricing until this many consecutive degenerate pivots, then
  // Bland's rule (lowest index) until a nondegenerate pivot occurs.
  int degenerate_switch = 30;
};

class RevisedSimplex {
 public:
  RevisedSimplex(std::span<const double> rhs, Options opt = {})
      : rows_(static_cast<int>(rhs.size())), opt_(opt), b_(rows_), sign_(rows_, 1.0) {
    for (int i = 0; i < rows_; ++i) {
      sign_[i] = rhs[i] < 0.0 ? -1.0 : 1.0;
      b_[i] = sign_[i] * rhs[i];
    }
  }

  [[nodiscard]] int rows() const { return rows_; }
  [[nodiscard]] int columns() const { return static_cast<int>(cols_.size()); }

  /// Appends a structural column and returns its index.
  int add_column(std::span<const double> coeffs, double cost) {
    if (static_cast<int>(coeffs.size()) != rows_) throw InvalidInput("lp: column length mismatch");
    Eigen::VectorXd col(rows_);
    for (int i = 0; i < rows_; ++i) col[i] = sign_[i] * coeffs[i];
    cols_.push_back(std::move(col));
    cost_.push_back(cost);
    in_basis_.push_back(false);
    return columns() - 1;
  }

  [[nodiscard]] const Eigen::VectorXd& column(int j) const { return cols_[static_cast<std::size_t>(j)]; }
  [[nodiscard]] double cost(int j) const { return cost_[static_cast<std::size_t>(j)]; }

  Result solve() {
    Result out;
    if (!initialized_) start_phase_one();
    if (!phase_two_) {
      const Status s = iterate(/*phase_one=*/true, out.iterations);
      if (s != Status::optimal) {
        out.status = s;
        return out;
      }
      double infeas = 0.0;
      for (int r = 0; r < rows_; ++r)
        if (basis_[r] < 0) infeas += x_basic_[r];
      if (infeas > opt_.feasibility_tol * std::max(1.0, b_.lpNorm<1>())) {
        out.status = Status::infeasible;
        return out;
      }
      drive_out_artificials();
      phase_two_ = true;
    }
    out.status = iterate(/*phase_one=*/false, out.iterations);
    if (out.status != Status::optimal) return out;

    out.x.assign(cols_.size(), 0.0);
    for (int r = 0; r < rows_; ++r)
      if (basis_[r] >= 0) {
        out.x[static_cast<std::size_t>(basis_[r])] = std::max(0.0, x_basic_[r]);
        out.basis.push_back(basis_[r]);
      }
    out.objective = 0.0;
    for (std::size_t j = 0; j < cols_.size(); ++j) out.objective += cost_[j] * out.x[j];
    const Eigen::VectorXd y = duals(false);
    out.duals.resize(static_cast<std::size_t>(rows_));
    for (int i = 0; i < rows_; ++i) out.duals[static_cast<std::size_t>(i)] = sign_[i] * y[i];
    return out;
  }

 private:
  // Basis entries: structural index >= 0, artificial for row i encoded as -1 - i.
  static bool is_artificial(int v) { return v < 0; }

  double basic_cost(int v, bool phase_one) const {
    if (is_artificial(v)) return phase_one ? 1.0 : 0.0;
    return phase_one ? 0.0 : cost_[static_cast<std::size_t>(v)];
  }

  Eigen::VectorXd basis_column(int v) const {
    if (is_artificial(v)) return Eigen::VectorXd::Unit(rows_, -1 - v);
    return cols_[static_cast<std::size_t>(v)];
  }

  void start_phase_one() {
    basis_.resize(static_cast<std::size_t>(rows_));
    for (int r = 0; r < rows_; ++r) basis_[r] = -1 - r;
    binv_ = Eigen::MatrixXd::Identity(rows_, rows_);
    x_basic_ = b_;
    initialized_ = true;
  }

  Eigen::VectorXd duals(bool phase_one) const {
    Eigen::VectorXd cb(rows_);
    for (int r = 0; r < rows_; ++r) cb[r] = basic_cost(basis_[r], phase_one);
    return binv_.transpose() * cb;
  }

  void refactor() {
    Eigen::MatrixXd bmat(rows_, rows_);
    for (int r = 0; r < rows_; ++r) bmat.col(r) = basis_column(basis_[r]);
    binv_ = bmat.partialPivLu().inverse();
    x_basic_ = binv_ * b_;
    for (int r = 0; r < rows_; ++r)
      if (x_basic_[r] < 0.0 && x_basic_[r] > -opt_.feasibility_tol) x_basic_[r] = 0.0;
  }

  void pivot(int leave_row, int entering, const Eigen::VectorXd& alpha) {
    const double a = alpha[leave_row];
    const double theta = std::max(0.0, x_basic_[leave_row]) / a;
    x_basic_ -= theta * alpha;
    x_basic_[leave_row] = theta;
    binv_.row(leave_row) /= a;
    for (int r = 0; r < rows_; ++r)
      if (r != leave_row && alpha[r] != 0.0) binv_.row(r) -= alpha[r] * binv_.row(leave_row);
    if (basis_[leave_row] >= 0) in_basis_[static_cast<std::size_t>(basis_[leave_row])] = false;
    basis_[leave_row] = entering;
    if (entering >= 0) in_basis_[static_cast<std::size_t>(entering)] = true;
    if (++since_refactor_ >= opt_.refactor_every) {
      refactor();
      since_refactor_ = 0;
    }
  }

  Status iterate(bool phase_one, int& iterations) {
    int degenerate_run = 0;
    while (iterations < opt_.max_iterations) {
      const Eigen::VectorXd y = duals(phase_one);
      const bool bland = degenerate_run >= opt_.degenerate_switch;
      int entering = -1;
      double best = -opt_.cost_tol;
      for (std::size_t j = 0; j < cols_.size(); ++j) {
        if (in_basis_[j]) continue;
        const double c = phase_one ? 0.0 : cost_[j];
        const double scale = 1.0 + std::abs(c);
        const double d = c - y.dot(cols_[j]);
        if (d < -opt_.cost_tol * scale && (bland ? entering < 0 : d < best)) {
          entering = static_cast<int>(j);
          best = d;
          if (bland) break;
        }
      }
      if (entering < 0) return Status::optimal;

      const Eigen::VectorXd alpha = binv_ * cols_[static_cast<std::size_t>(entering)];
      int leave = -1;
      double theta = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows_; ++r) {
        if (alpha[r] <= opt_.pivot_tol) continue;
        const double t = std::max(0.0, x_basic_[r]) / alpha[r];
        const bool tie = leave >= 0 && std::abs(t - theta) <= 1e-12 * (1.0 + theta);
        if (t < theta && !tie) {
          theta = t;
          leave = r;
        } else if (tie && basis_[r] < basis_[leave]) {
          // lowest variable index leaves; artificials (negative codes) first
          leave = r;
          theta = std::min(theta, t);
        }
      }
      if (leave < 0) return Status::unbounded;
      degenerate_run = theta <= 1e-14 ? degenerate_run + 1 : 0;
      pivot(leave, entering, alpha);
      ++iterations;
    }
    return Status::iteration_limit;
  }

  void drive_out_artificials() {
    for (int r = 0; r < rows_; ++r) {
      if (!is_artificial(basis_[r])) continue;
      for (std::size_t j = 0; j < cols_.size(); ++j) {
        if (in_basis_[j]) continue;
        const double a = binv_.row(r).dot(cols_[j]);
        if (std::abs(a) > 1e-9) {
          x_basic_[r] = 0.0;
          pivot(r, static_cast<int>(j), binv_ * cols_[j]);
          break;
        }
      }
      // A remaining artificial marks a redundant row; it stays basic at zero.
    }
  }

  int rows_;
  Options opt_;
  Eigen::VectorXd b_;
  std::vector<double> sign_;
  std::vector<Eigen::VectorXd> cols_;
  std::vector<double> cost_;
  std::vector<bool> in_basis_;

  bool initialized_ = false;
  bool phase_two_ = false;
  std::vector<int> basis_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd x_basic_;
  int since_refactor_ = 0;
};

}  // namespace qtradeoff::lp

#pragma once

#include <stdexcept>
#include <string>

namespace qtradeoff {

/// Malformed or out-of-contract input (CLI exit code 1).
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// The requested optimization has an empty feasible set (CLI exit code 2).
class Infeasible : public std::runtime_error {
 public:
  explicit Infeasible(const std::string& what) : std::runtime_error(what) {}
};

/// A brute-force or retry budget would be exceeded (CLI exit code 3).
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qtradeoff

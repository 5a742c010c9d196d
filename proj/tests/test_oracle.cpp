#include "qtradeoff/ensembles.hpp"
#include "qtradeoff/oracle.hpp"
#include "qtradeoff/solver.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace qtradeoff;
using Catch::Matchers::WithinAbs;

TEST_CASE("brute force endpoints and slope -1") {
  const Ensemble pair = pair_ensemble();
  BruteForceOptions o;
  o.steps = 60;
  CHECK_THAT(brute_force_M(pair, 0.0, o), WithinAbs(ensemble_entropy(pair), 0.05));
  CHECK(brute_force_M(pair, 0.0, o) <= ensemble_entropy(pair) + 1e-12);
  CHECK_THAT(brute_force_M(orthonormal_ensemble(2), 0.5, o), WithinAbs(0.5, 0.05));
  o.slack = 0.0;
  CHECK_THAT(brute_force_M(pair, 0.0, o), WithinAbs(ensemble_entropy(pair), 1e-12));
}

TEST_CASE("pair reference value lies below the chord") {
  const Ensemble pair = pair_ensemble();
  BruteForceOptions o;
  o.steps = 100;
  o.slack = 0.0;
  const double v = brute_force_M(pair, 0.5, o);
  CHECK(v < ensemble_entropy(pair) * 0.5);
  const double s = solve_M(pair, 0.5, SimplexGrid::build(pair, 128)).value;
  CHECK(s <= v + 1e-6);
  CHECK(s >= v - 5e-3);
}

TEST_CASE("brute force N is infinite below S(E) and bounds the solver") {
  const Ensemble pair = pair_ensemble();
  BruteForceOptions o;
  o.steps = 60;
  o.slack = 0.0;
  const auto v = brute_force_N(pair, std::vector<double>{0.3, 0.8}, o);
  CHECK(std::isinf(v[0]));
  CHECK(v[1] >= solve_N_rsp(pair, 0.8, SimplexGrid::build(pair, 128)).value - 1e-6);
}

TEST_CASE("guards") {
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(brute_force_M(random_ensemble(4, 2, rng), 0.5), InvalidInput);
  BruteForceOptions o;
  o.steps = 2000;
  CHECK_THROWS_AS(brute_force_M(three_state_ensemble(), 0.5, o), BudgetExceeded);
}

TEST_CASE("reference eigensolvers") {
  CMatrix z(2, 2);
  z << 1, 0, 0, -1;
  const auto ez = eig2(z);
  CHECK_THAT(ez.values[0], WithinAbs(-1.0, 1e-15));
  CHECK_THAT(ez.values[1], WithinAbs(1.0, 1e-15));
  CMatrix a(2, 2);
  a << 0.75, 0.25, 0.25, 0.25;
  const auto ea = eig2(a);
  CHECK_THAT(ea.values[0], WithinAbs((1.0 - std::sqrt(0.5)) / 2.0, 1e-14));
  CHECK_THAT(ea.values[1], WithinAbs((1.0 + std::sqrt(0.5)) / 2.0, 1e-14));
  for (int k = 0; k < 2; ++k) {
    const CVector v = ea.vectors.col(k);
    CHECK((a * v - ea.values[k] * v).norm() < 1e-13);
  }
  const auto ei = eig_small(CMatrix::Identity(3, 3));
  for (int k = 0; k < 3; ++k) CHECK_THAT(ei.values[k], WithinAbs(1.0, 1e-15));
  CMatrix nonherm(2, 2);
  nonherm << 0, 1, 0, 0;
  CHECK_THROWS_AS(eig2(nonherm), InvalidInput);
}

#include "qtradeoff/ensembles.hpp"
#include "qtradeoff/symmetry.hpp"

#include <catch_amalgamated.hpp>

#include <numbers>

using namespace qtradeoff;
using Catch::Matchers::WithinAbs;

namespace {
const double kTheta = std::numbers::pi / 8.0;
}

TEST_CASE("group actions are verified") {
  const Ensemble e3 = three_state_ensemble();
  CHECK(verify_action(e3, GroupAction::trivial(3, 3)).ok);

  const Ensemble bb84 = bb84_ensemble(kTheta);
  const GroupAction g = bb84_action(kTheta);
  CHECK(g.order() == 4);
  CHECK(verify_action(bb84, g).ok);

  GroupAction wrong = g;
  wrong.elements[1].unitary = wrong.elements[2].unitary;
  const ActionCheck bad = verify_action(bb84, wrong);
  CHECK_FALSE(bad.ok);
  CHECK(bad.element == 1);
  CHECK(bad.gap > 0.1);

  GroupAction no_identity = g;
  no_identity.elements.erase(no_identity.elements.begin());
  CHECK_FALSE(verify_action(bb84, no_identity).ok);

  GroupAction not_perm = g;
  not_perm.elements[1].perm = {0, 0, 1, 2};
  CHECK_FALSE(verify_action(bb84, not_perm).ok);
}

TEST_CASE("orbits and symmetrization") {
  CHECK(orbits(bb84_action(kTheta), 4).size() == 1);
  CHECK(orbits(GroupAction::trivial(3, 3), 3).size() == 3);
  const auto u = symmetrize({0.7, 0.1, 0.1, 0.1}, bb84_action(kTheta));
  for (double x : u) CHECK_THAT(x, WithinAbs(0.25, 1e-15));
}

TEST_CASE("covariant solve") {
  const Ensemble pair = pair_ensemble();
  const SimplexGrid grid = SimplexGrid::build(pair, 64);
  const auto trivial = covariant_solve_M(pair, GroupAction::trivial(2, 2), 0.5, grid);
  CHECK_THAT(trivial.solution.value, WithinAbs(solve_M(pair, 0.5, grid).value, 1e-9));

  const GroupAction swap = swap_action(0.0, std::numbers::pi / 4.0);
  REQUIRE(verify_action(pair, swap).ok);
  const auto cov = covariant_solve_M(pair, swap, 0.5, grid);
  CHECK_THAT(cov.solution.value, WithinAbs(solve_M(pair, 0.5, grid).value, 2e-6));
  CHECK(cov.solution.support() <= 4);
  CHECK(cov.support_bound() == 4);

  const Ensemble bb84 = bb84_ensemble(kTheta);
  const auto b = covariant_solve_M(bb84, bb84_action(kTheta), 1.0, SimplexGrid::build(bb84));
  CHECK_THAT(b.solution.value, WithinAbs(binary_entropy(0.5 * (1.0 + std::cos(kTheta))), 5e-3));
  CHECK(b.solution.support() <= 8);
  CHECK(b.orbit_count == 1);

  const Ensemble skewed = bb84.with_probs({0.4, 0.2, 0.2, 0.2});
  CHECK_THROWS_AS(covariant_solve_M(skewed, bb84_action(kTheta), 1.0, SimplexGrid::build(skewed)), InvalidInput);
  const auto sym = covariant_solve_M(skewed, bb84_action(kTheta), 1.0, SimplexGrid::build(skewed), {}, true);
  CHECK_THAT(sym.solution.value, WithinAbs(b.solution.value, 1e-4));
}

TEST_CASE("transitive AVS reduces to the uniform prior") {
  const Ensemble bb84 = bb84_ensemble(kTheta);
  const SimplexGrid grid = SimplexGrid::build(bb84);
  CHECK_THAT(avs_transitive(bb84.states(), bb84_action(kTheta), 0.0, grid), WithinAbs(1.0, 1e-6));
  CHECK(avs_transitive(bb84.states(), bb84_action(kTheta), 2.0, grid) <= 1e-6);
  const Ensemble pair = pair_ensemble();
  CHECK_THAT(avs_transitive(pair.states(), swap_action(0.0, std::numbers::pi / 4.0), 0.0, SimplexGrid::build(pair)),
             WithinAbs(0.600876, 1e-6));
  CHECK_THROWS_AS(avs_transitive(three_state_ensemble().states(), GroupAction::trivial(3, 3), 0.5,
                                 SimplexGrid::build(three_state_ensemble())),
                  InvalidInput);
}

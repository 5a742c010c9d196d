#include "qtradeoff/closedform.hpp"

#include <catch_amalgamated.hpp>

#include <numbers>

using namespace qtradeoff;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Devetak-Berger limits") {
  const RatePair small = devetak_berger(1e-6);
  CHECK(small.rate < 1e-10);
  CHECK_THAT(small.quantum, WithinAbs(1.0, 1e-9));
  const RatePair big = devetak_berger(1e3);
  CHECK(big.rate > 8.0);
  CHECK(std::isfinite(big.rate));
  CHECK(big.quantum < 0.02);
  CHECK_THROWS_AS(devetak_berger(0.0), InvalidInput);
}

TEST_CASE("Devetak-Berger at lambda = 1") {
  const double e = std::numbers::e;
  const double rate = 1.0 / (e - 1.0) - 1.0 + std::log2(e / (e - 1.0));
  const RatePair p = devetak_berger(1.0);
  // independent evaluation in bits: the first two terms are nats
  const double bits = (1.0 / (e - 1.0) - 1.0 + std::log(e / (e - 1.0))) / std::numbers::ln2;
  CHECK_THAT(p.rate, WithinRel(bits, 1e-12));
  CHECK(std::abs(p.rate - rate) > 1e-3);  // the mixed-unit reading differs
  CHECK_THAT(p.quantum, WithinAbs(binary_entropy(1.0 - 1.0 / (e - 1.0)), 1e-12));
  // reference values from an independent evaluation
  CHECK_THAT(p.rate, WithinAbs(0.0586482, 1e-6));
  CHECK_THAT(p.quantum, WithinAbs(0.9805218, 1e-6));
}

TEST_CASE("closed-form curve is monotone and inverts") {
  const auto curve = uniform_qubit_curve(60);
  for (std::size_t k = 1; k < curve.size(); ++k) {
    CHECK(curve[k].rate > curve[k - 1].rate);
    CHECK(curve[k].quantum <= curve[k - 1].quantum + 1e-15);
    CHECK(curve[k].quantum + curve[k].rate >= 1.0 - 1e-9);  // Schumacher bound
  }
  for (double r : {0.1, 0.5, 1.0, 2.0}) {
    const double q = devetak_berger_at_rate(r);
    CHECK(q > 0.0);
    CHECK(q < 1.0);
  }
  CHECK_THAT(devetak_berger_at_rate(0.0), WithinAbs(1.0, 1e-15));
}

TEST_CASE("sphere discretizations") {
  const Discretization two = discretize_uniform_qubit(2);
  CHECK(two.ensemble.size() == 2);
  CHECK_THAT(two.covering_radius, WithinAbs(1.0 / std::sqrt(2.0), 1e-3));
  const Discretization six = discretize_uniform_qubit(6);
  CHECK_THAT(ensemble_entropy(six.ensemble), WithinAbs(1.0, 1e-12));
  const Discretization many = discretize_uniform_qubit(64);
  CHECK(many.covering_radius < six.covering_radius);
  CHECK_THAT(ensemble_entropy(many.ensemble), WithinAbs(1.0, 1e-3));
  CHECK_THROWS_AS(discretize_uniform_qubit(1), InvalidInput);
}

TEST_CASE("partition count and cap-seeded grid") {
  CHECK(partition_count_bound(2, 0.1) > partition_count_bound(2, 0.2));
  const Discretization d = discretize_uniform_qubit(16);
  const SimplexGrid g = cap_seeded_grid(d.ensemble);
  CHECK(g.points().size() > 17);
  for (const auto& pt : g.points()) {
    double s = 0.0;
    for (double x : pt.x) s += x;
    CHECK_THAT(s, WithinAbs(1.0, 1e-12));
  }
  CHECK_THROWS_AS(cap_seeded_grid(three_state_ensemble()), InvalidInput);
}

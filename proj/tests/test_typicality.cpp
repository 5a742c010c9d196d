#include "qtradeoff/ensembles.hpp"
#include "qtradeoff/typicality.hpp"

#include <catch_amalgamated.hpp>

#include <numbers>
#include <random>

using namespace qtradeoff;
using Catch::Matchers::WithinAbs;

namespace {

EncodingKernel bb84_partition() {
  RMatrix k(4, 2);
  k << 1, 0, 1, 0, 0, 1, 0, 1;
  return EncodingKernel(k);
}

}  // namespace

TEST_CASE("types and typical sequences") {
  const std::vector<double> p{0.5, 0.25, 0.25};
  const Sequence exact{0, 1, 0, 2, 0, 1, 2, 0};
  CHECK(is_typical(exact, p, 1e-6));
  const Sequence skewed(8, 0);
  CHECK_FALSE(is_typical(skewed, p, 0.5));
  CHECK_THROWS_AS(is_typical(exact, p, 0.0), InvalidInput);

  const std::vector<int> half{5, 5};
  CHECK_THAT(std::exp2(log2_multinomial(half)), WithinAbs(252.0, 1e-9));
  const std::vector<double> u{0.5, 0.5};
  const TypicalBounds b = typical_count_bounds(u, 1.0, 10);
  CHECK(b.class_lower <= std::log2(252.0));
  CHECK(std::log2(252.0) <= b.class_upper);
  CHECK(enumerate_types(10, 3).size() == 66);
}

TEST_CASE("typical set probability") {
  const std::vector<double> p{0.6, 0.3, 0.1};
  const Estimate e = typical_probability_mc(p, 100, 4.0, 20000, 3);
  CHECK(e.upper() >= 1.0 - 1.0 / 16.0);
  CHECK(e.samples == 20000);
}

TEST_CASE("conditional typicality") {
  RMatrix det(3, 2);
  det << 1, 0, 0, 1, 1, 0;
  const ChannelMatrix w(det);
  const Sequence in{0, 1, 2, 2, 1, 0, 0};
  Sequence out;
  for (int i : in) out.push_back(i == 1 ? 1 : 0);
  CHECK(is_cond_typical(out, in, w, 1e-6));

  std::mt19937_64 rng(4);
  const ChannelMatrix bsc = ChannelMatrix::bsc(0.2);
  for (int t = 0; t < 200; ++t) {
    const Sequence i = sample_sequence(std::vector<double>{0.5, 0.5}, 30, rng);
    const Sequence j = sample_channel(i, bsc, rng);
    // widening the robust slack never removes a string
    if (is_cond_typical(j, i, bsc, 0.5)) CHECK(is_cond_typical(j, i, bsc, 0.5, 0.1));
    if (is_cond_typical(j, i, bsc, 0.5, 0.05)) CHECK(is_cond_typical(j, i, bsc, 0.5, 0.2));
  }
  const Sequence i = sample_typical(std::vector<double>{0.5, 0.5}, 100, 4.0, rng);
  const Estimate e = cond_typical_probability_mc(bsc, i, 4.0, 20000, 8);
  CHECK(e.upper() >= 1.0 - 2.0 / 16.0);
}

TEST_CASE("projector overlap: limits") {
  const Ensemble pair = pair_ensemble();
  std::mt19937_64 rng(2);
  const Sequence in = sample_sequence(pair.probs(), 10, rng);
  const Sequence out = sample_channel(in, ChannelMatrix::from(EncodingKernel::trivial(2)), rng);
  CHECK_THAT(projector_overlap(in, out, pair, EncodingKernel::trivial(2), 1e6), WithinAbs(1.0, 1e-12));

  // single letter: only the dominant eigenvector is typical
  const Sequence i0{0}, j0{0};
  const double dominant = 0.5 * (1.0 + std::sqrt(0.5));
  CHECK_THAT(projector_overlap(i0, j0, pair, EncodingKernel::trivial(2), 0.5, 0.0, OverlapBasis::kernel),
             WithinAbs(dominant, 1e-12));
  CHECK_THAT(projector_overlap(i0, j0, pair, EncodingKernel::trivial(2), 0.5, 0.0, OverlapBasis::empirical),
             WithinAbs(1.0, 1e-12));
}

TEST_CASE("projector overlap: dynamic programming equals enumeration") {
  const Ensemble bb84 = bb84_ensemble(std::numbers::pi / 8.0);
  RMatrix km(4, 2);
  km << 0.9, 0.1, 0.8, 0.2, 0.15, 0.85, 0.1, 0.9;
  const EncodingKernel k(km);
  for (int s = 0; s < 3; ++s) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(s));
    const Sequence in = sample_sequence(bb84.probs(), 8, rng);
    const Sequence out = sample_channel(in, ChannelMatrix::from(k), rng);
    for (auto basis : {OverlapBasis::empirical, OverlapBasis::kernel})
      for (double delta : {0.2, 0.6, 1.2})
        for (double eps : {0.0, 0.1})
          CHECK_THAT(projector_overlap(in, out, bb84, k, delta, eps, basis),
                     WithinAbs(projector_overlap_bruteforce(in, out, bb84, k, delta, eps, basis), 1e-10));
  }
}

TEST_CASE("projector overlap bound on BB84 conditional ensembles") {
  const Ensemble bb84 = bb84_ensemble(std::numbers::pi / 8.0);
  const EncodingKernel k = bb84_partition();
  std::mt19937_64 rng(21);
  for (int t = 0; t < 10; ++t) {
    const Sequence in = sample_typical(bb84.probs(), 200, 10.0, rng);
    const Sequence out = sample_channel(in, ChannelMatrix::from(k), rng);
    CHECK(projector_overlap(in, out, bb84, k, 10.0) >= 1.0 - 2.0 / 100.0);
    const double rank = log2_projector_rank(in, out, bb84, k, 10.0);
    CHECK(rank > 0.0);
    CHECK(rank <= 200.0);
  }
}

TEST_CASE("reverse Shannon simulation of trivial channels") {
  const std::vector<double> p{0.5, 0.5};
  const RstReport id = reverse_shannon_sim(ChannelMatrix(RMatrix::Identity(2, 2)), p, 100, 4.0, 1);
  CHECK(id.tv.mean <= 1e-12);
  CHECK_THAT(id.log_M / 100.0, WithinAbs(1.0, 0.1));

  RMatrix c(2, 2);
  c << 0.3, 0.7, 0.3, 0.7;
  const RstReport constant = reverse_shannon_sim(ChannelMatrix(c), p, 100, 4.0, 1);
  CHECK(constant.mutual_information < 1e-12);
  CHECK(constant.log_M <= constant.log_M_budget);
  CHECK(constant.log_M / 100.0 < 0.1);
}

TEST_CASE("reverse Shannon simulation of a binary symmetric channel") {
  const std::vector<double> p{0.5, 0.5};
  const RstReport r = reverse_shannon_sim(ChannelMatrix::bsc(0.11), p, 200, 6.0, 5);
  CHECK(r.tv.lower() <= r.tv_bound);
  CHECK(r.log_M / 200.0 <= r.mutual_information + 0.2);
  CHECK(r.log_M >= 200.0 * r.mutual_information - 1e-9 - 20.0);
  if (!std::isnan(r.tv_exact)) CHECK_THAT(r.tv.mean, WithinAbs(r.tv_exact, 5.0 * r.tv.half_width + 1e-3));
}

TEST_CASE("materialized codebooks agree with the sampling model") {
  const std::vector<double> p{0.5, 0.5};
  std::mt19937_64 rng(5);
  const std::vector<Sequence> panel{sample_typical(p, 6, 2.0, rng)};
  const auto plan = rst_plan(ChannelMatrix::bsc(0.11), p, 6, 2.0, panel, {}, rng);
  const auto mat = rst_materialized_distribution(plan.inputs[0], plan, 20000, 9);
  const auto mod = rst_model_distribution(plan.inputs[0], plan);
  REQUIRE(mat.size() == mod.size());
  double tv = 0.0;
  for (std::size_t k = 0; k < mat.size(); ++k) tv += 0.5 * std::abs(mat[k] - mod[k]);
  CHECK(tv < 0.03);
}

TEST_CASE("derandomization") {
  const std::vector<std::vector<double>> ones(5, std::vector<double>(3, 1.0));
  const std::vector<double> x{0.2, 0.3, 0.5};
  const auto r = derandomize(ones, x, 1, 0.1, 3);
  CHECK(r.chosen.size() == 1);
  CHECK(r.attempts == 1);
  CHECK_THROWS_AS(derandomize(ones, x, 1, 0.0, 3), InvalidInput);

  std::mt19937_64 rng(8);
  std::vector<std::vector<double>> table(16, std::vector<double>(40));
  for (auto& row : table)
    for (double& v : row) v = 0.85 + 0.15 * uniform01(rng);
  const std::vector<double> w(40, 1.0 / 40);
  const int L = static_cast<int>(std::ceil(derandomization_length(2.0, 2, 2, 0.9, 4)));
  const auto ok = derandomize(table, w, std::max(L, 50), 0.05, 17);
  CHECK(ok.worst_mean >= 0.95 * ok.mu);
}

TEST_CASE("coded fidelity audit") {
  const Ensemble bb84 = bb84_ensemble(std::numbers::pi / 8.0);
  const EncodingKernel k = bb84_partition();
  AuditOptions o;
  o.inputs = 4;
  o.outputs_per_input = 16;
  const AuditReport loose = coded_fidelity_audit(bb84, k, 40, 1e6, 3, o);
  CHECK_THAT(loose.bound, WithinAbs(1.0, 1e-9));
  for (const auto& row : loose.rows) CHECK_THAT(row.fidelity.mean, WithinAbs(1.0, 1e-9));

  const AuditReport r = coded_fidelity_audit(bb84, k, 100, 20.0, 4, o);
  CHECK_THAT(r.bound, WithinAbs(0.92, 1e-12));
  CHECK(r.all_pass);
  CHECK_THAT(r.classical_leading, WithinAbs(100.0 * classical_info(bb84, k), 1e-9));
  CHECK_THAT(r.quantum_leading, WithinAbs(100.0 * conditional_chi(bb84, k), 1e-9));
  CHECK(r.classical_measured <= r.classical_leading + r.classical_correction);
  CHECK(r.quantum_measured <= r.quantum_leading + r.quantum_correction);
  CHECK_THROWS_AS(coded_fidelity_audit(bb84, k, 500, 20.0, 4, o), InvalidInput);
}

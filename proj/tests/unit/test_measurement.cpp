#include <doctest.h>

#include "support.hpp"

using namespace entsplit;
using testing::inv_sqrt2;

namespace {

ProjectiveMeasurement meas(FixtureId id) { return ProjectiveMeasurement::from_splitting(fixture(id)); }

}  // namespace

TEST_CASE("product samples are reproducible and product") {
  const TensorSpace s({2, 2, 2});
  const auto a = sample_product_states(s, 3, 11);
  const auto b = sample_product_states(s, 3, 11);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(max_abs(a[k].amplitudes() - b[k].amplitudes()) == 0.0);
    for (const auto& cut : Bipartition::all(3)) CHECK(second_schmidt(a[k], cut) <= 1e-10);
  }
}

TEST_CASE("mean outcome probability matches the Haar moment") {
  // E <phi|P|phi> = rank / D for Haar product inputs; check within 3 standard errors.
  const ProjectiveMeasurement m = meas(FixtureId::RHOPRIME_2x3);
  const int n = 10000;
  const auto inputs = sample_product_states(m.space(), n, 4242);
  for (std::size_t i = 0; i < m.outcomes(); ++i) {
    double sum = 0.0, sum2 = 0.0;
    for (const auto& psi : inputs) {
      const double p = m.probabilities(psi)[i];
      sum += p;
      sum2 += p * p;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    const double expect = static_cast<double>(m.ranks()[i]) / 6.0;
    CHECK(std::abs(mean - expect) <= 3.0 * se);
  }
}

TEST_CASE("measuring |01> with the 2x2 splitting gives a product post-state") {
  const ProjectiveMeasurement m = meas(FixtureId::EX1_2x2);
  const Ket in = ket_from_labels(m.space(), {0, 1});
  const auto p = m.probabilities(in);
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(0.0));
  const OutcomeRecord r = measure(m, in, 0);
  CHECK(std::abs(r.post_state.amplitudes()(1)) == doctest::Approx(1.0));
  CHECK(r.max_schmidt2() <= 1e-9);
  CHECK_THROWS_AS(measure(m, in, 1), ZeroProbabilityError);
}

TEST_CASE("measuring |00> with the 2x2 splitting gives Bell post-states") {
  const ProjectiveMeasurement m = meas(FixtureId::EX1_2x2);
  const Ket in = ket_from_labels(m.space(), {0, 0});
  const auto p = m.probabilities(in);
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
  for (std::size_t i = 0; i < 2; ++i) {
    const OutcomeRecord r = measure(m, in, i);
    const Vector& a = r.post_state.amplitudes();
    const double sign = i == 0 ? 1.0 : -1.0;
    CHECK(std::abs(a(0) - cplx(inv_sqrt2())) <= 1e-12);
    CHECK(std::abs(a(3) - cplx(sign * inv_sqrt2())) <= 1e-12);
    CHECK(r.min_schmidt2() == doctest::Approx(inv_sqrt2()).epsilon(1e-12));
  }
}

TEST_CASE("every outcome on |00> in 2x3 is entangled") {
  const ProjectiveMeasurement m = meas(FixtureId::EX2_2x3);
  const Ket in = ket_from_labels(m.space(), {0, 0});
  const auto p = m.probabilities(in);
  for (std::size_t i = 0; i < m.outcomes(); ++i) {
    if (p[i] <= tol::kOutcomeProbability) continue;
    CHECK(measure(m, in, i).min_schmidt2() > tol::kEntangledSchmidt);
  }
}

TEST_CASE("sampled outcomes follow the Born rule") {
  const ProjectiveMeasurement m = meas(FixtureId::EX2_2x3);
  const Ket in = sample_product_states(m.space(), 1, 3).front();
  const auto p = m.probabilities(in);
  Rng rng(12);
  std::vector<int> counts(m.outcomes(), 0);
  const int n = 20000;
  for (int k = 0; k < n; ++k) ++counts[measure(m, in, rng).outcome];
  for (std::size_t i = 0; i < m.outcomes(); ++i) {
    const double se = std::sqrt(p[i] * (1 - p[i]) / n);
    CHECK(std::abs(counts[i] / double(n) - p[i]) <= 4.0 * se + 1e-12);
  }
}

TEST_CASE("Property 2 certification") {
  Property2Config cfg;
  const Property2Report ex2 = certify_property2(meas(FixtureId::EX2_2x3), cfg, Property2Mode::Bipartite);
  CHECK(ex2.holds);
  CHECK_FALSE(ex2.empirical.counterexample);
  CHECK(ex2.empirical.max_born_deviation <= 1e-9);

  const Property2Report ex1 = certify_property2(meas(FixtureId::EX1_2x2), cfg, Property2Mode::Bipartite);
  CHECK_FALSE(ex1.holds);
  REQUIRE(ex1.empirical.counterexample);
  const std::string label = basis_label(ex1.empirical.counterexample->input);
  CHECK((label == "01" || label == "10"));

  CHECK_THROWS_AS(certify_property2(meas(FixtureId::EX2_2x3), cfg, Property2Mode::Genuine), ContractViolation);
  CHECK_THROWS_AS(ProjectiveMeasurement::from_splitting(Splitting(TensorSpace({2, 2}), {})), ContractViolation);
}

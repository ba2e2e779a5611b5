#include <doctest.h>

#include "support.hpp"

using namespace entsplit;

namespace {

StateSet set_of(FixtureId id) { return StateSet::from_splitting(fixture(id)); }

void check_witness(const StateSet& set, std::size_t i, const StateIdentifiability& s) {
  REQUIRE(s.witness);
  const Vector& phi = s.witness->ket.amplitudes();
  CHECK(testing::overlap_with(set[i].support, phi) >= tol::kPositiveOverlap);
  for (std::size_t j = 0; j < set.size(); ++j) {
    if (j != i) CHECK(testing::overlap_with(set[j].support, phi) <= tol::kZeroOverlap);
  }
  for (const auto& cut : Bipartition::all(set.space().parties())) {
    CHECK(second_schmidt(s.witness->ket.normalized(), cut) <= tol::kProductSchmidt);
  }
}

}  // namespace

TEST_CASE("identifiability of single states") {
  const SearchConfig cfg;
  const StateSet ex1 = set_of(FixtureId::EX1_2x2);
  for (std::size_t i = 0; i < 2; ++i) {
    const StateIdentifiability s = identifiable_witness(ex1, i, cfg);
    CHECK(s.verdict == Identifiability::Identifiable);
    check_witness(ex1, i, s);
  }

  const StateSet ex2 = set_of(FixtureId::EX2_2x3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(is_not_identifiable(identifiable_witness(ex2, i, cfg).verdict));

  const StateSet prime = set_of(FixtureId::RHOPRIME_2x3);
  const StateIdentifiability p0 = identifiable_witness(prime, 0, cfg);
  CHECK(p0.verdict == Identifiability::Identifiable);
  check_witness(prime, 0, p0);
  CHECK(is_not_identifiable(identifiable_witness(prime, 1, cfg).verdict));

  CHECK_THROWS_AS(identifiable_witness(ex2, 3, cfg), std::out_of_range);
}

TEST_CASE("identifiability when the supports do not fill the space") {
  const Splitting ex2 = fixture(FixtureId::EX2_2x3);
  const StateSet partial(ex2.space(), {MixedState{ex2[0], {}}, MixedState{ex2[1], {}}});
  CHECK_FALSE(partial.full_rank_sum());
  const IdentifiabilityReport r = identifiability(partial, SearchConfig{});
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(r.states[i].verdict == Identifiability::Identifiable);
    check_witness(partial, i, r.states[i]);
  }
}

TEST_CASE("Property 1 on the fixtures") {
  const SearchConfig cfg;
  CHECK(check_property1(set_of(FixtureId::EX2_2x3), cfg).holds);
  CHECK_FALSE(check_property1(set_of(FixtureId::EX1_2x2), cfg).holds);
  const Property1Report g = check_property1(set_of(FixtureId::EX6_4QUBIT), cfg, true);
  CHECK(g.holds);
  CHECK(g.cuts.size() == 8);
  CHECK_THROWS_AS(check_property1(set_of(FixtureId::EX2_2x3), cfg, true), ContractViolation);
}

TEST_CASE("set classes") {
  const SearchConfig cfg;
  const SetClass ex2 = classify_set(set_of(FixtureId::EX2_2x3), cfg);
  CHECK(ex2.in_S3);
  CHECK(ex2.in_S2);
  const SetClass prime = classify_set(set_of(FixtureId::RHOPRIME_2x3), cfg);
  CHECK_FALSE(prime.in_S3);
  CHECK(prime.in_S2);
  const SetClass ex1 = classify_set(set_of(FixtureId::EX1_2x2), cfg);
  CHECK_FALSE(ex1.in_S3);
  CHECK_FALSE(ex1.in_S2);
  CHECK_FALSE(SetClass::in_S1_computed);
}

TEST_CASE("elimination tables in the computational basis") {
  const StateSet ex2 = set_of(FixtureId::EX2_2x3);
  const EliminationTable t = elimination_table(ex2, computational_basis(ex2.space()));
  const std::vector<std::pair<std::string, std::size_t>> expected{
      {"00", 2}, {"01", 1}, {"02", 0}, {"10", 1}, {"11", 0}, {"12", 2}};
  REQUIRE(t.rows.size() == 6);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(t.rows[k].outcome == expected[k].first);
    CHECK(t.rows[k].eliminated == std::vector<std::size_t>{expected[k].second});
  }
  CHECK(t.dead_outcomes.empty());

  const StateSet ex5 = set_of(FixtureId::EX5_3x3);
  const EliminationTable t5 = elimination_table(ex5, computational_basis(ex5.space()));
  std::vector<std::string> dead;
  for (std::size_t k : t5.dead_outcomes) dead.push_back(t5.rows[k].outcome);
  CHECK(dead == std::vector<std::string>{"00", "11"});

  const StateSet ex1 = set_of(FixtureId::EX1_2x2);
  const EliminationTable t1 = elimination_table(ex1, computational_basis(ex1.space()));
  CHECK(t1.two_states);
  CHECK(t1.rows[0].dead());
  CHECK(t1.rows[1].eliminated == std::vector<std::size_t>{1});
  CHECK(t1.rows[2].eliminated == std::vector<std::size_t>{0});
  CHECK(t1.rows[3].dead());
}

TEST_CASE("basis labels") {
  const TensorSpace s({2, 3});
  CHECK(basis_label(ket_from_labels(s, {1, 2})) == "12");
  Vector v = Vector::Zero(6);
  v(0) = v(1) = testing::inv_sqrt2();
  CHECK(basis_label(Ket(s, v)).empty());
}

TEST_CASE("partial-transpose probe") {
  const Splitting ex2 = fixture(FixtureId::EX2_2x3);
  const NptReport r = npt_probe(ex2[0], 200, 9);
  CHECK(r.fraction_npt == 1.0);
  CHECK(r.cuts.front().max_eigenvalue < -1e-9);

  const TensorSpace s({2, 2});
  Matrix cols(4, 2);
  cols << testing::basis_vector(s, {0, 0}), testing::basis_vector(s, {0, 1});
  CHECK(npt_probe(Subspace(s, cols), 200, 9).fraction_npt == 0.0);
}

TEST_CASE("partial-transpose minimum equals minus the product of Schmidt coefficients") {
  // Oracle: for a two-qubit state with Schmidt coefficients s1, s2 the partial
  // transpose has spectrum {s1^2, s2^2, s1 s2, -s1 s2}.
  std::mt19937_64 rng(31);
  const TensorSpace s({2, 2});
  for (int t = 0; t < 50; ++t) {
    const Vector v = testing::random_unit(4, rng);
    const auto sq = testing::schmidt_squares(v, {2, 2}, {0});
    const double expect = -std::sqrt(std::max(0.0, sq[0] * sq[1]));
    const Operator pt = partial_transpose(Operator::pure(Ket(s, v)), Bipartition::first_party(2));
    CHECK(min_eigenvalue(pt) == doctest::Approx(expect).epsilon(1e-9));
  }
}

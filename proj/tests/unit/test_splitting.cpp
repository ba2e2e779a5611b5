#include <doctest.h>

#include "support.hpp"

using namespace entsplit;

namespace {

Vector bv(const TensorSpace& s, std::vector<int> l) { return testing::basis_vector(s, std::move(l)); }

Subspace span_of(const TensorSpace& s, std::vector<Vector> v) {
  Matrix m(s.total_dim(), static_cast<Index>(v.size()));
  for (std::size_t j = 0; j < v.size(); ++j) m.col(static_cast<Index>(j)) = v[j];
  return orthonormalize(s, m);
}

}  // namespace

TEST_CASE("fixtures have the stated profiles") {
  const std::vector<std::pair<FixtureId, Profile>> expected{
      {FixtureId::EX1_2x2, {2, 2}},
      {FixtureId::EX2_2x3, {2, 2, 2}},
      {FixtureId::EX3_2x4_MAX, {2, 2, 2, 2}},
      {FixtureId::EX4_2x4_MIN, {3, 3, 2}},
      {FixtureId::EX5_3x3, {3, 3, 3}},
      {FixtureId::EX6_4QUBIT, Profile(8, 2)},
      {FixtureId::RHOPRIME_2x3, {4, 2}},
  };
  for (const auto& [id, profile] : expected) {
    CAPTURE(to_string(id));
    const SplittingCheck c = verify_splitting(fixture(id));
    CHECK(c.valid());
    CHECK(c.profile == profile);
    CHECK(c.max_cross <= 1e-9);
    CHECK(c.completeness_error <= 1e-9);
    CHECK(parse_fixture_id(to_string(id)) == id);
  }
  CHECK_THROWS_AS(parse_fixture_id("EX9"), std::invalid_argument);
}

TEST_CASE("overlapping supports fail the orthogonality check") {
  const TensorSpace s({2, 2});
  const Splitting bad(s, {span_of(s, {bv(s, {0, 0}), bv(s, {0, 1})}), span_of(s, {bv(s, {0, 0}), bv(s, {1, 0})})});
  const SplittingCheck c = verify_splitting(bad);
  CHECK_FALSE(c.orthogonal);
  CHECK_FALSE(c.valid());
}

TEST_CASE("entangled splittings among the fixtures") {
  const SearchConfig cfg;
  for (FixtureId id : all_fixtures()) {
    CAPTURE(to_string(id));
    const Splitting sp = fixture(id);
    const EntangledSplittingReport r = verify_entangled_splitting(sp, cfg, default_mode(sp.space()));
    const bool expect = id != FixtureId::EX1_2x2 && id != FixtureId::RHOPRIME_2x3;
    CHECK(r.all_entangled == expect);
    CHECK_FALSE(r.inconclusive);
  }
}

TEST_CASE("feasibility bounds") {
  const FeasibilityReport a = feasibility(TensorSpace({2, 3}), {2, 2, 2});
  CHECK(a.feasible());
  CHECK(a.cardinality_min == 3);
  CHECK(a.cardinality_max == 3);
  CHECK(a.degeneracy_degree == 1);

  const FeasibilityReport b = feasibility(TensorSpace({2, 2}), {2, 2});
  CHECK_FALSE(b.feasible());
  CHECK(b.max_entangled_dim == 1);

  const FeasibilityReport c = feasibility(TensorSpace({2, 4}), {4, 4});
  CHECK_FALSE(c.feasible());
  CHECK(c.max_entangled_dim == 3);

  // 2 x 4: profiles (2,2,2,2) and (3,3,2).
  const FeasibilityReport d = feasibility(TensorSpace({2, 4}), {3, 3, 2});
  CHECK(d.feasible());
  CHECK(d.degeneracy_degree == 2);
  CHECK(d.cardinalities == std::vector<int>{3, 4});

  for (FixtureId id : all_fixtures()) {
    if (id == FixtureId::EX1_2x2 || id == FixtureId::RHOPRIME_2x3) continue;
    const Splitting sp = fixture(id);
    CHECK(feasibility(sp.space(), sp.profile()).feasible());
  }
}

TEST_CASE("Bell pairing generator") {
  const Splitting g24 = generate_bell_pairing(2, 4);
  CHECK(g24.profile() == Profile(4, 2));
  CHECK(verify_splitting(g24).valid());
  CHECK(verify_entangled_splitting(g24, SearchConfig{}, EntanglementMode::Bipartite).all_entangled);
  CHECK_THROWS_AS(generate_bell_pairing(2, 3), PreconditionError);
}

TEST_CASE("splitting search finds small targets") {
  SplittingSearchConfig cfg;
  cfg.budget = 100000;
  const auto r = search_splitting(TensorSpace({2, 3}), {2, 2, 2}, cfg);
  REQUIRE(r.splitting);
  CHECK(verify_splitting(*r.splitting).valid());
  CHECK(verify_entangled_splitting(*r.splitting, SearchConfig{}, EntanglementMode::Bipartite).all_entangled);
  CHECK_THROWS_AS(search_splitting(TensorSpace({2, 4}), {4, 4}, cfg), PreconditionError);
}

TEST_CASE("regrouping a 4-level party into two qubits") {
  const Splitting ex3 = fixture(FixtureId::EX3_2x4_MAX);
  const Splitting three = regroup_parties(ex3, {2, 2, 2});
  CHECK(three.space().dims() == std::vector<int>{2, 2, 2});
  CHECK(verify_splitting(three).profile == Profile{2, 2, 2, 2});
  CHECK(verify_entangled_splitting(three, SearchConfig{}, EntanglementMode::CompletelyEntangled).all_entangled);

  const Splitting same = regroup_parties(ex3, {2, 4});
  for (std::size_t i = 0; i < ex3.size(); ++i) CHECK(max_abs(same[i].basis() - ex3[i].basis()) == 0.0);

  CHECK_THROWS_AS(regroup_parties(ex3, {2, 3}), ContractViolation);
}

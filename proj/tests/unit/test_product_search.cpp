#include <doctest.h>

#include "support.hpp"

using namespace entsplit;
using testing::inv_sqrt2;

namespace {

Subspace span2(const TensorSpace& s, const Vector& a, const Vector& b) {
  Matrix m(s.total_dim(), 2);
  m << a, b;
  return orthonormalize(s, m);
}

Vector bv(const TensorSpace& s, std::vector<int> l) { return testing::basis_vector(s, std::move(l)); }

const Bipartition kCut = Bipartition::first_party(2);

}  // namespace

TEST_CASE("product overlap of a computational span is one") {
  const TensorSpace s({2, 3});
  const Subspace sub = span2(s, bv(s, {0, 0}), bv(s, {0, 1}));
  const OverlapResult r = max_product_overlap(sub, SearchMode::all_parties(), SearchConfig{});
  CHECK(r.overlap >= 1.0 - 1e-12);
  CHECK(testing::overlap_with(sub, r.witness.ket.amplitudes()) >= 1.0 - 1e-12);
}

TEST_CASE("product overlap of a Bell state matches a Bloch-angle grid") {
  const TensorSpace s({2, 2});
  Vector bell = (bv(s, {0, 0}) + bv(s, {1, 1})) * inv_sqrt2();
  Matrix col = bell;
  const Subspace sub(s, col);
  const double grid = testing::grid_product_overlap_2x2(bell, 24);
  const OverlapResult r = max_product_overlap(sub, SearchMode::all_parties(), SearchConfig{});
  CHECK(grid == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.overlap == doctest::Approx(grid).epsilon(1e-9));
}

TEST_CASE("entangled pairs of the 2x3 basis") {
  const Splitting ex2 = fixture(FixtureId::EX2_2x3);
  const SearchConfig cfg;
  for (std::size_t i = 0; i < ex2.size(); ++i) {
    const ProductVerdict v = detect_product(ex2[i], SearchMode::across(kCut), cfg);
    CHECK(v.kind == VerdictKind::CertifiedEntangled);
    CHECK(1.0 - v.max_overlap >= cfg.entangled_gap);
  }
  const Splitting rho_prime = fixture(FixtureId::RHOPRIME_2x3);
  CHECK(detect_product(rho_prime[0], SearchMode::across(kCut), cfg).kind == VerdictKind::ProductFound);
}

TEST_CASE("pencil certificate on reference subspaces") {
  const TensorSpace s22({2, 2});
  const ProductVerdict v =
      certify_2xd_dim2(span2(s22, bv(s22, {0, 0}) + bv(s22, {1, 1}), bv(s22, {0, 0}) - bv(s22, {1, 1})));
  REQUIRE(v.kind == VerdictKind::CertifiedProduct);
  REQUIRE(v.witness);
  CHECK(second_schmidt(v.witness->ket, kCut) <= 1e-9);

  const Splitting ex3 = fixture(FixtureId::EX3_2x4_MAX);
  for (const auto& sub : ex3.subspaces()) CHECK(certify_2xd_dim2(sub).kind == VerdictKind::CertifiedEntangled);

  CHECK_THROWS_AS(certify_2xd_dim2(fixture(FixtureId::EX5_3x3)[0]), ContractViolation);
}

TEST_CASE("biseparability on every cut") {
  const Splitting ex6 = fixture(FixtureId::EX6_4QUBIT);
  const BiseparabilityReport r = detect_biseparable(ex6[0], SearchConfig{});
  CHECK(r.cuts.size() == 7);
  CHECK(r.genuinely_entangled);

  // |0>(|00> + |11>) is product across {1}|{2,3}.
  const TensorSpace s3({2, 2, 2});
  Matrix col = (bv(s3, {0, 0, 0}) + bv(s3, {0, 1, 1})) * inv_sqrt2();
  const BiseparabilityReport b = detect_biseparable(Subspace(s3, col), SearchConfig{});
  CHECK_FALSE(b.genuinely_entangled);
  bool found = false;
  for (const auto& [cut, v] : b.cuts) {
    if (cut == Bipartition(3, {0})) {
      found = true;
      CHECK(contains_product(v.kind));
    }
  }
  CHECK(found);
}

TEST_CASE("regrouped minimal 2x4 splitting has no completely product state") {
  const Splitting three = regroup_parties(fixture(FixtureId::EX4_2x4_MIN), {2, 2, 2});
  bool some_cut_product = false;
  for (const auto& sub : three.subspaces()) {
    const ProductVerdict v = detect_product(sub, SearchMode::all_parties(), SearchConfig{});
    CHECK(is_entangled(v.kind));
    for (const auto& [cut, cv] : detect_biseparable(sub, SearchConfig{}).cuts) {
      some_cut_product = some_cut_product || contains_product(cv.kind);
    }
  }
  // Completely entangled but not genuinely entangled.
  CHECK(some_cut_product);
}

TEST_CASE("search configuration is validated") {
  SearchConfig cfg;
  cfg.product_tol = 1e-5;
  cfg.entangled_gap = 1e-6;
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
  cfg = SearchConfig{};
  cfg.restarts = 0;
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
}

TEST_CASE("ascent trace never decreases") {
  const Splitting ex5 = fixture(FixtureId::EX5_3x3);
  const detail::BlockLayout layout(ex5.space(), {{0}, {1}});
  const Matrix basis = ex5[0].basis();
  const std::vector<detail::FormTerm> form{{&basis, 1.0}};
  for (std::uint64_t k = 0; k < 20; ++k) {
    Rng rng(derive_seed(5, k));
    std::vector<double> trace;
    detail::ascend(layout, form, detail::random_factors(layout, rng), SearchConfig{}, &trace);
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1] - 1e-12);
  }
}

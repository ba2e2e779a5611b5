#include "entsplit/splitting.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "entsplit/errors.hpp"
#include "entsplit/tolerances.hpp"

namespace entsplit {

// ---------------------------------------------------------------------------
// Splitting and its checks

Splitting::Splitting(TensorSpace space, std::vector<Subspace> subspaces, std::vector<std::string> labels)
    : space_(std::move(space)), subspaces_(std::move(subspaces)), labels_(std::move(labels)) {
  for (const auto& s : subspaces_) {
    if (!(s.space() == space_)) throw DimensionError("Splitting: subspace from a different space");
  }
  if (labels_.empty()) {
    for (std::size_t i = 0; i < subspaces_.size(); ++i) labels_.push_back("S" + std::to_string(i + 1));
  }
  if (labels_.size() != subspaces_.size()) throw ContractViolation("Splitting: one label per subspace");
}

Profile Splitting::profile() const {
  Profile p;
  for (const auto& s : subspaces_) p.push_back(static_cast<int>(s.dim()));
  return p;
}

SplittingCheck verify_splitting(const Splitting& sp) {
  SplittingCheck check;
  const Index d = sp.space().total_dim();
  std::vector<Matrix> projectors;
  for (const auto& s : sp.subspaces()) projectors.push_back(s.projector());

  for (std::size_t i = 0; i < projectors.size(); ++i) {
    for (std::size_t j = i + 1; j < projectors.size(); ++j) {
      check.max_cross = std::max(check.max_cross, max_abs(projectors[i] * projectors[j]));
    }
  }
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& p : projectors) sum += p;
  check.completeness_error = max_abs(sum - Matrix::Identity(d, d));

  check.orthogonal = check.max_cross <= tol::kProjector;
  check.complete = check.completeness_error <= tol::kProjector;
  check.profile = sp.profile();
  check.min_rank_ok = std::all_of(check.profile.begin(), check.profile.end(), [](int r) { return r >= 2; });
  std::sort(check.profile.begin(), check.profile.end(), std::greater<>());
  return check;
}

std::string_view to_string(EntanglementMode mode) {
  switch (mode) {
    case EntanglementMode::Bipartite: return "bipartite";
    case EntanglementMode::CompletelyEntangled: return "ces";
    case EntanglementMode::GenuinelyEntangled: return "ges";
  }
  return "?";
}

EntanglementMode default_mode(const TensorSpace& space) {
  return space.is_bipartite() ? EntanglementMode::Bipartite : EntanglementMode::GenuinelyEntangled;
}

SubspaceVerdict check_subspace(const Subspace& s, EntanglementMode mode, const SearchConfig& cfg) {
  const int m = s.space().parties();
  SubspaceVerdict out;
  switch (mode) {
    case EntanglementMode::Bipartite:
      if (m != 2) throw ContractViolation("bipartite mode needs a two-party space, got " + s.space().to_string());
      out.verdict = detect_product(s, SearchMode::all_parties(), cfg);
      break;
    case EntanglementMode::CompletelyEntangled:
      if (m < 3) throw ContractViolation("ces mode needs at least three parties");
      out.verdict = detect_product(s, SearchMode::all_parties(), cfg);
      break;
    case EntanglementMode::GenuinelyEntangled: {
      if (m < 3) throw ContractViolation("ges mode needs at least three parties");
      BiseparabilityReport r = detect_biseparable(s, cfg);
      // Summary cut: first product-containing one, else first inconclusive, else the worst.
      auto first_with = [&](auto pred) {
        for (std::size_t i = 0; i < r.cuts.size(); ++i) {
          if (pred(r.cuts[i].second.kind)) return i;
        }
        return r.cuts.size();
      };
      std::size_t pick = first_with([](VerdictKind k) { return contains_product(k); });
      if (pick == r.cuts.size()) pick = first_with([](VerdictKind k) { return k == VerdictKind::Inconclusive; });
      if (pick == r.cuts.size()) pick = r.worst_cut;
      out.verdict = r.cuts[pick].second;
      out.cuts = std::move(r);
      break;
    }
  }
  return out;
}

EntangledSplittingReport verify_entangled_splitting(const Splitting& sp, const SearchConfig& cfg,
                                                    EntanglementMode mode) {
  EntangledSplittingReport report;
  report.mode = mode;
  bool all = true;
  bool any_product = false;
  bool any_inconclusive = false;
  for (const auto& s : sp.subspaces()) {
    SubspaceVerdict v = check_subspace(s, mode, cfg);
    all = all && is_entangled(v.verdict.kind);
    any_product = any_product || contains_product(v.verdict.kind);
    any_inconclusive = any_inconclusive || v.verdict.kind == VerdictKind::Inconclusive;
    report.subspaces.push_back(std::move(v));
  }
  report.all_entangled = all;
  report.inconclusive = !all && !any_product && any_inconclusive;
  return report;
}

// ---------------------------------------------------------------------------
// Feasibility

namespace {

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return (a > std::numeric_limits<std::uint64_t>::max() - b) ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

void enumerate_profiles(int remaining, int max_part, int min_part, Profile& prefix, FeasibilityReport& out) {
  if (remaining == 0) {
    if (out.profiles.size() < FeasibilityReport::kProfileListCap) {
      out.profiles.push_back(prefix);
    } else {
      out.profiles_truncated = true;
    }
    return;
  }
  for (int part = std::min(max_part, remaining); part >= min_part; --part) {
    if (out.profiles_truncated) return;
    prefix.push_back(part);
    enumerate_profiles(remaining - part, part, min_part, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

FeasibilityReport feasibility(const TensorSpace& space, const Profile& requested) {
  FeasibilityReport r;
  r.total_dim = space.total_dim();
  const Index d = r.total_dim;
  r.cardinality_max = static_cast<int>(d / 2);

  long long sum = 0;
  for (int rank : requested) {
    sum += rank;
    if (rank < 2) r.violations.push_back("rank " + std::to_string(rank) + " < 2");
  }
  if (sum != d) {
    r.violations.push_back("rank sum " + std::to_string(sum) + " != total dimension " + std::to_string(d));
  }
  if (!space.is_bipartite()) return r;

  r.bounds_known = true;
  r.max_entangled_dim = (space.dim(0) - 1) * (space.dim(1) - 1);
  const int max_e = r.max_entangled_dim;
  r.cardinality_min = static_cast<int>((d + max_e - 1) / max_e);
  for (int rank : requested) {
    if (rank > max_e) {
      r.violations.push_back("rank " + std::to_string(rank) + " exceeds maximum entangled dimension " +
                             std::to_string(max_e));
    }
  }

  if (max_e >= 2) {
    // count[n][k]: partitions of n into parts in [2, k].
    const int n_max = static_cast<int>(d);
    std::vector<std::vector<std::uint64_t>> count(static_cast<std::size_t>(n_max) + 1,
                                                  std::vector<std::uint64_t>(static_cast<std::size_t>(max_e) + 1, 0));
    for (int k = 0; k <= max_e; ++k) count[0][static_cast<std::size_t>(k)] = 1;
    for (int n = 1; n <= n_max; ++n) {
      for (int k = 2; k <= max_e; ++k) {
        std::uint64_t c = count[static_cast<std::size_t>(n)][static_cast<std::size_t>(k) - 1];
        if (k <= n) c = saturating_add(c, count[static_cast<std::size_t>(n - k)][static_cast<std::size_t>(k)]);
        count[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] = c;
      }
    }
    r.degeneracy_degree = count[static_cast<std::size_t>(n_max)][static_cast<std::size_t>(max_e)];
    Profile prefix;
    enumerate_profiles(n_max, max_e, 2, prefix, r);
    std::set<int> cards;
    for (const auto& p : r.profiles) cards.insert(static_cast<int>(p.size()));
    r.cardinalities.assign(cards.begin(), cards.end());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Fixtures

namespace {

struct Term {
  int coef;
  std::vector<int> labels;
};

Vector combo(const TensorSpace& space, const std::vector<Term>& terms) {
  Vector v = Vector::Zero(space.total_dim());
  for (const auto& t : terms) v(space.flat_index(t.labels)) += static_cast<double>(t.coef);
  return v;
}

Subspace span_of(const TensorSpace& space, const std::vector<Vector>& vectors) {
  Matrix m(space.total_dim(), static_cast<Index>(vectors.size()));
  for (std::size_t k = 0; k < vectors.size(); ++k) m.col(static_cast<Index>(k)) = vectors[k];
  return orthonormalize(space, m);
}

Splitting group(const TensorSpace& space, const std::vector<Vector>& psi,
                const std::vector<std::vector<int>>& groups) {
  std::vector<Subspace> subs;
  std::vector<std::string> labels;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<Vector> members;
    for (int i : groups[g]) members.push_back(psi.at(static_cast<std::size_t>(i - 1)));
    subs.push_back(span_of(space, members));
    labels.push_back("rho" + std::to_string(g + 1));
  }
  return Splitting(space, std::move(subs), std::move(labels));
}

// psi_1..psi_6 of the minimal 2 x 3 construction.
std::vector<Vector> basis_2x3(const TensorSpace& s) {
  return {
      combo(s, {{1, {0, 1}}, {1, {1, 0}}}), combo(s, {{1, {0, 0}}, {1, {1, 2}}}),
      combo(s, {{1, {0, 2}}, {1, {1, 1}}}), combo(s, {{1, {0, 0}}, {-1, {1, 2}}}),
      combo(s, {{1, {0, 1}}, {-1, {1, 0}}}), combo(s, {{1, {0, 2}}, {-1, {1, 1}}}),
  };
}

std::vector<Vector> basis_4qubit(const TensorSpace& s) {
  auto b = [](unsigned bits) {
    return std::vector<int>{static_cast<int>((bits >> 3) & 1u), static_cast<int>((bits >> 2) & 1u),
                            static_cast<int>((bits >> 1) & 1u), static_cast<int>(bits & 1u)};
  };
  std::vector<Vector> psi;
  // GHZ-type pairs.
  const unsigned ghz[4][2] = {{0b0000, 0b1111}, {0b0011, 0b1100}, {0b0101, 0b1010}, {0b0110, 0b1001}};
  for (const auto& g : ghz) {
    psi.push_back(combo(s, {{1, b(g[0])}, {1, b(g[1])}}));
    psi.push_back(combo(s, {{1, b(g[0])}, {-1, b(g[1])}}));
  }
  // W-type: Hadamard-like sign patterns over single-excitation (and single-hole) states.
  const int signs[4][4] = {{1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1}};
  const unsigned low[4] = {0b0001, 0b0010, 0b0100, 0b1000};
  const unsigned high[4] = {0b1110, 0b1101, 0b1011, 0b0111};
  for (const auto& sg : signs) {
    psi.push_back(combo(s, {{sg[0], b(low[0])}, {sg[1], b(low[1])}, {sg[2], b(low[2])}, {sg[3], b(low[3])}}));
  }
  for (const auto& sg : signs) {
    psi.push_back(combo(s, {{sg[0], b(high[0])}, {sg[1], b(high[1])}, {sg[2], b(high[2])}, {sg[3], b(high[3])}}));
  }
  return psi;
}

}  // namespace

std::string_view to_string(FixtureId id) {
  switch (id) {
    case FixtureId::EX1_2x2: return "EX1_2x2";
    case FixtureId::EX2_2x3: return "EX2_2x3";
    case FixtureId::EX3_2x4_MAX: return "EX3_2x4_MAX";
    case FixtureId::EX4_2x4_MIN: return "EX4_2x4_MIN";
    case FixtureId::EX5_3x3: return "EX5_3x3";
    case FixtureId::EX6_4QUBIT: return "EX6_4QUBIT";
    case FixtureId::RHOPRIME_2x3: return "RHOPRIME_2x3";
  }
  return "?";
}

std::vector<FixtureId> all_fixtures() {
  return {FixtureId::EX1_2x2,     FixtureId::EX2_2x3, FixtureId::EX3_2x4_MAX, FixtureId::EX4_2x4_MIN,
          FixtureId::EX5_3x3,     FixtureId::EX6_4QUBIT, FixtureId::RHOPRIME_2x3};
}

FixtureId parse_fixture_id(std::string_view name) {
  for (FixtureId id : all_fixtures()) {
    if (to_string(id) == name) return id;
  }
  throw std::invalid_argument("unknown fixture '" + std::string(name) + "'");
}

Splitting fixture(FixtureId id) {
  switch (id) {
    case FixtureId::EX1_2x2: {
      const TensorSpace s({2, 2});
      const std::vector<Vector> psi{
          combo(s, {{1, {0, 0}}, {1, {1, 1}}}),   // Phi+
          combo(s, {{1, {0, 1}}}),                 // |01>
          combo(s, {{1, {0, 0}}, {-1, {1, 1}}}),  // Phi-
          combo(s, {{1, {1, 0}}}),                 // |10>
      };
      return group(s, psi, {{1, 2}, {3, 4}});
    }
    case FixtureId::EX2_2x3: {
      const TensorSpace s({2, 3});
      return group(s, basis_2x3(s), {{1, 2}, {3, 4}, {5, 6}});
    }
    case FixtureId::RHOPRIME_2x3: {
      const TensorSpace s({2, 3});
      return group(s, basis_2x3(s), {{1, 2, 3, 4}, {5, 6}});
    }
    case FixtureId::EX3_2x4_MAX: {
      const TensorSpace s({2, 4});
      const std::vector<Vector> psi{
          combo(s, {{1, {0, 0}}, {1, {1, 1}}}), combo(s, {{1, {0, 0}}, {-1, {1, 1}}}),
          combo(s, {{1, {0, 1}}, {1, {1, 0}}}), combo(s, {{1, {0, 1}}, {-1, {1, 0}}}),
          combo(s, {{1, {0, 2}}, {1, {1, 3}}}), combo(s, {{1, {0, 2}}, {-1, {1, 3}}}),
          combo(s, {{1, {0, 3}}, {1, {1, 2}}}), combo(s, {{1, {0, 3}}, {-1, {1, 2}}}),
      };
      return group(s, psi, {{1, 5}, {2, 6}, {3, 7}, {4, 8}});
    }
    case FixtureId::EX4_2x4_MIN: {
      const TensorSpace s({2, 4});
      const std::vector<Vector> psi{
          combo(s, {{1, {0, 0}}, {1, {1, 2}}}), combo(s, {{1, {0, 0}}, {-1, {1, 2}}}),
          combo(s, {{1, {0, 1}}, {1, {1, 3}}}), combo(s, {{1, {0, 1}}, {-1, {1, 3}}}),
          combo(s, {{1, {0, 2}}, {1, {1, 1}}}), combo(s, {{1, {0, 2}}, {-1, {1, 1}}}),
          combo(s, {{1, {0, 3}}, {1, {1, 0}}}), combo(s, {{1, {0, 3}}, {-1, {1, 0}}}),
      };
      return group(s, psi, {{1, 3, 5}, {4, 6, 7}, {2, 8}});
    }
    case FixtureId::EX5_3x3: {
      const TensorSpace s({3, 3});
      const std::vector<Vector> psi{
          combo(s, {{1, {0, 0}}, {1, {1, 1}}, {1, {2, 2}}}),
          combo(s, {{1, {0, 0}}, {-1, {1, 1}}}),
          combo(s, {{1, {0, 0}}, {1, {1, 1}}, {-2, {2, 2}}}),
          combo(s, {{1, {0, 1}}, {1, {1, 2}}}), combo(s, {{1, {0, 1}}, {-1, {1, 2}}}),
          combo(s, {{1, {0, 2}}, {1, {2, 0}}}), combo(s, {{1, {0, 2}}, {-1, {2, 0}}}),
          combo(s, {{1, {1, 0}}, {1, {2, 1}}}), combo(s, {{1, {1, 0}}, {-1, {2, 1}}}),
      };
      return group(s, psi, {{1, 4, 6}, {2, 7, 9}, {3, 5, 8}});
    }
    case FixtureId::EX6_4QUBIT: {
      const TensorSpace s({2, 2, 2, 2});
      std::vector<std::vector<int>> pairs;
      for (int i = 1; i <= 8; ++i) pairs.push_back({i, i + 8});
      return group(s, basis_4qubit(s), pairs);
    }
  }
  throw std::invalid_argument("unknown fixture");
}

// ---------------------------------------------------------------------------
// Bell pairing

Splitting generate_bell_pairing(int d1, int d2) {
  if (d1 < 2 || d2 < 2 || d1 % 2 != 0 || d2 % 2 != 0) {
    throw PreconditionError("generate_bell_pairing needs even local dimensions, got " + std::to_string(d1) +
                            "x" + std::to_string(d2) + "; use search_splitting instead");
  }
  if (d1 * d2 == 4) {
    throw PreconditionError("generate_bell_pairing: 2x2 admits no entangled subspace of dimension 2");
  }
  const TensorSpace s({d1, d2});
  // Bell-type basis of each 2 x 2 block (a, b), blocks ordered row-major.
  // Order within a block: Phi+, Phi-, Psi+, Psi-.
  std::vector<std::array<Vector, 4>> blocks;
  for (int a = 0; a < d1 / 2; ++a) {
    for (int b = 0; b < d2 / 2; ++b) {
      const int r = 2 * a;
      const int c = 2 * b;
      blocks.push_back({
          combo(s, {{1, {r, c}}, {1, {r + 1, c + 1}}}),
          combo(s, {{1, {r, c}}, {-1, {r + 1, c + 1}}}),
          combo(s, {{1, {r, c + 1}}, {1, {r + 1, c}}}),
          combo(s, {{1, {r, c + 1}}, {-1, {r + 1, c}}}),
      });
    }
  }
  std::vector<Subspace> subs;
  auto pair = [&](std::size_t x, int i, std::size_t y, int j) {
    subs.push_back(span_of(s, {blocks[x][static_cast<std::size_t>(i)], blocks[y][static_cast<std::size_t>(j)]}));
  };
  std::size_t n = blocks.size();
  std::size_t paired = n % 2 == 0 ? n : n - 3;
  for (std::size_t x = 0; x < paired; x += 2) {
    for (int k = 0; k < 4; ++k) pair(x, k, x + 1, k);
  }
  if (n % 2 == 1) {
    // Three leftover blocks: close a triangle so every Bell state is used once.
    const std::size_t x = n - 3, y = n - 2, z = n - 1;
    pair(x, 0, y, 0);
    pair(x, 1, y, 1);
    pair(y, 2, z, 2);
    pair(y, 3, z, 3);
    pair(z, 0, x, 2);
    pair(z, 1, x, 3);
  }
  return Splitting(s, std::move(subs));
}

// ---------------------------------------------------------------------------
// Randomized search

namespace {

// Entangled basis of +-1 superpositions of computational states. For odd D one
// transversal triple takes the (1,1,1), (1,-1,0), (1,1,-2) pattern.
std::optional<std::vector<Vector>> random_entangled_basis(const TensorSpace& s, Rng& rng) {
  const int d1 = s.dim(0);
  const int d2 = s.dim(1);
  const Index d = s.total_dim();
  std::vector<bool> used(static_cast<std::size_t>(d), false);
  std::vector<Vector> basis;

  auto flat = [d2](int r, int c) { return static_cast<Index>(r) * d2 + c; };

  if (d % 2 == 1) {
    if (d1 < 3 || d2 < 3) return std::nullopt;
    std::vector<int> rows(static_cast<std::size_t>(d1)), cols(static_cast<std::size_t>(d2));
    std::iota(rows.begin(), rows.end(), 0);
    std::iota(cols.begin(), cols.end(), 0);
    std::shuffle(rows.begin(), rows.end(), rng);
    std::shuffle(cols.begin(), cols.end(), rng);
    Index t[3];
    for (int k = 0; k < 3; ++k) {
      t[k] = flat(rows[static_cast<std::size_t>(k)], cols[static_cast<std::size_t>(k)]);
      used[static_cast<std::size_t>(t[k])] = true;
    }
    const int pattern[3][3] = {{1, 1, 1}, {1, -1, 0}, {1, 1, -2}};
    for (const auto& p : pattern) {
      Vector v = Vector::Zero(d);
      for (int k = 0; k < 3; ++k) v(t[k]) = static_cast<double>(p[k]);
      basis.push_back(v);
    }
  }

  std::vector<Index> order;
  for (Index f = 0; f < d; ++f) {
    if (!used[static_cast<std::size_t>(f)]) order.push_back(f);
  }
  std::shuffle(order.begin(), order.end(), rng);

  std::set<std::pair<Index, Index>> pairs;
  auto key = [](Index x, Index y) { return std::make_pair(std::min(x, y), std::max(x, y)); };
  std::vector<std::pair<Index, Index>> chosen;
  std::uint64_t steps = 0;
  constexpr std::uint64_t kStepLimit = 200000;

  std::function<bool()> match = [&]() -> bool {
    if (++steps > kStepLimit) return false;
    auto first = std::find_if(order.begin(), order.end(), [&](Index f) { return !used[static_cast<std::size_t>(f)]; });
    if (first == order.end()) return true;
    const Index x = *first;
    const int rx = static_cast<int>(x / d2), cx = static_cast<int>(x % d2);
    std::vector<Index> partners;
    for (Index y : order) {
      if (used[static_cast<std::size_t>(y)] || y == x) continue;
      const int ry = static_cast<int>(y / d2), cy = static_cast<int>(y % d2);
      if (ry == rx || cy == cx) continue;
      // {|rx cy>, |ry cx>} already paired would close a 2 x 2 sub-basis.
      if (pairs.count(key(flat(rx, cy), flat(ry, cx)))) continue;
      partners.push_back(y);
    }
    std::shuffle(partners.begin(), partners.end(), rng);
    for (Index y : partners) {
      used[static_cast<std::size_t>(x)] = used[static_cast<std::size_t>(y)] = true;
      pairs.insert(key(x, y));
      chosen.emplace_back(x, y);
      if (match()) return true;
      chosen.pop_back();
      pairs.erase(key(x, y));
      used[static_cast<std::size_t>(x)] = used[static_cast<std::size_t>(y)] = false;
    }
    return false;
  };
  if (!match()) return std::nullopt;

  for (const auto& [x, y] : chosen) {
    Vector plus = Vector::Zero(d), minus = Vector::Zero(d);
    plus(x) = 1.0;
    plus(y) = 1.0;
    minus(x) = 1.0;
    minus(y) = -1.0;
    basis.push_back(plus);
    basis.push_back(minus);
  }
  return basis;
}

class GroupTester {
 public:
  GroupTester(const TensorSpace& space, const std::vector<Vector>& basis, const SplittingSearchConfig& cfg)
      : space_(space), basis_(basis), cfg_(cfg) {}

  // Entangled verdict for the span of the given basis members, memoized.
  bool entangled(std::vector<int> members) {
    std::sort(members.begin(), members.end());
    if (auto it = cache_.find(members); it != cache_.end()) return it->second;
    ++tested_;
    bool result = evaluate(members);
    cache_.emplace(std::move(members), result);
    return result;
  }

  std::uint64_t tested() const { return tested_; }
  Subspace span(const std::vector<int>& members) const {
    Matrix m(space_.total_dim(), static_cast<Index>(members.size()));
    for (std::size_t k = 0; k < members.size(); ++k) {
      m.col(static_cast<Index>(k)) = basis_[static_cast<std::size_t>(members[k])];
    }
    return orthonormalize(space_, m);
  }

 private:
  bool evaluate(const std::vector<int>& members) const {
    if (members.size() < 2) return true;  // every basis member is entangled by construction
    const Subspace s = span(members);
    const Bipartition cut = Bipartition::first_party(2);
    if (auto cert = certify_dim2_across(s, cut)) return cert->kind == VerdictKind::CertifiedEntangled;
    SearchConfig screen = cfg_.search;
    screen.restarts = std::min(cfg_.screen_restarts, cfg_.search.restarts);
    if (1.0 - max_product_overlap(s, SearchMode::all_parties(), screen).overlap <= screen.product_tol) return false;
    return is_entangled(detect_product(s, SearchMode::all_parties(), cfg_.search).kind);
  }

  const TensorSpace& space_;
  const std::vector<Vector>& basis_;
  const SplittingSearchConfig& cfg_;
  std::map<std::vector<int>, bool> cache_;
  std::uint64_t tested_ = 0;
};

}  // namespace

SplittingSearchResult search_splitting(const TensorSpace& space, const Profile& profile,
                                       const SplittingSearchConfig& cfg) {
  const FeasibilityReport feas = feasibility(space, profile);
  if (!feas.bounds_known) throw PreconditionError("search_splitting: only bipartite spaces are supported");
  if (!feas.feasible()) {
    std::string why;
    for (const auto& v : feas.violations) why += (why.empty() ? "" : "; ") + v;
    throw PreconditionError("search_splitting: infeasible profile: " + why);
  }
  cfg.search.validate();

  Profile targets = profile;
  std::sort(targets.begin(), targets.end(), std::greater<>());
  const int d = static_cast<int>(space.total_dim());

  SplittingSearchResult result;
  Rng rng(cfg.search.seed);
  const std::uint64_t per_basis = std::max<std::uint64_t>(1000, cfg.budget / 20);

  while (result.candidates_tested < cfg.budget) {
    auto basis = random_entangled_basis(space, rng);
    ++result.bases_tried;
    if (!basis) {
      if (result.bases_tried > 1000) break;
      continue;
    }
    GroupTester tester(space, *basis, cfg);
    std::vector<int> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<bool> used(static_cast<std::size_t>(d), false);
    std::vector<std::vector<int>> groups;
    const std::uint64_t start = result.candidates_tested;
    auto out_of_budget = [&]() {
      const std::uint64_t spent = tester.tested();
      return start + spent >= cfg.budget || spent >= per_basis;
    };

    // Fill group g member by member; members are taken in `order` position
    // sequence so each set is visited once.
    std::function<bool(std::size_t, std::vector<int>&, std::size_t)> fill =
        [&](std::size_t g, std::vector<int>& members, std::size_t from) -> bool {
      if (out_of_budget()) return false;
      const std::size_t target = static_cast<std::size_t>(targets[g]);
      if (members.size() == target) {
        groups.push_back(members);
        if (g + 1 == targets.size()) return true;
        std::vector<int> next;
        if (fill(g + 1, next, 0)) return true;
        groups.pop_back();
        return false;
      }
      if (g + 1 == targets.size()) {
        // Last group takes whatever remains.
        std::vector<int> rest;
        for (std::size_t k = 0; k < order.size(); ++k) {
          if (!used[static_cast<std::size_t>(order[k])]) rest.push_back(order[k]);
        }
        if (rest.size() != target || !tester.entangled(rest)) return false;
        groups.push_back(rest);
        return true;
      }
      for (std::size_t k = from; k < order.size(); ++k) {
        const int v = order[k];
        if (used[static_cast<std::size_t>(v)]) continue;
        const bool anchor = members.empty();
        members.push_back(v);
        used[static_cast<std::size_t>(v)] = true;
        if (tester.entangled(members) && fill(g, members, k + 1)) return true;
        used[static_cast<std::size_t>(v)] = false;
        members.pop_back();
        // Each group is anchored at the first unused position so that equal
        // groups are not revisited in another order.
        if (anchor || out_of_budget()) return false;
      }
      return false;
    };

    std::vector<int> first;
    const bool found = fill(0, first, 0);
    result.candidates_tested += tester.tested();
    if (found) {
      std::vector<Subspace> subs;
      for (const auto& g : groups) subs.push_back(tester.span(g));
      Splitting sp(space, std::move(subs));
      if (verify_splitting(sp).valid()) {
        result.splitting = std::move(sp);
        return result;
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Regrouping

Splitting regroup_parties(const Splitting& sp, const std::vector<int>& new_dims,
                          const std::vector<Index>& index_map) {
  const TensorSpace target(new_dims);
  const Index d = sp.space().total_dim();
  if (target.total_dim() != d) {
    throw ContractViolation("regroup_parties: " + target.to_string() + " does not match " + sp.space().to_string());
  }
  std::vector<Index> map = index_map;
  if (map.empty()) {
    map.resize(static_cast<std::size_t>(d));
    std::iota(map.begin(), map.end(), Index{0});
  }
  if (static_cast<Index>(map.size()) != d) throw ContractViolation("regroup_parties: index map has wrong length");
  std::vector<bool> hit(static_cast<std::size_t>(d), false);
  for (Index m : map) {
    if (m < 0 || m >= d || hit[static_cast<std::size_t>(m)]) {
      throw ContractViolation("regroup_parties: index map is not a bijection");
    }
    hit[static_cast<std::size_t>(m)] = true;
  }
  std::vector<Subspace> subs;
  for (const auto& s : sp.subspaces()) {
    Matrix b(d, s.dim());
    for (Index f = 0; f < d; ++f) b.row(map[static_cast<std::size_t>(f)]) = s.basis().row(f);
    subs.emplace_back(target, std::move(b));
  }
  return Splitting(target, std::move(subs), sp.labels());
}

}  // namespace entsplit

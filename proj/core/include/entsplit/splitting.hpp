#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entsplit/product_search.hpp"
#include "entsplit/subspace.hpp"
#include "entsplit/tensor_core.hpp"

namespace entsplit {

using Profile = std::vector<int>;

/// Mutually orthogonal subspaces whose direct sum is the whole space.
/// Construction does not enforce the invariants; verify_splitting reports them.
class Splitting {
 public:
  Splitting(TensorSpace space, std::vector<Subspace> subspaces, std::vector<std::string> labels = {});

  const TensorSpace& space() const { return space_; }
  const std::vector<Subspace>& subspaces() const { return subspaces_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return subspaces_.size(); }
  const Subspace& operator[](std::size_t i) const { return subspaces_[i]; }

  /// Dimensions in stored order.
  Profile profile() const;

 private:
  TensorSpace space_;
  std::vector<Subspace> subspaces_;
  std::vector<std::string> labels_;
};

struct SplittingCheck {
  bool orthogonal = false;
  bool complete = false;
  bool min_rank_ok = false;
  /// Sorted descending.
  Profile profile;
  double max_cross = 0.0;          // max_{i != j} |P_i P_j|_max
  double completeness_error = 0.0;  // |sum P_i - I|_max

  bool valid() const { return orthogonal && complete && min_rank_ok; }
};

SplittingCheck verify_splitting(const Splitting& sp);

enum class EntanglementMode {
  Bipartite,            // two parties, product across the single cut
  CompletelyEntangled,  // no completely product state
  GenuinelyEntangled,   // no state product across any cut
};

std::string_view to_string(EntanglementMode mode);

struct SubspaceVerdict {
  ProductVerdict verdict;  // for genuine mode: the verdict of the worst cut
  std::optional<BiseparabilityReport> cuts;
};

struct EntangledSplittingReport {
  EntanglementMode mode = EntanglementMode::Bipartite;
  std::vector<SubspaceVerdict> subspaces;
  bool all_entangled = false;
  /// Not all entangled, no product state found, some verdict inconclusive.
  bool inconclusive = false;
};

/// Entangledness of a single subspace in the requested sense.
SubspaceVerdict check_subspace(const Subspace& s, EntanglementMode mode, const SearchConfig& cfg);

EntangledSplittingReport verify_entangled_splitting(const Splitting& sp, const SearchConfig& cfg,
                                                    EntanglementMode mode);

/// Entangledness mode matching the party count: bipartite for two parties,
/// genuine otherwise.
EntanglementMode default_mode(const TensorSpace& space);

struct FeasibilityReport {
  Index total_dim = 0;
  bool bounds_known = false;  // false for more than two parties
  int max_entangled_dim = 0;  // (d1 - 1)(d2 - 1)
  std::vector<std::string> violations;
  int cardinality_min = 0;  // ceil(D / max_entangled_dim)
  int cardinality_max = 0;  // floor(D / 2)
  /// Profiles (sorted descending) passing the necessary conditions, capped at
  /// kProfileListCap entries.
  std::vector<Profile> profiles;
  bool profiles_truncated = false;
  /// Number of profiles passing the necessary conditions (saturating).
  std::uint64_t degeneracy_degree = 0;
  /// Distinct cardinalities among those profiles.
  std::vector<int> cardinalities;

  /// Passes every known necessary condition; with more than two parties only
  /// the rank and dimension-sum conditions apply.
  bool feasible() const { return violations.empty(); }
  static constexpr std::size_t kProfileListCap = 1000;
};

FeasibilityReport feasibility(const TensorSpace& space, const Profile& requested);

enum class FixtureId {
  EX1_2x2,
  EX2_2x3,
  EX3_2x4_MAX,
  EX4_2x4_MIN,
  EX5_3x3,
  EX6_4QUBIT,
  RHOPRIME_2x3,
};

std::string_view to_string(FixtureId id);
/// Throws std::invalid_argument for an unknown name.
FixtureId parse_fixture_id(std::string_view name);
std::vector<FixtureId> all_fixtures();

/// The named construction with small-integer amplitudes, orthonormalized.
Splitting fixture(FixtureId id);

/// Tiles the space with 2 x 2 blocks, takes the Bell-type basis of each block
/// and pairs Bell states from distinct blocks. Both dimensions must be even.
Splitting generate_bell_pairing(int d1, int d2);

struct SplittingSearchConfig {
  SearchConfig search;
  /// Maximum number of candidate groups tested for entanglement.
  std::uint64_t budget = 100000;
  /// Restarts of the quick product screen run before the full detector.
  int screen_restarts = 4;
};

struct SplittingSearchResult {
  std::optional<Splitting> splitting;
  std::uint64_t candidates_tested = 0;
  int bases_tried = 0;
};

/// Randomized backtracking over entangled bases built from +-1 superpositions
/// of computational states. A group is accepted only if detect_product reports
/// it entangled. Absence of a result is not a proof of infeasibility.
SplittingSearchResult search_splitting(const TensorSpace& space, const Profile& profile,
                                       const SplittingSearchConfig& cfg);

/// Relabels basis indices into a space with new local dimensions.
/// `index_map[old_flat] = new_flat`; an empty map keeps flat indices
/// (for 2 x 4 -> 2 x 2 x 2 this is |0> -> |00>, |1> -> |01>, |2> -> |10>, |3> -> |11>).
Splitting regroup_parties(const Splitting& sp, const std::vector<int>& new_dims,
                          const std::vector<Index>& index_map = {});

}  // namespace entsplit

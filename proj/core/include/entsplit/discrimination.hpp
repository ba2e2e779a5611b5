#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entsplit/product_search.hpp"
#include "entsplit/splitting.hpp"
#include "entsplit/subspace.hpp"
#include "entsplit/tensor_core.hpp"

namespace entsplit {

/// A mixed state given by its support and, optionally, its nonzero eigenvalues
/// (one per support basis vector, summing to 1).
struct MixedState {
  Subspace support;
  std::optional<std::vector<double>> weights;

  /// Throws ContractViolation for a bad weight vector.
  void validate() const;
  /// The density matrix; uniform on the support when no weights are given.
  Matrix density() const;
};

class StateSet {
 public:
  /// Supports must be pairwise orthogonal. With `min_rank_two` every support
  /// must also have dimension at least 2.
  StateSet(TensorSpace space, std::vector<MixedState> states, std::vector<std::string> labels = {},
           bool min_rank_two = true);

  static StateSet from_splitting(const Splitting& sp);

  const TensorSpace& space() const { return space_; }
  const std::vector<MixedState>& states() const { return states_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return states_.size(); }
  const MixedState& operator[](std::size_t i) const { return states_[i]; }
  /// Support dimensions add up to the total dimension.
  bool full_rank_sum() const;

 private:
  TensorSpace space_;
  std::vector<MixedState> states_;
  std::vector<std::string> labels_;
};

enum class Identifiability {
  Identifiable,
  NotIdentifiableCertified,
  NotIdentifiableNumerical,
  Inconclusive,
};

std::string_view to_string(Identifiability v);
bool is_not_identifiable(Identifiability v);

struct StateIdentifiability {
  Identifiability verdict = Identifiability::Inconclusive;
  /// Completely product state with <phi|rho_j|phi> = 0 for j != i and
  /// <phi|rho_i|phi> > 0.
  std::optional<ProductWitness> witness;
  /// Best product overlap with the search space K_i.
  double max_overlap = 0.0;
  /// For a witness: its overlap with supp rho_i and its largest overlap with another support.
  double own_overlap = 0.0;
  double other_overlap = 0.0;
};

struct IdentifiabilityReport {
  std::vector<StateIdentifiability> states;
  bool full_rank_sum = false;
};

/// Searches a completely product state in K_i, the orthocomplement of the
/// other supports, with nonzero overlap with supp rho_i. When the supports
/// fill the space K_i = supp rho_i and this is detect_product on it.
StateIdentifiability identifiable_witness(const StateSet& set, std::size_t i, const SearchConfig& cfg);

IdentifiabilityReport identifiability(const StateSet& set, const SearchConfig& cfg);

struct Property1Report {
  bool genuine = false;
  bool holds = false;
  /// Not shown to hold, but no state shown identifiable either.
  bool inconclusive = false;
  IdentifiabilityReport identifiability;
  /// Genuine mode: per-state verdict across every bipartition.
  std::vector<SubspaceVerdict> cuts;
};

/// Property 1: no state is unambiguously identifiable by local operations.
/// The genuine variant asks the same across every bipartition and needs a
/// multipartite set whose supports fill the space.
Property1Report check_property1(const StateSet& set, const SearchConfig& cfg, bool genuine = false);

struct SetClass {
  bool in_S2 = false;  // at least one state is not identifiable
  bool in_S3 = false;  // no state is identifiable
  /// Perfect local distinguishability is not decided.
  static constexpr bool in_S1_computed = false;
  bool inconclusive = false;
  IdentifiabilityReport identifiability;
};

/// Throws ContractViolation if in_S3 without in_S2.
SetClass classify_set(const StateSet& set, const SearchConfig& cfg);

struct EliminationRow {
  std::string outcome;
  std::vector<double> overlaps;  // <e|Pi_i|e> per state
  std::vector<std::size_t> eliminated;
  bool dead() const { return eliminated.empty(); }
};

struct EliminationTable {
  std::vector<EliminationRow> rows;
  std::vector<std::size_t> dead_outcomes;
  bool two_states = false;
  /// With two states any elimination identifies the other one.
  bool elimination_identifies = false;
};

/// Outcome e eliminates i when <e|rho_i|e> vanishes while some other state
/// has nonzero overlap. The basis must be orthonormal and completely product.
EliminationTable elimination_table(const StateSet& set, const std::vector<Ket>& product_basis);

std::vector<Ket> computational_basis(const TensorSpace& space);

/// Digits of a computational basis state ("012"), or empty for other kets.
std::string basis_label(const Ket& k);

struct CutNptStats {
  Bipartition cut;
  double fraction_npt = 0.0;
  double min_eigenvalue = 0.0;  // most negative over samples
  double max_eigenvalue = 0.0;  // least negative over samples
  double mean_eigenvalue = 0.0;
};

struct NptReport {
  int samples = 0;
  std::vector<CutNptStats> cuts;
  /// Fraction of samples that are NPT on every cut.
  double fraction_npt = 0.0;
  /// Cut with the smallest NPT fraction (ties: the largest max_eigenvalue).
  std::size_t worst_cut = 0;
};

/// Haar-random states of S tested for a negative partial transpose on every cut.
NptReport npt_probe(const Subspace& s, int samples, std::uint64_t seed);

}  // namespace entsplit

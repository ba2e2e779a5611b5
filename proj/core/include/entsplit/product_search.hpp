#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "entsplit/subspace.hpp"
#include "entsplit/tensor_core.hpp"

namespace entsplit {

struct SearchConfig {
  int restarts = 64;
  /// Sweeps per restart; one sweep updates every factor once.
  int max_iters = 500;
  double stall_tol = 1e-12;
  /// 1 - overlap at or below this: a product state was found.
  double product_tol = 1e-9;
  /// 1 - overlap at or above this: numerically entangled.
  double entangled_gap = 1e-6;
  std::uint64_t seed = 20250101;
  /// Consult the exact 2 x d pencil certificate for two-dimensional subspaces.
  bool use_certificate = true;

  /// Throws ContractViolation unless product_tol < entangled_gap and restarts >= 1.
  void validate() const;
};

enum class VerdictKind {
  ProductFound,
  NumericallyEntangled,
  CertifiedEntangled,
  CertifiedProduct,
  Inconclusive,
};

std::string_view to_string(VerdictKind kind);
bool is_entangled(VerdictKind kind);
bool contains_product(VerdictKind kind);

/// Which product states are searched: completely product across every party,
/// or product across one cut.
class SearchMode {
 public:
  static SearchMode all_parties() { return SearchMode(std::nullopt); }
  static SearchMode across(Bipartition cut) { return SearchMode(std::move(cut)); }

  bool is_all_parties() const { return !cut_.has_value(); }
  const std::optional<Bipartition>& cut() const { return cut_; }
  /// Party groups that are optimized as single factors.
  std::vector<std::vector<int>> groups(const TensorSpace& space) const;
  void check(const TensorSpace& space) const;

 private:
  explicit SearchMode(std::optional<Bipartition> cut) : cut_(std::move(cut)) {}
  std::optional<Bipartition> cut_;
};

/// A product state given by one normalized factor per party group.
struct ProductWitness {
  std::vector<std::vector<int>> groups;
  std::vector<Vector> factors;
  Ket ket;
};

struct ProductVerdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  std::optional<ProductWitness> witness;
  /// Best <phi|P|phi> over product states found (a lower bound on the maximum).
  double max_overlap = 0.0;
};

struct OverlapResult {
  double overlap = 0.0;
  ProductWitness witness;
  int restarts_run = 0;
};

/// Alternating maximization of <phi|P_S|phi> over product states. Each step
/// fixes all factors but one and replaces it with the top eigenvector of the
/// contracted local operator; restart k draws its start from derive_seed(seed, k).
/// Stops early once a restart reaches 1 - product_tol.
OverlapResult max_product_overlap(const Subspace& s, const SearchMode& mode, const SearchConfig& cfg);

/// Two-threshold verdict; for two-dimensional subspaces with a qubit side the
/// exact certificate overrides the numerical result.
ProductVerdict detect_product(const Subspace& s, const SearchMode& mode, const SearchConfig& cfg);

/// Exact test for a two-dimensional subspace of 2 (x) d. The 2 x 2 minors of the
/// pencil a*M1 + b*M2 are binary quadratics in (a : b); a product state exists
/// iff they share a projective root.
ProductVerdict certify_2xd_dim2(const Subspace& s);

/// Same certificate for an arbitrary cut whose smaller side has dimension 2.
/// Returns nullopt when the cut has no qubit side or dim S != 2.
std::optional<ProductVerdict> certify_dim2_across(const Subspace& s, const Bipartition& cut);

struct BiseparabilityReport {
  std::vector<std::pair<Bipartition, ProductVerdict>> cuts;
  /// Every cut reports an entangled verdict.
  bool genuinely_entangled = false;
  /// No cut found a product state but at least one was inconclusive.
  bool inconclusive = false;
  /// Index into `cuts` with the largest product overlap.
  std::size_t worst_cut = 0;
};

/// detect_product across each of the 2^{m-1} - 1 cuts of an m >= 3 party space.
BiseparabilityReport detect_biseparable(const Subspace& s, const SearchConfig& cfg);

namespace detail {

/// Flat index -> per-group local index tables.
struct BlockLayout {
  std::vector<std::vector<int>> groups;
  std::vector<Index> block_dims;
  std::vector<std::vector<Index>> local;  // [block][flat]

  BlockLayout(const TensorSpace& space, std::vector<std::vector<int>> party_groups);
  std::size_t blocks() const { return groups.size(); }
  Vector assemble(const std::vector<Vector>& factors) const;
};

/// d_b x k matrix whose column j is basis column j contracted against the
/// conjugates of every factor except block b.
Matrix contract_except(const BlockLayout& layout, const Matrix& basis,
                       const std::vector<Vector>& factors, std::size_t b);

struct AscentResult {
  double value = 0.0;
  std::vector<Vector> factors;
  int sweeps = 0;
};

/// A hermitian form sum_t weight_t * B_t B_t^dag given by weighted bases.
struct FormTerm {
  const Matrix* basis;
  double weight;
};

/// One restart of the alternating ascent of <phi|H|phi> over product states
/// from the given factors. Every factor update is an exact local eigenproblem,
/// so the objective never decreases; a decrease beyond round-off throws
/// std::logic_error. `trace`, when given, receives the objective after every
/// factor update.
AscentResult ascend(const BlockLayout& layout, const std::vector<FormTerm>& form,
                    std::vector<Vector> factors, const SearchConfig& cfg,
                    std::vector<double>* trace = nullptr);

std::vector<Vector> random_factors(const BlockLayout& layout, Rng& rng);

ProductWitness make_witness(const TensorSpace& space, const BlockLayout& layout,
                            std::vector<Vector> factors);

/// Gauss-Newton on the 2 x 2 minors of every block flattening of B c, with c
/// kept on the unit sphere. Starts from the given product state and returns
/// refined factors. Converges linearly even where S touches the product set
/// tangentially, where the ascent alone is sublinear.
std::vector<Vector> polish(const BlockLayout& layout, const Matrix& basis, std::vector<Vector> factors,
                           const SearchConfig& cfg);

}  // namespace detail

}  // namespace entsplit

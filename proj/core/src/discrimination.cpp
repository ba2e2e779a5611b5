#include "entsplit/discrimination.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "entsplit/errors.hpp"
#include "entsplit/tolerances.hpp"

namespace entsplit {

void MixedState::validate() const {
  if (!weights) return;
  const auto& w = *weights;
  if (static_cast<Index>(w.size()) != support.dim()) {
    throw ContractViolation("MixedState: " + std::to_string(w.size()) + " weights for a support of dimension " +
                            std::to_string(support.dim()));
  }
  double sum = 0.0;
  for (double x : w) {
    if (!(x > 0.0)) throw ContractViolation("MixedState: weights must be positive");
    sum += x;
  }
  if (std::abs(sum - 1.0) > tol::kProjector) throw ContractViolation("MixedState: weights must sum to 1");
}

Matrix MixedState::density() const {
  const Matrix& b = support.basis();
  if (!weights) return b * b.adjoint() / static_cast<double>(support.dim());
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights->data(), static_cast<Index>(weights->size()));
  return b * w.cast<cplx>().asDiagonal() * b.adjoint();
}

StateSet::StateSet(TensorSpace space, std::vector<MixedState> states, std::vector<std::string> labels,
                   bool min_rank_two)
    : space_(std::move(space)), states_(std::move(states)), labels_(std::move(labels)) {
  if (states_.empty()) throw ContractViolation("StateSet: no states");
  if (labels_.empty()) {
    for (std::size_t i = 0; i < states_.size(); ++i) labels_.push_back("rho" + std::to_string(i + 1));
  }
  if (labels_.size() != states_.size()) throw ContractViolation("StateSet: one label per state");
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const auto& s = states_[i];
    if (!(s.support.space() == space_)) throw DimensionError("StateSet: " + labels_[i] + " lives in another space");
    s.validate();
    if (min_rank_two && s.support.dim() < 2) {
      throw ContractViolation("StateSet: support of " + labels_[i] + " has dimension < 2");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const double cross = max_abs(states_[j].support.basis().adjoint() * s.support.basis());
      if (cross > tol::kProjector) {
        throw ContractViolation("StateSet: supports of " + labels_[j] + " and " + labels_[i] + " overlap");
      }
    }
  }
}

StateSet StateSet::from_splitting(const Splitting& sp) {
  std::vector<MixedState> states;
  for (const auto& s : sp.subspaces()) states.push_back(MixedState{s, std::nullopt});
  return StateSet(sp.space(), std::move(states), sp.labels());
}

bool StateSet::full_rank_sum() const {
  Index sum = 0;
  for (const auto& s : states_) sum += s.support.dim();
  return sum == space_.total_dim();
}

std::string_view to_string(Identifiability v) {
  switch (v) {
    case Identifiability::Identifiable: return "Identifiable";
    case Identifiability::NotIdentifiableCertified: return "NotIdentifiableCertified";
    case Identifiability::NotIdentifiableNumerical: return "NotIdentifiableNumerical";
    case Identifiability::Inconclusive: return "Inconclusive";
  }
  return "?";
}

bool is_not_identifiable(Identifiability v) {
  return v == Identifiability::NotIdentifiableCertified || v == Identifiability::NotIdentifiableNumerical;
}

namespace {

double other_overlap(const StateSet& set, std::size_t i, const Vector& phi) {
  double worst = 0.0;
  for (std::size_t j = 0; j < set.size(); ++j) {
    if (j != i) worst = std::max(worst, set[j].support.overlap(phi));
  }
  return worst;
}

// Fills the overlaps of a candidate witness and reports whether it qualifies.
bool accept_witness(const StateSet& set, std::size_t i, const ProductWitness& w, StateIdentifiability& out) {
  const Vector& phi = w.ket.amplitudes();
  out.own_overlap = set[i].support.overlap(phi);
  out.other_overlap = other_overlap(set, i, phi);
  return out.other_overlap <= tol::kZeroOverlap && out.own_overlap >= tol::kPositiveOverlap;
}

StateIdentifiability full_rank_witness(const StateSet& set, std::size_t i, const SearchConfig& cfg) {
  StateIdentifiability out;
  const ProductVerdict v = detect_product(set[i].support, SearchMode::all_parties(), cfg);
  out.max_overlap = v.max_overlap;
  switch (v.kind) {
    case VerdictKind::ProductFound:
    case VerdictKind::CertifiedProduct:
      if (accept_witness(set, i, *v.witness, out)) {
        out.verdict = Identifiability::Identifiable;
        out.witness = v.witness;
      }
      break;
    case VerdictKind::CertifiedEntangled: out.verdict = Identifiability::NotIdentifiableCertified; break;
    case VerdictKind::NumericallyEntangled: out.verdict = Identifiability::NotIdentifiableNumerical; break;
    case VerdictKind::Inconclusive: break;
  }
  return out;
}

// Maximizes <phi|Pi_i|phi> - mu * sum_{j != i} <phi|Pi_j|phi> over completely
// product states; a large mu pins the optimum to K_i.
StateIdentifiability partial_rank_witness(const StateSet& set, std::size_t i, const SearchConfig& cfg) {
  constexpr double kPenalty = 1e6;
  StateIdentifiability out;
  const TensorSpace& space = set.space();
  const SearchMode mode = SearchMode::all_parties();
  const detail::BlockLayout layout(space, mode.groups(space));
  std::vector<detail::FormTerm> form{{&set[i].support.basis(), 1.0}};
  for (std::size_t j = 0; j < set.size(); ++j) {
    if (j != i) form.push_back({&set[j].support.basis(), -kPenalty});
  }

  std::optional<ProductWitness> best;
  StateIdentifiability best_out;
  for (int k = 0; k < cfg.restarts; ++k) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(k)));
    auto run = detail::ascend(layout, form, detail::random_factors(layout, rng), cfg);
    ProductWitness w = detail::make_witness(space, layout, std::move(run.factors));
    StateIdentifiability trial;
    if (accept_witness(set, i, w, trial)) {
      best_out = trial;
      best = std::move(w);
      break;
    }
  }

  std::vector<Subspace> others;
  for (std::size_t j = 0; j < set.size(); ++j) {
    if (j != i) others.push_back(set[j].support);
  }
  const Subspace k_i = orthogonal_complement(space, others);
  if (best) {
    out = best_out;
    out.verdict = Identifiability::Identifiable;
    out.witness = std::move(best);
    out.max_overlap = k_i.overlap(out.witness->ket);
    return out;
  }
  // No witness: not identifiable only if K_i holds no product state at all.
  const OverlapResult r = max_product_overlap(k_i, mode, cfg);
  out.max_overlap = r.overlap;
  if (1.0 - r.overlap >= cfg.entangled_gap) out.verdict = Identifiability::NotIdentifiableNumerical;
  return out;
}

}  // namespace

StateIdentifiability identifiable_witness(const StateSet& set, std::size_t i, const SearchConfig& cfg) {
  if (i >= set.size()) {
    throw std::out_of_range("identifiable_witness: state index " + std::to_string(i) + " out of range");
  }
  cfg.validate();
  return set.full_rank_sum() ? full_rank_witness(set, i, cfg) : partial_rank_witness(set, i, cfg);
}

IdentifiabilityReport identifiability(const StateSet& set, const SearchConfig& cfg) {
  IdentifiabilityReport r;
  r.full_rank_sum = set.full_rank_sum();
  for (std::size_t i = 0; i < set.size(); ++i) r.states.push_back(identifiable_witness(set, i, cfg));
  return r;
}

Property1Report check_property1(const StateSet& set, const SearchConfig& cfg, bool genuine) {
  Property1Report r;
  r.genuine = genuine;
  if (genuine) {
    if (set.space().parties() < 3) throw ContractViolation("genuine Property 1 needs at least three parties");
    if (!set.full_rank_sum()) throw ContractViolation("genuine Property 1 needs supports filling the space");
    bool all = true, any_product = false;
    for (const auto& s : set.states()) {
      SubspaceVerdict v = check_subspace(s.support, EntanglementMode::GenuinelyEntangled, cfg);
      all = all && is_entangled(v.verdict.kind);
      any_product = any_product || contains_product(v.verdict.kind);
      r.cuts.push_back(std::move(v));
    }
    r.holds = all;
    r.inconclusive = !all && !any_product;
    r.identifiability.full_rank_sum = true;
    return r;
  }
  r.identifiability = identifiability(set, cfg);
  bool all = true, any_identifiable = false;
  for (const auto& s : r.identifiability.states) {
    all = all && is_not_identifiable(s.verdict);
    any_identifiable = any_identifiable || s.verdict == Identifiability::Identifiable;
  }
  r.holds = all;
  r.inconclusive = !all && !any_identifiable;
  return r;
}

SetClass classify_set(const StateSet& set, const SearchConfig& cfg) {
  SetClass c;
  c.identifiability = identifiability(set, cfg);
  bool all = true, any = false, unknown = false;
  for (const auto& s : c.identifiability.states) {
    const bool no = is_not_identifiable(s.verdict);
    all = all && no;
    any = any || no;
    unknown = unknown || s.verdict == Identifiability::Inconclusive;
  }
  c.in_S3 = all;
  c.in_S2 = any;
  c.inconclusive = unknown;
  if (c.in_S3 && !c.in_S2) throw ContractViolation("classify_set: S3 membership without S2");
  return c;
}

std::vector<Ket> computational_basis(const TensorSpace& space) {
  std::vector<Ket> out;
  for (Index f = 0; f < space.total_dim(); ++f) {
    Vector v = Vector::Zero(space.total_dim());
    v(f) = 1.0;
    out.emplace_back(space, std::move(v));
  }
  return out;
}

std::string basis_label(const Ket& k) {
  const Vector& a = k.amplitudes();
  Index hit = -1;
  for (Index f = 0; f < a.size(); ++f) {
    if (std::abs(a(f)) <= tol::kRepresentation) continue;
    if (hit >= 0 || std::abs(std::abs(a(f)) - 1.0) > tol::kRepresentation) return {};
    hit = f;
  }
  if (hit < 0) return {};
  std::string s;
  for (int l : k.space().labels(hit)) s += std::to_string(l);
  return s;
}

EliminationTable elimination_table(const StateSet& set, const std::vector<Ket>& product_basis) {
  const TensorSpace& space = set.space();
  const Index d = space.total_dim();
  if (static_cast<Index>(product_basis.size()) != d) {
    throw ContractViolation("elimination_table: basis has " + std::to_string(product_basis.size()) +
                            " elements, space dimension is " + std::to_string(d));
  }
  Matrix e(d, d);
  for (Index k = 0; k < d; ++k) {
    const Ket& ket = product_basis[static_cast<std::size_t>(k)];
    if (!(ket.space() == space)) throw ContractViolation("elimination_table: basis element from another space");
    for (int p = 0; p < space.parties() && space.parties() > 1; ++p) {
      if (second_schmidt(ket, Bipartition(space.parties(), {p})) > tol::kProductSchmidt) {
        throw ContractViolation("elimination_table: basis element " + std::to_string(k) + " is not product");
      }
    }
    e.col(k) = ket.amplitudes();
  }
  if (max_abs(e.adjoint() * e - Matrix::Identity(d, d)) > tol::kProjector) {
    throw ContractViolation("elimination_table: basis is not orthonormal");
  }

  EliminationTable t;
  t.two_states = set.size() == 2;
  for (Index k = 0; k < d; ++k) {
    const Ket& ket = product_basis[static_cast<std::size_t>(k)];
    EliminationRow row;
    row.outcome = basis_label(ket);
    if (row.outcome.empty()) row.outcome = "e" + std::to_string(k);
    for (const auto& s : set.states()) row.overlaps.push_back(s.support.overlap(ket));
    const bool any_positive = std::any_of(row.overlaps.begin(), row.overlaps.end(),
                                          [](double x) { return x > tol::kOutcomeProbability; });
    for (std::size_t i = 0; i < row.overlaps.size(); ++i) {
      if (row.overlaps[i] > tol::kOutcomeProbability) continue;
      // Some j != i is positive; row.overlaps[i] itself is not.
      if (any_positive) row.eliminated.push_back(i);
    }
    if (row.dead()) t.dead_outcomes.push_back(static_cast<std::size_t>(k));
    t.rows.push_back(std::move(row));
  }
  t.elimination_identifies = t.two_states && t.dead_outcomes.size() != t.rows.size();
  return t;
}

NptReport npt_probe(const Subspace& s, int samples, std::uint64_t seed) {
  if (s.dim() < 2) throw ContractViolation("npt_probe: subspace dimension must be at least 2");
  if (samples < 1) throw ContractViolation("npt_probe: samples must be >= 1");
  const TensorSpace& space = s.space();
  const std::vector<Bipartition> cuts = Bipartition::all(space.parties());

  NptReport r;
  r.samples = samples;
  std::vector<int> npt_count(cuts.size(), 0);
  std::vector<double> lo(cuts.size(), 1.0), hi(cuts.size(), -1.0), sum(cuts.size(), 0.0);
  int npt_all = 0;
  for (int n = 0; n < samples; ++n) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(n)));
    const Vector c = haar_state(s.dim(), rng);
    const Ket psi(space, s.basis() * c);
    const Operator rho = Operator::pure(psi);
    bool every = true;
    for (std::size_t k = 0; k < cuts.size(); ++k) {
      const double ev = min_eigenvalue(partial_transpose(rho, cuts[k]));
      const bool npt = ev < -tol::kNegativeEigenvalue;
      npt_count[k] += npt ? 1 : 0;
      every = every && npt;
      lo[k] = std::min(lo[k], ev);
      hi[k] = std::max(hi[k], ev);
      sum[k] += ev;
    }
    npt_all += every ? 1 : 0;
  }
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    r.cuts.push_back({cuts[k], static_cast<double>(npt_count[k]) / samples, lo[k], hi[k], sum[k] / samples});
  }
  r.fraction_npt = static_cast<double>(npt_all) / samples;
  for (std::size_t k = 1; k < r.cuts.size(); ++k) {
    const auto& a = r.cuts[k];
    const auto& b = r.cuts[r.worst_cut];
    if (a.fraction_npt < b.fraction_npt || (a.fraction_npt == b.fraction_npt && a.max_eigenvalue > b.max_eigenvalue)) {
      r.worst_cut = k;
    }
  }
  return r;
}

}  // namespace entsplit

#include "entsplit/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "entsplit/errors.hpp"
#include "entsplit/tolerances.hpp"

namespace entsplit {

ProjectiveMeasurement ProjectiveMeasurement::from_splitting(Splitting sp) {
  const SplittingCheck c = verify_splitting(sp);
  if (!c.valid()) {
    throw ContractViolation(std::string("measurement needs a valid splitting:") + (c.orthogonal ? "" : " not orthogonal") +
                            (c.complete ? "" : " not complete") + (c.min_rank_ok ? "" : " rank below 2"));
  }
  return ProjectiveMeasurement(std::move(sp));
}

std::vector<double> ProjectiveMeasurement::probabilities(const Ket& psi) const {
  if (!(psi.space() == space())) throw DimensionError("measurement: input from another space");
  if (!psi.is_normalized()) throw NormalizationError("measurement: input not normalized");
  std::vector<double> p;
  for (const auto& s : splitting_.subspaces()) p.push_back(s.overlap(psi));
  return p;
}

double OutcomeRecord::min_schmidt2() const {
  double v = 1.0;
  for (const auto& [cut, s] : schmidt2) v = std::min(v, s);
  return v;
}

double OutcomeRecord::max_schmidt2() const {
  double v = 0.0;
  for (const auto& [cut, s] : schmidt2) v = std::max(v, s);
  return v;
}

namespace {

OutcomeRecord collapse(const ProjectiveMeasurement& m, const Ket& psi, std::size_t outcome, double p) {
  const Subspace& s = m.splitting()[outcome];
  Vector post = s.basis() * (s.basis().adjoint() * psi.amplitudes());
  post /= std::sqrt(p);
  Ket k(m.space(), std::move(post));
  k = k.normalized();  // absorbs round-off in p
  OutcomeRecord r{outcome, p, k, {}};
  if (m.space().parties() > 1) {
    for (auto& cut : Bipartition::all(m.space().parties())) {
      const double s2 = second_schmidt(r.post_state, cut);
      r.schmidt2.emplace_back(std::move(cut), s2);
    }
  }
  return r;
}

}  // namespace

OutcomeRecord measure(const ProjectiveMeasurement& m, const Ket& psi, Rng& rng) {
  const std::vector<double> p = m.probabilities(psi);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng) * std::accumulate(p.begin(), p.end(), 0.0);
  double acc = 0.0;
  std::size_t pick = p.size() - 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (x < acc && p[i] > tol::kZeroProbability) {
      pick = i;
      break;
    }
  }
  while (p[pick] <= tol::kZeroProbability && pick > 0) --pick;
  return collapse(m, psi, pick, p[pick]);
}

OutcomeRecord measure(const ProjectiveMeasurement& m, const Ket& psi, std::size_t outcome) {
  if (outcome >= m.outcomes()) throw std::out_of_range("measure: outcome index out of range");
  const double p = m.probabilities(psi)[outcome];
  if (p <= tol::kZeroProbability) {
    throw ZeroProbabilityError("measure: outcome " + std::to_string(outcome) + " has probability " + std::to_string(p));
  }
  return collapse(m, psi, outcome, p);
}

std::vector<Ket> sample_product_states(const TensorSpace& space, int n, std::uint64_t seed) {
  if (n < 1) throw ContractViolation("sample_product_states: n must be >= 1");
  std::vector<Ket> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    std::vector<Vector> factors;
    for (int d : space.dims()) factors.push_back(haar_state(d, rng));
    out.push_back(product_ket(space, factors));
  }
  return out;
}

std::string_view to_string(Property2Mode mode) {
  switch (mode) {
    case Property2Mode::Bipartite: return "bipartite";
    case Property2Mode::CompletelyProduct: return "ces";
    case Property2Mode::Genuine: return "ges";
  }
  return "?";
}

double entanglement_metric(const Ket& psi, Property2Mode mode) {
  const int m = psi.space().parties();
  if (mode == Property2Mode::Bipartite) return second_schmidt(psi, Bipartition::first_party(m));
  double lo = 1.0, hi = 0.0;
  for (const auto& cut : Bipartition::all(m)) {
    const double s2 = second_schmidt(psi, cut);
    lo = std::min(lo, s2);
    hi = std::max(hi, s2);
  }
  return mode == Property2Mode::Genuine ? lo : hi;
}

Property2Report certify_property2(const ProjectiveMeasurement& m, const Property2Config& cfg, Property2Mode mode) {
  const TensorSpace& space = m.space();
  const int parties = space.parties();
  if (mode == Property2Mode::Bipartite && parties != 2) {
    throw ContractViolation("bipartite Property 2 needs two parties, got " + space.to_string());
  }
  if (mode != Property2Mode::Bipartite && parties < 3) {
    throw ContractViolation(std::string(to_string(mode)) + " Property 2 needs at least three parties");
  }
  if (cfg.samples < 1) throw ContractViolation("certify_property2: samples must be >= 1");

  Property2Report r;
  r.mode = mode;
  const EntanglementMode structural_mode = mode == Property2Mode::Bipartite ? EntanglementMode::Bipartite
                                           : mode == Property2Mode::Genuine ? EntanglementMode::GenuinelyEntangled
                                                                            : EntanglementMode::CompletelyEntangled;
  r.structural = verify_entangled_splitting(m.splitting(), cfg.search, structural_mode);
  r.holds = r.structural.all_entangled;
  r.inconclusive = r.structural.inconclusive;

  // Inputs: computational basis first, then random product states.
  const Index d = space.total_dim();
  const int basis_inputs = static_cast<int>(std::min<Index>(d, cfg.samples));
  const int random_inputs = cfg.samples - basis_inputs;
  std::vector<Ket> inputs;
  for (Index f = 0; f < basis_inputs; ++f) {
    Vector v = Vector::Zero(d);
    v(f) = 1.0;
    inputs.emplace_back(space, std::move(v));
  }
  if (random_inputs > 0) {
    auto extra = sample_product_states(space, random_inputs, cfg.seed);
    inputs.insert(inputs.end(), std::make_move_iterator(extra.begin()), std::make_move_iterator(extra.end()));
  }

  SampleReport& e = r.empirical;
  e.samples = cfg.samples;
  e.counts.assign(m.outcomes(), 0);
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    const auto p = m.probabilities(inputs[n]);
    double total = 0.0;
    for (double x : p) total += x;
    e.max_born_deviation = std::max(e.max_born_deviation, std::abs(total - 1.0));
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] <= tol::kOutcomeProbability) continue;
      ++e.counts[i];
      const OutcomeRecord rec = measure(m, inputs[n], i);
      const double metric = entanglement_metric(rec.post_state, mode);
      e.min_metric = std::min(e.min_metric, metric);
      if (metric <= tol::kEntangledSchmidt) ++e.weak_posts;
      if (metric <= tol::kProductSchmidt && !e.counterexample) {
        e.counterexample = Counterexample{n, inputs[n], i, rec.post_state, metric};
      }
    }
  }
  if (e.counterexample && r.holds) {
    throw ContractViolation("certify_property2: product post-state from a splitting verified entangled");
  }
  return r;
}

}  // namespace entsplit

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "entsplit/product_search.hpp"
#include "entsplit/splitting.hpp"
#include "entsplit/tensor_core.hpp"

namespace entsplit {

/// Projective measurement {Pi_i} induced by a splitting; every rank >= 2.
class ProjectiveMeasurement {
 public:
  /// Throws ContractViolation unless the splitting is valid.
  static ProjectiveMeasurement from_splitting(Splitting sp);

  const TensorSpace& space() const { return splitting_.space(); }
  const Splitting& splitting() const { return splitting_; }
  std::size_t outcomes() const { return splitting_.size(); }
  Profile ranks() const { return splitting_.profile(); }
  Matrix projector(std::size_t i) const { return splitting_[i].projector(); }

  /// Born probabilities <psi|Pi_i|psi>.
  std::vector<double> probabilities(const Ket& psi) const;

 private:
  explicit ProjectiveMeasurement(Splitting sp) : splitting_(std::move(sp)) {}
  Splitting splitting_;
};

struct OutcomeRecord {
  std::size_t outcome = 0;
  double probability = 0.0;
  Ket post_state;
  /// Second Schmidt coefficient of the post-state on every cut.
  std::vector<std::pair<Bipartition, double>> schmidt2;
  double min_schmidt2() const;
  double max_schmidt2() const;
};

/// Samples an outcome with Born probabilities.
OutcomeRecord measure(const ProjectiveMeasurement& m, const Ket& psi, Rng& rng);
/// Forces the outcome; throws ZeroProbabilityError if its probability is at most 1e-12.
OutcomeRecord measure(const ProjectiveMeasurement& m, const Ket& psi, std::size_t outcome);

/// n product states with Haar-random local factors; sample k uses derive_seed(seed, k).
std::vector<Ket> sample_product_states(const TensorSpace& space, int n, std::uint64_t seed);

enum class Property2Mode {
  Bipartite,         // post-states entangled across the single cut
  CompletelyProduct, // post-states never completely product
  Genuine,           // post-states entangled across every cut
};

std::string_view to_string(Property2Mode mode);

struct Property2Config {
  SearchConfig search;
  int samples = 1000;
  std::uint64_t seed = 20250101;
};

struct Counterexample {
  std::size_t sample = 0;
  Ket input;
  std::size_t outcome = 0;
  Ket post_state;
  double metric = 0.0;
};

struct SampleReport {
  int samples = 0;
  std::vector<int> counts;  // outcomes with p > 1e-9, per outcome
  /// Smallest entanglement metric over all recorded post-states.
  double min_metric = 1.0;
  /// Post-states whose metric does not exceed 1e-6.
  int weak_posts = 0;
  std::optional<Counterexample> counterexample;
  double max_born_deviation = 0.0;
};

struct Property2Report {
  Property2Mode mode = Property2Mode::Bipartite;
  EntangledSplittingReport structural;
  bool holds = false;
  bool inconclusive = false;
  SampleReport empirical;
};

/// Post-state entanglement in the given sense: the second Schmidt coefficient
/// across the cut (bipartite), its maximum over cuts (completely product) or
/// its minimum over cuts (genuine).
double entanglement_metric(const Ket& psi, Property2Mode mode);

/// Structural check of every projector's range plus an empirical sweep over
/// the computational basis and then random product inputs, cfg.samples in
/// total. A counterexample alongside a positive structural verdict throws
/// ContractViolation.
Property2Report certify_property2(const ProjectiveMeasurement& m, const Property2Config& cfg, Property2Mode mode);

}  // namespace entsplit

#pragma once

#include <stdexcept>
#include <string>

namespace entsplit {

/// Index or shape outside the tensor-product structure.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NormalizationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Spanning vectors are linearly dependent at the rank tolerance.
class RankDeficiencyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller broke an operation's documented precondition
/// (non-hermitian input, wrong party count, empty subspace, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Input is well-formed but the requested construction does not apply,
/// e.g. an odd local dimension for the Bell pairing generator.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ZeroProbabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace entsplit

#pragma once

#include <span>
#include <vector>

#include "entsplit/tensor_core.hpp"

namespace entsplit {

/// An orthonormal basis (stored as the columns of a D x k matrix) of a
/// subspace of a TensorSpace, with the projector it induces.
class Subspace {
 public:
  /// Columns must be orthonormal: Gram matrix within 1e-10 of the identity.
  Subspace(TensorSpace space, Matrix basis);

  const TensorSpace& space() const { return space_; }
  const Matrix& basis() const { return basis_; }
  Index dim() const { return basis_.cols(); }
  Ket basis_ket(Index k) const;

  Matrix projector() const;
  /// <v|P|v>.
  double overlap(const Vector& v) const;
  double overlap(const Ket& v) const { return overlap(v.amplitudes()); }

  /// Image under a unitary U. Orthonormality is re-checked.
  Subspace transformed(const Operator& u) const;

 private:
  TensorSpace space_;
  Matrix basis_;
};

/// Gram-Schmidt with a second re-orthogonalization pass. A vector whose
/// residual norm falls below 1e-10 of its original norm raises RankDeficiencyError.
Subspace orthonormalize(const TensorSpace& space, std::span<const Ket> raw);
Subspace orthonormalize(const TensorSpace& space, const Matrix& columns);

/// Orthogonal complement of the span of all given subspaces.
Subspace orthogonal_complement(const TensorSpace& space, std::span<const Subspace> parts);

}  // namespace entsplit

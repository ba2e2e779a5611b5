#include "entsplit/subspace.hpp"

#include "entsplit/errors.hpp"
#include "entsplit/tolerances.hpp"

namespace entsplit {

Subspace::Subspace(TensorSpace space, Matrix basis) : space_(std::move(space)), basis_(std::move(basis)) {
  if (basis_.rows() != space_.total_dim()) {
    throw DimensionError("Subspace: basis vectors have length " + std::to_string(basis_.rows()) +
                         ", space " + space_.to_string() + " needs " +
                         std::to_string(space_.total_dim()));
  }
  const Matrix gram = basis_.adjoint() * basis_;
  if (max_abs(gram - Matrix::Identity(dim(), dim())) > tol::kSpectral) {
    throw ContractViolation("Subspace: basis is not orthonormal");
  }
}

Ket Subspace::basis_ket(Index k) const { return Ket(space_, basis_.col(k)); }

Matrix Subspace::projector() const { return basis_ * basis_.adjoint(); }

double Subspace::overlap(const Vector& v) const { return (basis_.adjoint() * v).squaredNorm(); }

Subspace Subspace::transformed(const Operator& u) const {
  if (!(u.space() == space_)) throw DimensionError("Subspace::transformed: space mismatch");
  return Subspace(space_, u.matrix() * basis_);
}

Subspace orthonormalize(const TensorSpace& space, const Matrix& columns) {
  if (columns.rows() != space.total_dim()) {
    throw DimensionError("orthonormalize: vectors of length " + std::to_string(columns.rows()) +
                         " for space " + space.to_string());
  }
  if (columns.cols() == 0) throw ContractViolation("orthonormalize: no vectors");
  Matrix q(columns.rows(), columns.cols());
  for (Index k = 0; k < columns.cols(); ++k) {
    Vector v = columns.col(k);
    const double original = v.norm();
    if (original <= tol::kRank) {
      throw RankDeficiencyError("orthonormalize: vector " + std::to_string(k + 1) + " is zero");
    }
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < k; ++j) v -= q.col(j) * q.col(j).dot(v);
    }
    const double residual = v.norm();
    if (residual <= tol::kRank * original) {
      throw RankDeficiencyError("orthonormalize: vector " + std::to_string(k + 1) +
                                " is linearly dependent on the preceding ones");
    }
    q.col(k) = v / residual;
  }
  return Subspace(space, std::move(q));
}

Subspace orthonormalize(const TensorSpace& space, std::span<const Ket> raw) {
  Matrix columns(space.total_dim(), static_cast<Index>(raw.size()));
  for (std::size_t k = 0; k < raw.size(); ++k) {
    if (!(raw[k].space() == space)) throw DimensionError("orthonormalize: Ket from a different space");
    columns.col(static_cast<Index>(k)) = raw[k].amplitudes();
  }
  return orthonormalize(space, columns);
}

Subspace orthogonal_complement(const TensorSpace& space, std::span<const Subspace> parts) {
  const Index d = space.total_dim();
  Matrix p = Matrix::Zero(d, d);
  for (const auto& s : parts) p += s.projector();
  p = (0.5 * (p + p.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(p);
  std::vector<Index> keep;
  for (Index i = 0; i < d; ++i) {
    if (es.eigenvalues()(i) < 0.5) keep.push_back(i);
  }
  Matrix basis(d, static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) basis.col(static_cast<Index>(k)) = es.eigenvectors().col(keep[k]);
  return Subspace(space, std::move(basis));
}

}  // namespace entsplit

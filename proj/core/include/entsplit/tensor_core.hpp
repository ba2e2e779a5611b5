#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace entsplit {

using cplx = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using Index = Eigen::Index;
using Rng = std::mt19937_64;

/// C^{d_1} (x) ... (x) C^{d_m}. Flat indices are row-major over party order,
/// so party 0 is the most significant digit: |i j> in 2 (x) 3 sits at 3*i + j.
class TensorSpace {
 public:
  explicit TensorSpace(std::vector<int> dims);

  const std::vector<int>& dims() const { return dims_; }
  int parties() const { return static_cast<int>(dims_.size()); }
  int dim(int party) const { return dims_.at(static_cast<std::size_t>(party)); }
  Index total_dim() const { return total_; }
  bool is_bipartite() const { return dims_.size() == 2; }

  Index flat_index(std::span<const int> labels) const;
  std::vector<int> labels(Index flat) const;

  /// "2x3", "2x2x2x2".
  std::string to_string() const;

  bool operator==(const TensorSpace& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  Index total_ = 1;
};

/// A pure state, possibly unnormalized.
class Ket {
 public:
  Ket(TensorSpace space, Vector amplitudes);

  const TensorSpace& space() const { return space_; }
  const Vector& amplitudes() const { return amplitudes_; }
  double norm() const { return amplitudes_.norm(); }
  bool is_normalized() const;
  /// Throws NormalizationError for the zero vector.
  Ket normalized() const;

 private:
  TensorSpace space_;
  Vector amplitudes_;
};

class Operator {
 public:
  /// When `hermitian` is set the matrix is checked entrywise against its adjoint.
  Operator(TensorSpace space, Matrix matrix, bool hermitian);

  static Operator identity(const TensorSpace& space);
  /// |psi><psi| for a normalized psi.
  static Operator pure(const Ket& psi);

  const TensorSpace& space() const { return space_; }
  const Matrix& matrix() const { return matrix_; }
  bool hermitian() const { return hermitian_; }

 private:
  TensorSpace space_;
  Matrix matrix_;
  bool hermitian_;
};

/// A split of the parties into two non-empty groups. Stored canonically with
/// party 0 on the left. Party indices are zero-based.
class Bipartition {
 public:
  Bipartition(int parties, std::vector<int> left);

  /// All 2^{m-1} - 1 distinct cuts of m parties, ordered by the bitmask of the
  /// right-hand side.
  static std::vector<Bipartition> all(int parties);
  /// {0}|{1} for a bipartite space.
  static Bipartition first_party(int parties);

  int parties() const { return parties_; }
  const std::vector<int>& left() const { return left_; }
  const std::vector<int>& right() const { return right_; }
  bool on_left(int party) const;

  Index left_dim(const TensorSpace& space) const;
  Index right_dim(const TensorSpace& space) const;
  void check(const TensorSpace& space) const;

  /// One-based, e.g. "{1}|{2,3}".
  std::string to_string() const;

  bool operator==(const Bipartition& other) const = default;

 private:
  int parties_;
  std::vector<int> left_;
  std::vector<int> right_;
};

Ket ket_from_labels(const TensorSpace& space, std::span<const int> labels);
Ket ket_from_labels(const TensorSpace& space, std::initializer_list<int> labels);

/// Tensor product of per-party factors, in party order.
Ket product_ket(const TensorSpace& space, std::span<const Vector> factors);

/// Amplitudes reshaped to a left_dim x right_dim matrix along the cut.
Matrix cut_matrix(const TensorSpace& space, const Vector& amplitudes, const Bipartition& cut);

/// Non-increasing singular values of the cut reshape. Requires a normalized Ket.
std::vector<double> schmidt_coefficients(const Ket& psi, const Bipartition& cut);

/// Second Schmidt coefficient (0 for product states) of a normalized Ket.
double second_schmidt(const Ket& psi, const Bipartition& cut);

/// Transposes the indices of the parties on the right side of the cut.
Operator partial_transpose(const Operator& rho, const Bipartition& cut);

double min_eigenvalue(const Operator& op);

/// Counter-based seed derivation: independent streams for (master, k) pairs.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter);

/// Haar-random unit vector in C^d.
Vector haar_state(Index d, Rng& rng);
/// Haar-random d x d unitary (QR of a Ginibre matrix with phase fix).
Matrix haar_unitary(Index d, Rng& rng);

Matrix kron(const Matrix& a, const Matrix& b);

/// U_1 (x) ... (x) U_m with each U_i Haar on d_i. Deterministic in seed.
Operator random_local_unitary(const TensorSpace& space, std::uint64_t seed);

/// Largest entry magnitude.
double max_abs(const Matrix& m);

}  // namespace entsplit

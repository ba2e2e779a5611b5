#include "entsplit/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "entsplit/errors.hpp"
#include "entsplit/tolerances.hpp"

namespace entsplit {

namespace {

std::vector<Index> party_strides(const TensorSpace& space) {
  std::vector<Index> strides(static_cast<std::size_t>(space.parties()), 1);
  for (int p = space.parties() - 2; p >= 0; --p) {
    strides[static_cast<std::size_t>(p)] =
        strides[static_cast<std::size_t>(p) + 1] * space.dim(p + 1);
  }
  return strides;
}

// Row/column coordinates of every flat index for a given cut.
struct CutLayout {
  std::vector<Index> row;
  std::vector<Index> col;
  Index rows = 1;
  Index cols = 1;
};

CutLayout cut_layout(const TensorSpace& space, const Bipartition& cut) {
  CutLayout layout;
  const auto strides = party_strides(space);
  const Index d = space.total_dim();
  layout.row.assign(static_cast<std::size_t>(d), 0);
  layout.col.assign(static_cast<std::size_t>(d), 0);
  layout.rows = cut.left_dim(space);
  layout.cols = cut.right_dim(space);
  for (Index f = 0; f < d; ++f) {
    Index r = 0;
    Index c = 0;
    for (int p = 0; p < space.parties(); ++p) {
      const Index label = (f / strides[static_cast<std::size_t>(p)]) % space.dim(p);
      if (cut.on_left(p)) {
        r = r * space.dim(p) + label;
      } else {
        c = c * space.dim(p) + label;
      }
    }
    layout.row[static_cast<std::size_t>(f)] = r;
    layout.col[static_cast<std::size_t>(f)] = c;
  }
  return layout;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

// ---------------------------------------------------------------------------
// TensorSpace

TensorSpace::TensorSpace(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DimensionError("TensorSpace: no parties");
  for (int d : dims_) {
    if (d < 2) throw DimensionError("TensorSpace: local dimension " + std::to_string(d) + " < 2");
    total_ *= d;
  }
}

Index TensorSpace::flat_index(std::span<const int> labels) const {
  if (labels.size() != dims_.size()) {
    throw DimensionError("flat_index: expected " + std::to_string(dims_.size()) + " labels, got " +
                         std::to_string(labels.size()));
  }
  Index flat = 0;
  for (std::size_t p = 0; p < dims_.size(); ++p) {
    if (labels[p] < 0 || labels[p] >= dims_[p]) {
      throw DimensionError("label " + std::to_string(labels[p]) + " out of range for party " +
                           std::to_string(p + 1) + " of dimension " + std::to_string(dims_[p]));
    }
    flat = flat * dims_[p] + labels[p];
  }
  return flat;
}

std::vector<int> TensorSpace::labels(Index flat) const {
  if (flat < 0 || flat >= total_) throw DimensionError("flat index out of range");
  std::vector<int> out(dims_.size());
  for (std::size_t p = dims_.size(); p-- > 0;) {
    out[p] = static_cast<int>(flat % dims_[p]);
    flat /= dims_[p];
  }
  return out;
}

std::string TensorSpace::to_string() const {
  std::ostringstream os;
  for (std::size_t p = 0; p < dims_.size(); ++p) {
    if (p) os << 'x';
    os << dims_[p];
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Ket / Operator

Ket::Ket(TensorSpace space, Vector amplitudes)
    : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != space_.total_dim()) {
    throw DimensionError("Ket: " + std::to_string(amplitudes_.size()) + " amplitudes for space " +
                         space_.to_string());
  }
}

bool Ket::is_normalized() const {
  return std::abs(amplitudes_.squaredNorm() - 1.0) <= tol::kRepresentation;
}

Ket Ket::normalized() const {
  const double n = norm();
  if (n <= tol::kRepresentation) throw NormalizationError("cannot normalize the zero vector");
  return Ket(space_, amplitudes_ / n);
}

Operator::Operator(TensorSpace space, Matrix matrix, bool hermitian)
    : space_(std::move(space)), matrix_(std::move(matrix)), hermitian_(hermitian) {
  const Index d = space_.total_dim();
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw DimensionError("Operator: matrix shape does not match space " + space_.to_string());
  }
  if (hermitian_ && max_abs(matrix_ - matrix_.adjoint()) > tol::kRepresentation) {
    throw ContractViolation("Operator: matrix flagged hermitian is not");
  }
}

Operator Operator::identity(const TensorSpace& space) {
  return Operator(space, Matrix::Identity(space.total_dim(), space.total_dim()), true);
}

Operator Operator::pure(const Ket& psi) {
  if (!psi.is_normalized()) throw NormalizationError("Operator::pure: unnormalized Ket");
  Matrix m = psi.amplitudes() * psi.amplitudes().adjoint();
  // Exact hermiticity; the outer product is only hermitian up to round-off.
  m = (0.5 * (m + m.adjoint())).eval();
  return Operator(psi.space(), std::move(m), true);
}

// ---------------------------------------------------------------------------
// Bipartition

Bipartition::Bipartition(int parties, std::vector<int> left) : parties_(parties) {
  if (parties < 2) throw ContractViolation("Bipartition: need at least two parties");
  std::sort(left.begin(), left.end());
  left.erase(std::unique(left.begin(), left.end()), left.end());
  for (int p : left) {
    if (p < 0 || p >= parties) throw ContractViolation("Bipartition: party index out of range");
  }
  if (left.empty() || static_cast<int>(left.size()) == parties) {
    throw ContractViolation("Bipartition: left side must be a non-empty proper subset");
  }
  std::vector<int> right;
  for (int p = 0; p < parties; ++p) {
    if (!std::binary_search(left.begin(), left.end(), p)) right.push_back(p);
  }
  if (left.front() != 0) std::swap(left, right);
  left_ = std::move(left);
  right_ = std::move(right);
}

std::vector<Bipartition> Bipartition::all(int parties) {
  if (parties < 2) throw ContractViolation("Bipartition::all: need at least two parties");
  std::vector<Bipartition> cuts;
  const unsigned count = 1u << (parties - 1);
  // The right side is a non-empty subset of parties 1..m-1.
  for (unsigned mask = 1; mask < count; ++mask) {
    std::vector<int> left;
    for (int p = 0; p < parties; ++p) {
      const bool right = p > 0 && ((mask >> (p - 1)) & 1u);
      if (!right) left.push_back(p);
    }
    cuts.emplace_back(parties, std::move(left));
  }
  return cuts;
}

Bipartition Bipartition::first_party(int parties) { return Bipartition(parties, {0}); }

bool Bipartition::on_left(int party) const {
  return std::binary_search(left_.begin(), left_.end(), party);
}

Index Bipartition::left_dim(const TensorSpace& space) const {
  Index d = 1;
  for (int p : left_) d *= space.dim(p);
  return d;
}

Index Bipartition::right_dim(const TensorSpace& space) const {
  Index d = 1;
  for (int p : right_) d *= space.dim(p);
  return d;
}

void Bipartition::check(const TensorSpace& space) const {
  if (space.parties() != parties_) {
    throw ContractViolation("cut " + to_string() + " does not match space " + space.to_string());
  }
}

std::string Bipartition::to_string() const {
  std::ostringstream os;
  auto side = [&os](const std::vector<int>& s) {
    os << '{';
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i] + 1;
    os << '}';
  };
  side(left_);
  os << '|';
  side(right_);
  return os.str();
}

// ---------------------------------------------------------------------------
// States and spectra

Ket ket_from_labels(const TensorSpace& space, std::span<const int> labels) {
  Vector v = Vector::Zero(space.total_dim());
  v(space.flat_index(labels)) = 1.0;
  return Ket(space, std::move(v));
}

Ket ket_from_labels(const TensorSpace& space, std::initializer_list<int> labels) {
  return ket_from_labels(space, std::span<const int>(labels.begin(), labels.size()));
}

Ket product_ket(const TensorSpace& space, std::span<const Vector> factors) {
  if (static_cast<int>(factors.size()) != space.parties()) {
    throw DimensionError("product_ket: one factor per party required");
  }
  Vector v = Vector::Ones(1);
  for (int p = 0; p < space.parties(); ++p) {
    const Vector& f = factors[static_cast<std::size_t>(p)];
    if (f.size() != space.dim(p)) throw DimensionError("product_ket: factor dimension mismatch");
    Vector next(v.size() * f.size());
    for (Index i = 0; i < v.size(); ++i) next.segment(i * f.size(), f.size()) = v(i) * f;
    v = std::move(next);
  }
  return Ket(space, std::move(v));
}

Matrix cut_matrix(const TensorSpace& space, const Vector& amplitudes, const Bipartition& cut) {
  cut.check(space);
  const CutLayout layout = cut_layout(space, cut);
  Matrix m(layout.rows, layout.cols);
  for (Index f = 0; f < space.total_dim(); ++f) {
    m(layout.row[static_cast<std::size_t>(f)], layout.col[static_cast<std::size_t>(f)]) = amplitudes(f);
  }
  return m;
}

std::vector<double> schmidt_coefficients(const Ket& psi, const Bipartition& cut) {
  if (!psi.is_normalized()) throw NormalizationError("schmidt_coefficients: unnormalized Ket");
  const Matrix m = cut_matrix(psi.space(), psi.amplitudes(), cut);
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

double second_schmidt(const Ket& psi, const Bipartition& cut) {
  const auto s = schmidt_coefficients(psi, cut);
  return s.size() > 1 ? s[1] : 0.0;
}

Operator partial_transpose(const Operator& rho, const Bipartition& cut) {
  if (!rho.hermitian()) throw ContractViolation("partial_transpose: input not flagged hermitian");
  const TensorSpace& space = rho.space();
  cut.check(space);
  const CutLayout layout = cut_layout(space, cut);
  const Index d = space.total_dim();
  // Inverse map (row, col) -> flat.
  std::vector<Index> flat_of(static_cast<std::size_t>(d));
  for (Index f = 0; f < d; ++f) {
    flat_of[static_cast<std::size_t>(layout.row[static_cast<std::size_t>(f)] * layout.cols +
                                     layout.col[static_cast<std::size_t>(f)])] = f;
  }
  const Matrix& in = rho.matrix();
  Matrix out(d, d);
  for (Index r = 0; r < d; ++r) {
    const Index rl = layout.row[static_cast<std::size_t>(r)];
    const Index rr = layout.col[static_cast<std::size_t>(r)];
    for (Index c = 0; c < d; ++c) {
      const Index cl = layout.row[static_cast<std::size_t>(c)];
      const Index cr = layout.col[static_cast<std::size_t>(c)];
      const Index r2 = flat_of[static_cast<std::size_t>(rl * layout.cols + cr)];
      const Index c2 = flat_of[static_cast<std::size_t>(cl * layout.cols + rr)];
      out(r2, c2) = in(r, c);
    }
  }
  return Operator(space, std::move(out), true);
}

double min_eigenvalue(const Operator& op) {
  if (!op.hermitian()) throw ContractViolation("min_eigenvalue: input not flagged hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(op.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// ---------------------------------------------------------------------------
// Randomness

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
  return splitmix64(splitmix64(master) ^ splitmix64(counter ^ 0xd1b54a32d192ed03ULL));
}

Vector haar_state(Index d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = cplx(normal(rng), normal(rng));
  return v / v.norm();
}

Matrix haar_unitary(Index d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(d, d);
  for (Index c = 0; c < d; ++c) {
    for (Index r = 0; r < d; ++r) z(r, c) = cplx(normal(rng), normal(rng)) / std::sqrt(2.0);
  }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < d; ++i) {
    const double a = std::abs(r(i, i));
    if (a > 0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Operator random_local_unitary(const TensorSpace& space, std::uint64_t seed) {
  Rng rng(seed);
  Matrix u = Matrix::Identity(1, 1);
  for (int p = 0; p < space.parties(); ++p) u = kron(u, haar_unitary(space.dim(p), rng));
  return Operator(space, std::move(u), false);
}

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace entsplit

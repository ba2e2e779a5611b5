#pragma once

// Independent oracles and hand-rolled generators shared by the test binaries.
// Oracles deliberately avoid the library's own reshaping and contraction code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "entsplit/entsplit.hpp"

namespace testing {

using entsplit::cplx;
using entsplit::Index;
using entsplit::Matrix;
using entsplit::Vector;

inline double inv_sqrt2() { return 1.0 / std::numbers::sqrt2; }

// ---------------------------------------------------------------------------
// Generators

inline cplx gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  return {re, n(rng)};
}

inline Vector random_unit(Index d, std::mt19937_64& rng) {
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = gaussian(rng);
  return v / v.norm();
}

// Columns of a Ginibre matrix orthonormalized by Householder QR: Haar-distributed span.
inline Matrix random_orthonormal(Index d, Index k, std::mt19937_64& rng) {
  Matrix g(d, k);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < d; ++i) g(i, j) = gaussian(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(d, k);
}

inline entsplit::Subspace random_subspace(const entsplit::TensorSpace& s, Index k, std::mt19937_64& rng) {
  return entsplit::Subspace(s, random_orthonormal(s.total_dim(), k, rng));
}

// Plain nested-loop Kronecker product of local factors, party 0 most significant.
inline Vector kron_factors(const std::vector<Vector>& f) {
  Vector out = Vector::Ones(1);
  for (const auto& v : f) {
    Vector next(out.size() * v.size());
    for (Index i = 0; i < out.size(); ++i) {
      for (Index j = 0; j < v.size(); ++j) next(i * v.size() + j) = out(i) * v(j);
    }
    out = next;
  }
  return out;
}

inline Vector random_product(const entsplit::TensorSpace& s, std::mt19937_64& rng) {
  std::vector<Vector> f;
  for (int d : s.dims()) f.push_back(random_unit(d, rng));
  return kron_factors(f);
}

// A subspace that contains a known random product state.
inline entsplit::Subspace planted_product_subspace(const entsplit::TensorSpace& s, Index k, std::mt19937_64& rng) {
  Matrix cols(s.total_dim(), k);
  cols.col(0) = random_product(s, rng);
  for (Index j = 1; j < k; ++j) cols.col(j) = random_unit(s.total_dim(), rng);
  return entsplit::orthonormalize(s, cols);
}

inline Matrix random_hermitian(Index d, std::mt19937_64& rng) {
  Matrix a(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) a(i, j) = gaussian(rng);
  }
  return (a + a.adjoint()) / 2.0;
}

inline Vector basis_vector(const entsplit::TensorSpace& s, std::vector<int> labels) {
  Index flat = 0;
  for (std::size_t p = 0; p < labels.size(); ++p) flat = flat * s.dims()[p] + labels[p];
  Vector v = Vector::Zero(s.total_dim());
  v(flat) = 1.0;
  return v;
}

// ---------------------------------------------------------------------------
// Oracles

// Per-party digits of a flat index, party 0 most significant.
inline std::vector<int> digits(Index flat, const std::vector<int>& dims) {
  std::vector<int> out(dims.size());
  for (std::size_t p = dims.size(); p-- > 0;) {
    out[p] = static_cast<int>(flat % dims[p]);
    flat /= dims[p];
  }
  return out;
}

// Squared Schmidt coefficients from the eigenvalues of the reduced density
// matrix of the left group, built entry by entry.
inline std::vector<double> schmidt_squares(const Vector& psi, const std::vector<int>& dims,
                                           const std::vector<int>& left) {
  auto key = [&](const std::vector<int>& lab, bool on_left) {
    Index k = 0;
    for (std::size_t p = 0; p < dims.size(); ++p) {
      const bool l = std::find(left.begin(), left.end(), static_cast<int>(p)) != left.end();
      if (l == on_left) k = k * dims[p] + lab[p];
    }
    return k;
  };
  Index dl = 1;
  for (int p : left) dl *= dims[static_cast<std::size_t>(p)];
  Matrix rho = Matrix::Zero(dl, dl);
  for (Index a = 0; a < psi.size(); ++a) {
    const auto la = digits(a, dims);
    for (Index b = 0; b < psi.size(); ++b) {
      const auto lb = digits(b, dims);
      if (key(la, false) != key(lb, false)) continue;
      rho(key(la, true), key(lb, true)) += psi(a) * std::conj(psi(b));
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

// Partial transpose on the parties listed in `right`, by direct index swapping.
inline Matrix partial_transpose_loops(const Matrix& m, const std::vector<int>& dims, const std::vector<int>& right) {
  const Index d = m.rows();
  Matrix out(d, d);
  for (Index a = 0; a < d; ++a) {
    for (Index b = 0; b < d; ++b) {
      auto la = digits(a, dims);
      auto lb = digits(b, dims);
      for (int p : right) std::swap(la[static_cast<std::size_t>(p)], lb[static_cast<std::size_t>(p)]);
      Index na = 0, nb = 0;
      for (std::size_t p = 0; p < dims.size(); ++p) {
        na = na * dims[p] + la[p];
        nb = nb * dims[p] + lb[p];
      }
      out(na, nb) = m(a, b);
    }
  }
  return out;
}

// Largest |<a (x) b|psi>|^2 over a Bloch-angle grid for two qubits.
inline double grid_product_overlap_2x2(const Vector& psi, int steps) {
  double best = 0.0;
  auto qubit = [](double theta, double phi) {
    Vector v(2);
    v << std::cos(theta / 2), std::polar(1.0, phi) * std::sin(theta / 2);
    return v;
  };
  const double pi = std::numbers::pi;
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; j < 2 * steps; ++j) {
      const Vector a = qubit(pi * i / steps, pi * j / steps);
      for (int k = 0; k <= steps; ++k) {
        for (int l = 0; l < 2 * steps; ++l) {
          const Vector b = qubit(pi * k / steps, pi * l / steps);
          const cplx amp = std::conj(a(0) * b(0)) * psi(0) + std::conj(a(0) * b(1)) * psi(1) +
                           std::conj(a(1) * b(0)) * psi(2) + std::conj(a(1) * b(1)) * psi(3);
          best = std::max(best, std::norm(amp));
        }
      }
    }
  }
  return best;
}

inline double overlap_with(const entsplit::Subspace& s, const Vector& v) {
  return (s.basis().adjoint() * v).squaredNorm();
}

}  // namespace testing

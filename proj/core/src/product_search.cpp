#include "entsplit/product_search.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "entsplit/errors.hpp"
#include "entsplit/tolerances.hpp"

namespace entsplit {

void SearchConfig::validate() const {
  if (restarts < 1) throw ContractViolation("SearchConfig: restarts must be >= 1");
  if (max_iters < 1) throw ContractViolation("SearchConfig: max_iters must be >= 1");
  if (!(product_tol < entangled_gap)) {
    throw ContractViolation("SearchConfig: product_tol must be below entangled_gap");
  }
}

std::string_view to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::ProductFound: return "ProductFound";
    case VerdictKind::NumericallyEntangled: return "NumericallyEntangled";
    case VerdictKind::CertifiedEntangled: return "CertifiedEntangled";
    case VerdictKind::CertifiedProduct: return "CertifiedProduct";
    case VerdictKind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

bool is_entangled(VerdictKind kind) {
  return kind == VerdictKind::NumericallyEntangled || kind == VerdictKind::CertifiedEntangled;
}

bool contains_product(VerdictKind kind) {
  return kind == VerdictKind::ProductFound || kind == VerdictKind::CertifiedProduct;
}

std::vector<std::vector<int>> SearchMode::groups(const TensorSpace& space) const {
  if (cut_) return {cut_->left(), cut_->right()};
  std::vector<std::vector<int>> g;
  for (int p = 0; p < space.parties(); ++p) g.push_back({p});
  return g;
}

void SearchMode::check(const TensorSpace& space) const {
  if (cut_) cut_->check(space);
}

namespace detail {

BlockLayout::BlockLayout(const TensorSpace& space, std::vector<std::vector<int>> party_groups)
    : groups(std::move(party_groups)) {
  const Index d = space.total_dim();
  local.assign(groups.size(), std::vector<Index>(static_cast<std::size_t>(d), 0));
  block_dims.assign(groups.size(), 1);
  for (std::size_t b = 0; b < groups.size(); ++b) {
    for (int p : groups[b]) block_dims[b] *= space.dim(p);
  }
  for (Index f = 0; f < d; ++f) {
    const auto labels = space.labels(f);
    for (std::size_t b = 0; b < groups.size(); ++b) {
      Index idx = 0;
      for (int p : groups[b]) idx = idx * space.dim(p) + labels[static_cast<std::size_t>(p)];
      local[b][static_cast<std::size_t>(f)] = idx;
    }
  }
}

Vector BlockLayout::assemble(const std::vector<Vector>& factors) const {
  const std::size_t d = local.empty() ? 0 : local[0].size();
  Vector v(static_cast<Index>(d));
  for (std::size_t f = 0; f < d; ++f) {
    cplx a = 1.0;
    for (std::size_t b = 0; b < groups.size(); ++b) a *= factors[b](local[b][f]);
    v(static_cast<Index>(f)) = a;
  }
  return v;
}

Matrix contract_except(const BlockLayout& layout, const Matrix& basis,
                       const std::vector<Vector>& factors, std::size_t b) {
  Matrix out = Matrix::Zero(layout.block_dims[b], basis.cols());
  const std::size_t d = layout.local[b].size();
  for (std::size_t f = 0; f < d; ++f) {
    cplx w = 1.0;
    for (std::size_t c = 0; c < layout.blocks(); ++c) {
      if (c != b) w *= std::conj(factors[c](layout.local[c][f]));
    }
    if (w == cplx(0.0)) continue;
    out.row(layout.local[b][f]) += w * basis.row(static_cast<Index>(f));
  }
  return out;
}

namespace {

double form_value(const std::vector<FormTerm>& form, const Vector& phi) {
  double v = 0.0;
  for (const auto& t : form) v += t.weight * (t.basis->adjoint() * phi).squaredNorm();
  return v;
}

}  // namespace

AscentResult ascend(const BlockLayout& layout, const std::vector<FormTerm>& form,
                    std::vector<Vector> factors, const SearchConfig& cfg, std::vector<double>* trace) {
  double scale = 1.0;
  for (const auto& t : form) scale += std::abs(t.weight);
  const double slack = 1e-12 * scale;

  AscentResult result;
  double value = form_value(form, layout.assemble(factors));
  if (trace) trace->push_back(value);
  int sweep = 0;
  for (; sweep < cfg.max_iters; ++sweep) {
    const double before = value;
    for (std::size_t b = 0; b < layout.blocks(); ++b) {
      const Index db = layout.block_dims[b];
      Matrix local = Matrix::Zero(db, db);
      for (const auto& t : form) {
        const Matrix v = contract_except(layout, *t.basis, factors, b);
        local.noalias() += t.weight * (v * v.adjoint());
      }
      local = (0.5 * (local + local.adjoint())).eval();
      Eigen::SelfAdjointEigenSolver<Matrix> es(local);
      const double top = es.eigenvalues()(db - 1);
      if (top < value - slack) {
        throw std::logic_error("alternating ascent decreased the objective");
      }
      factors[b] = es.eigenvectors().col(db - 1);
      value = top;
      if (trace) trace->push_back(value);
    }
    if (value - before < cfg.stall_tol) {
      ++sweep;
      break;
    }
  }
  result.value = value;
  result.factors = std::move(factors);
  result.sweeps = sweep;
  return result;
}

std::vector<Vector> random_factors(const BlockLayout& layout, Rng& rng) {
  std::vector<Vector> f;
  f.reserve(layout.blocks());
  for (Index d : layout.block_dims) f.push_back(haar_state(d, rng));
  return f;
}

ProductWitness make_witness(const TensorSpace& space, const BlockLayout& layout,
                            std::vector<Vector> factors) {
  for (auto& f : factors) f /= f.norm();
  Vector v = layout.assemble(factors);
  return ProductWitness{layout.groups, std::move(factors), Ket(space, std::move(v))};
}

namespace {

// Flat index of entry (row, col) of the flattening "block b versus the rest".
struct Flattening {
  Index rows = 0;
  Index cols = 0;
  std::vector<Index> flat;  // rows * cols, row-major
};

std::vector<Flattening> flattenings(const BlockLayout& layout) {
  std::vector<Flattening> out;
  const std::size_t nb = layout.blocks();
  const std::size_t d = layout.local[0].size();
  // Two blocks need one flattening; more need one per block.
  const std::size_t count = nb == 2 ? 1 : nb;
  for (std::size_t b = 0; b < count; ++b) {
    Flattening fl;
    fl.rows = layout.block_dims[b];
    fl.cols = static_cast<Index>(d) / fl.rows;
    fl.flat.assign(d, 0);
    for (std::size_t f = 0; f < d; ++f) {
      Index col = 0;
      for (std::size_t c = 0; c < nb; ++c) {
        if (c != b) col = col * layout.block_dims[c] + layout.local[c][f];
      }
      fl.flat[static_cast<std::size_t>(layout.local[b][f] * fl.cols + col)] = static_cast<Index>(f);
    }
    out.push_back(std::move(fl));
  }
  return out;
}

std::size_t minor_count(const std::vector<Flattening>& fls) {
  std::size_t n = 0;
  for (const auto& fl : fls) {
    n += static_cast<std::size_t>(fl.rows * (fl.rows - 1) / 2) * static_cast<std::size_t>(fl.cols * (fl.cols - 1) / 2);
  }
  return n;
}

// Residual of all minors of phi = B c and its Jacobian with respect to c.
void minors(const std::vector<Flattening>& fls, const Matrix& basis, const Vector& phi, Vector& r, Matrix& jac) {
  std::size_t m = 0;
  for (const auto& fl : fls) {
    auto at = [&](Index i, Index j) { return fl.flat[static_cast<std::size_t>(i * fl.cols + j)]; };
    for (Index i = 0; i < fl.rows; ++i) {
      for (Index j = i + 1; j < fl.rows; ++j) {
        for (Index k = 0; k < fl.cols; ++k) {
          for (Index l = k + 1; l < fl.cols; ++l, ++m) {
            const Index ik = at(i, k), jl = at(j, l), il = at(i, l), jk = at(j, k);
            const auto row = static_cast<Index>(m);
            r(row) = phi(ik) * phi(jl) - phi(il) * phi(jk);
            jac.row(row) = phi(jl) * basis.row(ik) + phi(ik) * basis.row(jl) - phi(jk) * basis.row(il) -
                           phi(il) * basis.row(jk);
          }
        }
      }
    }
  }
}

}  // namespace

std::vector<Vector> polish(const BlockLayout& layout, const Matrix& basis, std::vector<Vector> factors,
                           const SearchConfig& cfg) {
  const Index k = basis.cols();
  if (k < 2 || layout.blocks() < 2) return factors;
  const auto fls = flattenings(layout);
  const auto n = static_cast<Index>(minor_count(fls));
  if (n == 0) return factors;

  Vector c = basis.adjoint() * layout.assemble(factors);
  if (c.norm() == 0.0) return factors;
  c /= c.norm();
  Vector r(n);
  Matrix jac(n, k);
  double best = std::numeric_limits<double>::infinity();
  Vector best_c = c;
  constexpr int kSteps = 80;
  for (int it = 0; it < kSteps; ++it) {
    minors(fls, basis, basis * c, r, jac);
    const double res = r.norm();
    if (res < best) {
      best = res;
      best_c = c;
    }
    if (res < 1e-15) break;
    // Tangent space of the unit sphere at c.
    Eigen::HouseholderQR<Matrix> qr(c);
    const Matrix q = (qr.householderQ() * Matrix::Identity(k, k)).rightCols(k - 1);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(jac * q);
    cod.setThreshold(1e-12);
    const Vector step = q * cod.solve(-r);
    if (!step.allFinite() || step.norm() < 1e-16) break;
    c += step;
    c /= c.norm();
  }
  // Product factors nearest to the polished vector, by the same ascent.
  Matrix target = basis * best_c;
  SearchConfig local = cfg;
  local.stall_tol = 0.0;
  local.max_iters = 50;
  auto fit = ascend(layout, {{&target, 1.0}}, std::move(factors), local);
  return fit.factors;
}

}  // namespace detail

OverlapResult max_product_overlap(const Subspace& s, const SearchMode& mode, const SearchConfig& cfg) {
  constexpr double kPolishBelow = 1e-3;
  cfg.validate();
  if (s.dim() == 0) throw ContractViolation("max_product_overlap: empty subspace");
  mode.check(s.space());
  const detail::BlockLayout layout(s.space(), mode.groups(s.space()));
  const std::vector<detail::FormTerm> form{{&s.basis(), 1.0}};

  double best_value = -1.0;
  int restarts_run = 0;
  std::vector<Vector> best_factors;
  for (int k = 0; k < cfg.restarts; ++k) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(k)));
    auto run = detail::ascend(layout, form, detail::random_factors(layout, rng), cfg);
    restarts_run = k + 1;
    if (1.0 - run.value > cfg.product_tol && 1.0 - run.value < kPolishBelow) {
      auto refined = detail::polish(layout, s.basis(), run.factors, cfg);
      const double v = s.overlap(layout.assemble(refined));
      if (v > run.value) {
        run.value = v;
        run.factors = std::move(refined);
      }
    }
    if (run.value > best_value) {
      best_value = run.value;
      best_factors = std::move(run.factors);
    }
    if (1.0 - best_value <= cfg.product_tol) break;
  }
  ProductWitness witness = detail::make_witness(s.space(), layout, std::move(best_factors));
  // Re-evaluate from the assembled Ket rather than trusting the eigenvalue.
  const double overlap = std::clamp(s.overlap(witness.ket), 0.0, 1.0);
  return OverlapResult{overlap, std::move(witness), restarts_run};
}

namespace {

struct Quadratic {
  cplx a2, ab, b2;  // coefficients of a^2, ab, b^2
  cplx eval(cplx a, cplx b) const { return a2 * a * a + ab * a * b + b2 * b * b; }
  double size() const { return std::max({std::abs(a2), std::abs(ab), std::abs(b2)}); }
};

// 2 x 2 minors of a*m1 + b*m2 (both 2 x d) as binary quadratics.
std::vector<Quadratic> pencil_minors(const Matrix& m1, const Matrix& m2) {
  std::vector<Quadratic> q;
  for (Index k = 0; k < m1.cols(); ++k) {
    for (Index l = k + 1; l < m1.cols(); ++l) {
      Quadratic t;
      t.a2 = m1(0, k) * m1(1, l) - m1(0, l) * m1(1, k);
      t.b2 = m2(0, k) * m2(1, l) - m2(0, l) * m2(1, k);
      t.ab = m1(0, k) * m2(1, l) + m2(0, k) * m1(1, l) - m1(0, l) * m2(1, k) - m2(0, l) * m1(1, k);
      q.push_back(t);
    }
  }
  return q;
}

// Candidate projective roots (a : b) of one quadratic.
std::vector<std::array<cplx, 2>> quadratic_roots(const Quadratic& q) {
  constexpr double eps = tol::kCertificateCoefficient;
  std::vector<std::array<cplx, 2>> roots;
  if (std::abs(q.a2) <= eps) {
    // q = b (ab*a + b2*b): b = 0 is always a root.
    roots.push_back({1.0, 0.0});
    if (std::abs(q.ab) > eps) roots.push_back({-q.b2, q.ab});
    return roots;
  }
  const cplx disc = q.ab * q.ab - 4.0 * q.a2 * q.b2;
  const cplx sq = std::sqrt(disc);
  // Stable pair: the larger-magnitude numerator first, the other root via Vieta.
  const cplx num = (std::abs(-q.ab + sq) >= std::abs(-q.ab - sq)) ? (-q.ab + sq) : (-q.ab - sq);
  if (std::abs(num) > 0.0) {
    roots.push_back({num, 2.0 * q.a2});
    roots.push_back({2.0 * q.b2, num});
  } else {
    roots.push_back({0.0, 1.0});
  }
  const double scale = std::max({std::norm(q.ab), std::abs(4.0 * q.a2 * q.b2), 1.0});
  if (std::abs(disc) <= eps * scale) roots.push_back({-q.ab, 2.0 * q.a2});  // double root
  return roots;
}

ProductVerdict certify_pencil(const Subspace& s, const Matrix& m1, const Matrix& m2,
                              const Bipartition& cut) {
  const auto quads = pencil_minors(m1, m2);
  const Quadratic* lead = nullptr;
  for (const auto& q : quads) {
    if (q.size() > tol::kCertificateCoefficient) {
      lead = &q;
      break;
    }
  }
  std::vector<std::array<cplx, 2>> candidates;
  if (lead == nullptr) {
    candidates.push_back({1.0, 0.0});  // every member of the pencil has rank one
  } else {
    candidates = quadratic_roots(*lead);
  }

  double best_residual = std::numeric_limits<double>::infinity();
  std::array<cplx, 2> best{1.0, 0.0};
  for (auto root : candidates) {
    const double n = std::sqrt(std::norm(root[0]) + std::norm(root[1]));
    if (n == 0.0) continue;
    root[0] /= n;
    root[1] /= n;
    double residual = 0.0;
    for (const auto& q : quads) residual = std::max(residual, std::abs(q.eval(root[0], root[1])));
    if (residual < best_residual) {
      best_residual = residual;
      best = root;
    }
  }

  ProductVerdict verdict;
  if (best_residual > tol::kCertificateResidual) {
    verdict.kind = VerdictKind::CertifiedEntangled;
    return verdict;
  }
  // Refactor a|v1> + b|v2> into its leading Schmidt pair.
  const Vector w = best[0] * s.basis().col(0) + best[1] * s.basis().col(1);
  const Matrix m = cut_matrix(s.space(), w, cut);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector left = svd.matrixU().col(0);
  Vector right = svd.matrixV().col(0).conjugate();
  const detail::BlockLayout layout(s.space(), {cut.left(), cut.right()});
  verdict.kind = VerdictKind::CertifiedProduct;
  verdict.witness = detail::make_witness(s.space(), layout, {left, right});
  verdict.max_overlap = std::clamp(s.overlap(verdict.witness->ket), 0.0, 1.0);
  return verdict;
}

}  // namespace

std::optional<ProductVerdict> certify_dim2_across(const Subspace& s, const Bipartition& cut) {
  cut.check(s.space());
  if (s.dim() != 2) return std::nullopt;
  const Index rows = cut.left_dim(s.space());
  const Index cols = cut.right_dim(s.space());
  if (rows != 2 && cols != 2) return std::nullopt;
  Matrix m1 = cut_matrix(s.space(), s.basis().col(0), cut);
  Matrix m2 = cut_matrix(s.space(), s.basis().col(1), cut);
  if (rows != 2) {
    m1.transposeInPlace();
    m2.transposeInPlace();
  }
  return certify_pencil(s, m1, m2, cut);
}

ProductVerdict certify_2xd_dim2(const Subspace& s) {
  const TensorSpace& space = s.space();
  if (!space.is_bipartite() || space.dim(0) != 2) {
    throw ContractViolation("certify_2xd_dim2: space must be 2 x d, got " + space.to_string());
  }
  if (s.dim() != 2) {
    throw ContractViolation("certify_2xd_dim2: subspace must be two-dimensional");
  }
  return *certify_dim2_across(s, Bipartition::first_party(2));
}

ProductVerdict detect_product(const Subspace& s, const SearchMode& mode, const SearchConfig& cfg) {
  constexpr int kReportingRestarts = 8;
  cfg.validate();
  if (s.dim() == 0) throw ContractViolation("detect_product: empty subspace");
  mode.check(s.space());

  std::optional<Bipartition> effective_cut = mode.cut();
  if (!effective_cut && s.space().is_bipartite()) effective_cut = Bipartition::first_party(2);
  std::optional<ProductVerdict> certificate;
  if (cfg.use_certificate && effective_cut) certificate = certify_dim2_across(s, *effective_cut);
  if (certificate && certificate->kind == VerdictKind::CertifiedProduct) return *certificate;

  // With an entangled certificate the search only supplies a reported lower bound.
  SearchConfig run = cfg;
  if (certificate) run.restarts = std::min(cfg.restarts, kReportingRestarts);
  const OverlapResult r = max_product_overlap(s, mode, run);
  ProductVerdict v;
  v.max_overlap = r.overlap;
  const double deficit = 1.0 - r.overlap;
  if (certificate) {
    v.kind = certificate->kind;  // CertifiedEntangled; the numerical bound is kept for reporting
  } else if (deficit <= cfg.product_tol) {
    v.kind = VerdictKind::ProductFound;
    v.witness = r.witness;
  } else if (deficit >= cfg.entangled_gap) {
    v.kind = VerdictKind::NumericallyEntangled;
  } else {
    v.kind = VerdictKind::Inconclusive;
  }
  return v;
}

BiseparabilityReport detect_biseparable(const Subspace& s, const SearchConfig& cfg) {
  const int m = s.space().parties();
  if (m < 3) throw ContractViolation("detect_biseparable: needs at least three parties; use detect_product");
  BiseparabilityReport report;
  bool all_entangled = true;
  bool any_product = false;
  bool any_inconclusive = false;
  double worst = -1.0;
  for (auto& cut : Bipartition::all(m)) {
    ProductVerdict v = detect_product(s, SearchMode::across(cut), cfg);
    all_entangled = all_entangled && is_entangled(v.kind);
    any_product = any_product || contains_product(v.kind);
    any_inconclusive = any_inconclusive || v.kind == VerdictKind::Inconclusive;
    if (v.max_overlap > worst) {
      worst = v.max_overlap;
      report.worst_cut = report.cuts.size();
    }
    report.cuts.emplace_back(std::move(cut), std::move(v));
  }
  report.genuinely_entangled = all_entangled;
  report.inconclusive = !any_product && any_inconclusive;
  return report;
}

}  // namespace entsplit

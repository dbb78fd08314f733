// SPDX-License-Identifier: Apache-2.0

#include "ncb/opspace.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ncb {

namespace {

constexpr double kGramFloor = 1e-10;
constexpr double kUnitTol = 1e-9;

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

CMat gram(const std::vector<CMat>& basis) {
  const auto m = static_cast<int>(basis.size());
  CMat g(m, m);
  for (int s = 0; s < m; ++s)
    for (int t = 0; t < m; ++t) g(s, t) = (basis[s].adjoint() * basis[t]).trace();
  return g;
}

}  // namespace

CMat OperatorSpaceSpec::realize(const CVec& coeffs) const {
  require(coeffs.size() == dim(), "coefficient length mismatch");
  CMat a = CMat::Zero(d, d);
  for (int t = 0; t < dim(); ++t)
    if (coeffs(t) != cplx(0.0)) a += coeffs(t) * basis[t];
  return a;
}

CMat OperatorSpaceSpec::u_matrix() const {
  require(u.has_value(), "space has no distinguished element");
  return realize(*u);
}

void validate(const OperatorSpaceSpec& v) {
  require(v.d >= 1, "ambient dimension must be positive");
  require(!v.basis.empty(), "basis is empty");
  for (const auto& g : v.basis)
    require(g.rows() == v.d && g.cols() == v.d, "basis element has wrong shape");
  const RVec ev = herm_eigenvalues(herm_part(gram(v.basis)));
  require(ev(ev.size() - 1) >= kGramFloor, "basis is linearly dependent or ill-conditioned");
  if (v.u) {
    require(v.u->size() == v.dim(), "u has wrong coefficient length");
    require(std::abs(spec_norm(v.u_matrix()) - 1.0) <= kUnitTol, "u must have norm 1");
  }
}

OperatorSpaceSpec make_space(std::string label, std::vector<CMat> basis, std::optional<CVec> u) {
  OperatorSpaceSpec v;
  v.label = std::move(label);
  v.d = basis.empty() ? 0 : static_cast<int>(basis.front().rows());
  v.basis = std::move(basis);
  v.u = std::move(u);
  validate(v);
  return v;
}

LevelElement LevelElement::zero(int k, int m) {
  LevelElement x;
  x.k = k;
  x.coeffs.assign(static_cast<std::size_t>(k * k), CVec::Zero(m));
  return x;
}

LevelElement LevelElement::scalar(const CVec& c) {
  LevelElement x;
  x.k = 1;
  x.coeffs = {c};
  return x;
}

CMat realize(const OperatorSpaceSpec& v, const LevelElement& x) {
  require(x.k >= 1, "level must be at least 1");
  require(x.coeffs.size() == static_cast<std::size_t>(x.k * x.k), "level element has wrong entry count");
  CMat a(x.k * v.d, x.k * v.d);
  for (int i = 0; i < x.k; ++i)
    for (int j = 0; j < x.k; ++j) a.block(i * v.d, j * v.d, v.d, v.d) = v.realize(x.at(i, j));
  return a;
}

double level_norm(const OperatorSpaceSpec& v, const LevelElement& x) {
  return spec_norm(realize(v, x));
}

CVec coefficients_of(const OperatorSpaceSpec& v, const CMat& a, double* residual) {
  require(a.rows() == v.d && a.cols() == v.d, "matrix has wrong shape");
  const int m = v.dim();
  CMat b(v.d * v.d, m);
  for (int t = 0; t < m; ++t) b.col(t) = v.basis[t].reshaped();
  const CVec rhs = a.reshaped();
  const CVec c = b.colPivHouseholderQr().solve(rhs);
  if (residual) *residual = (b * c - rhs).norm();
  return c;
}

LevelElement level_element_of(const OperatorSpaceSpec& v, int k, const CMat& a, double* residual) {
  require(a.rows() == k * v.d && a.cols() == k * v.d, "matrix has wrong shape for this level");
  LevelElement x = LevelElement::zero(k, v.dim());
  double total = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      double r = 0.0;
      x.at(i, j) = coefficients_of(v, a.block(i * v.d, j * v.d, v.d, v.d), &r);
      total += r * r;
    }
  if (residual) *residual = std::sqrt(total);
  return x;
}

LevelElement direct_sum(const LevelElement& x, const LevelElement& y) {
  const auto m = x.coeffs.front().size();
  require(y.coeffs.front().size() == m, "direct sum of elements from different spaces");
  LevelElement s = LevelElement::zero(x.k + y.k, static_cast<int>(m));
  for (int i = 0; i < x.k; ++i)
    for (int j = 0; j < x.k; ++j) s.at(i, j) = x.at(i, j);
  for (int i = 0; i < y.k; ++i)
    for (int j = 0; j < y.k; ++j) s.at(x.k + i, x.k + j) = y.at(i, j);
  return s;
}

LevelElement scalar_sandwich(const CMat& alpha, const LevelElement& x, const CMat& beta) {
  require(alpha.cols() == x.k && beta.rows() == x.k, "scalar matrix shape mismatch");
  require(alpha.rows() == beta.cols(), "result must be square");
  const int p = static_cast<int>(alpha.rows());
  const auto m = static_cast<int>(x.coeffs.front().size());
  LevelElement r = LevelElement::zero(p, m);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int i = 0; i < x.k; ++i)
        for (int j = 0; j < x.k; ++j) r.at(a, b) += alpha(a, i) * beta(j, b) * x.at(i, j);
  return r;
}

LevelElement map_coeffs(const CMat& a, const LevelElement& x) {
  LevelElement r;
  r.k = x.k;
  r.coeffs.reserve(x.coeffs.size());
  for (const auto& c : x.coeffs) r.coeffs.push_back(a * c);
  return r;
}

LevelElement scaled(const LevelElement& x, cplx s) {
  LevelElement r = x;
  for (auto& c : r.coeffs) c *= s;
  return r;
}

LevelElement add(const LevelElement& x, const LevelElement& y) {
  require(x.k == y.k, "level mismatch");
  LevelElement r = x;
  for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] += y.coeffs[i];
  return r;
}

LevelElement random_unit_element(const OperatorSpaceSpec& v, int k, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  LevelElement x = LevelElement::zero(k, v.dim());
  for (auto& c : x.coeffs)
    for (int t = 0; t < c.size(); ++t) c(t) = cplx(g(rng), g(rng));
  return scaled(x, 1.0 / level_norm(v, x));
}

// ---------------------------------------------------------------------------

double norm(const NormedSpaceSpec& x, const CVec& c) {
  require(c.size() == x.m, "coefficient length mismatch");
  switch (x.kind) {
    case NormedKind::polytope:
    case NormedKind::sup_over_points: {
      double best = 0.0;
      for (const auto& f : x.functionals) best = std::max(best, std::abs(apply_functional(f, c)));
      return best;
    }
    case NormedKind::matrix_realized:
      return spec_norm(x.space->realize(c));
    case NormedKind::l1_sum:
    case NormedKind::linf_sum: {
      const double a = norm(*x.left, c.head(x.left->m));
      const double b = norm(*x.right, c.tail(x.right->m));
      return x.kind == NormedKind::l1_sum ? a + b : std::max(a, b);
    }
  }
  return 0.0;
}

namespace {

NormedSpaceSpec finish(NormedSpaceSpec x) {
  if (x.u) {
    require(x.u->size() == x.m, "u has wrong coefficient length");
    require(std::abs(norm(x, *x.u) - 1.0) <= kUnitTol, "u must have norm 1");
  }
  return x;
}

NormedSpaceSpec functional_space(std::string label, NormedKind kind, std::vector<CVec> fs,
                                 std::optional<CVec> u) {
  require(!fs.empty(), "functional list is empty");
  NormedSpaceSpec x;
  x.label = std::move(label);
  x.kind = kind;
  x.m = static_cast<int>(fs.front().size());
  for (const auto& f : fs) require(f.size() == x.m, "functional has wrong length");
  // the functionals must separate points, otherwise the norm is only a seminorm
  CMat stack(static_cast<int>(fs.size()), x.m);
  for (std::size_t i = 0; i < fs.size(); ++i) stack.row(static_cast<int>(i)) = fs[i].transpose();
  require(stack.fullPivLu().rank() == x.m, "functionals do not separate points");
  x.functionals = std::move(fs);
  x.u = std::move(u);
  return finish(std::move(x));
}

}  // namespace

NormedSpaceSpec make_polytope(std::string label, std::vector<CVec> functionals, std::optional<CVec> u) {
  return functional_space(std::move(label), NormedKind::polytope, std::move(functionals), std::move(u));
}

NormedSpaceSpec make_sup_over_points(std::string label, std::vector<CVec> points, std::optional<CVec> u) {
  require(!points.empty(), "empty point set");
  return functional_space(std::move(label), NormedKind::sup_over_points, std::move(points), std::move(u));
}

NormedSpaceSpec make_matrix_realized(const OperatorSpaceSpec& v) {
  validate(v);
  NormedSpaceSpec x;
  x.label = v.label;
  x.kind = NormedKind::matrix_realized;
  x.m = v.dim();
  x.space = std::make_shared<const OperatorSpaceSpec>(v);
  x.u = v.u;
  return finish(std::move(x));
}

NormedSpaceSpec make_sum(NormedKind kind, const NormedSpaceSpec& a, const NormedSpaceSpec& b,
                         std::optional<CVec> u) {
  require(kind == NormedKind::l1_sum || kind == NormedKind::linf_sum, "not a sum kind");
  NormedSpaceSpec x;
  x.label = a.label + (kind == NormedKind::l1_sum ? " (+)1 " : " (+)inf ") + b.label;
  x.kind = kind;
  x.m = a.m + b.m;
  x.left = std::make_shared<const NormedSpaceSpec>(a);
  x.right = std::make_shared<const NormedSpaceSpec>(b);
  x.u = std::move(u);
  return finish(std::move(x));
}

NormedSpaceSpec linf(int m, std::optional<CVec> u) {
  std::vector<CVec> pts;
  for (int i = 0; i < m; ++i) pts.push_back(CVec::Unit(m, i));
  return make_sup_over_points("linf" + std::to_string(m), std::move(pts), std::move(u));
}

OperatorSpaceSpec min_quantization(const NormedSpaceSpec& x) {
  require(x.kind == NormedKind::sup_over_points, "min quantization needs a sup_over_points space");
  const auto n = static_cast<int>(x.functionals.size());
  require(n > 0, "empty point set");
  std::vector<CMat> basis;
  for (int t = 0; t < x.m; ++t) {
    CMat g = CMat::Zero(n, n);
    for (int w = 0; w < n; ++w) g(w, w) = x.functionals[w](t);
    basis.push_back(g);
  }
  return make_space("min " + x.label, std::move(basis), x.u);
}

OperatorSpaceSpec direct_sum_inf(const OperatorSpaceSpec& v, const OperatorSpaceSpec& w) {
  const int d = v.d + w.d;
  std::vector<CMat> basis;
  for (const auto& g : v.basis) {
    CMat b = CMat::Zero(d, d);
    b.topLeftCorner(v.d, v.d) = g;
    basis.push_back(b);
  }
  for (const auto& g : w.basis) {
    CMat b = CMat::Zero(d, d);
    b.bottomRightCorner(w.d, w.d) = g;
    basis.push_back(b);
  }
  std::optional<CVec> u;
  if (v.u && w.u) {
    CVec c(v.dim() + w.dim());
    c << *v.u, *w.u;
    u = c;
  }
  return make_space(v.label + " (+)inf " + w.label, std::move(basis), u);
}

bool has_unitary_realization(const OperatorSpaceSpec& v, double tol) {
  if (!v.u) return false;
  const CMat u = v.u_matrix();
  return (u.adjoint() * u - CMat::Identity(v.d, v.d)).cwiseAbs().maxCoeff() <= tol;
}

ConjugatedSpace conjugate_embedding(const OperatorSpaceSpec& v) {
  if (!has_unitary_realization(v)) throw ContractViolation("no exact unital realization available");
  ConjugatedSpace c;
  c.unitary = v.u_matrix();
  c.space = v;
  c.space.label = "u* " + v.label;
  for (auto& g : c.space.basis) g = c.unitary.adjoint() * g;
  return c;
}

OperatorSpaceSpec compress_to_support(const OperatorSpaceSpec& v, double tol) {
  CMat cols(v.d, 2 * v.d * v.dim());
  for (int t = 0; t < v.dim(); ++t) {
    cols.middleCols(2 * v.d * t, v.d) = v.basis[t];
    cols.middleCols(2 * v.d * t + v.d, v.d) = v.basis[t].adjoint();
  }
  Eigen::JacobiSVD<CMat> svd(cols, Eigen::ComputeFullU);
  const RVec s = svd.singularValues();
  int r = 0;
  while (r < s.size() && s(r) > tol * std::max(1.0, s(0))) ++r;
  require(r > 0, "space is zero");
  const CMat w = svd.matrixU().leftCols(r);
  OperatorSpaceSpec c = v;
  c.d = r;
  for (auto& g : c.basis) g = w.adjoint() * g * w;
  validate(c);
  return c;
}

}  // namespace ncb

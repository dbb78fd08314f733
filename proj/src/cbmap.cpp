// SPDX-License-Identifier: Apache-2.0

#include "ncb/cbmap.hpp"

#include <cmath>

namespace ncb {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

}  // namespace

ChoiMatrix choi_of(int d, int n, const std::function<CMat(const CMat&)>& phi) {
  ChoiMatrix m;
  m.d = d;
  m.n = n;
  m.c = CMat::Zero(d * n, d * n);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const CMat img = phi(matrix_unit(d, i, j));
      require(img.rows() == n && img.cols() == n, "map image has wrong shape");
      m.c.block(i * n, j * n, n, n) = img;
    }
  return m;
}

ChoiMatrix identity_map(int d) {
  return choi_of(d, d, [](const CMat& a) { return a; });
}

ChoiMatrix transpose_map(int d) {
  return choi_of(d, d, [](const CMat& a) { return CMat(a.transpose()); });
}

ChoiMatrix trace_map(int d) {
  return choi_of(d, 1, [](const CMat& a) { return CMat::Constant(1, 1, a.trace()); });
}

CMat apply(const ChoiMatrix& phi, const CMat& a) {
  const int d = phi.d;
  const int n = phi.n;
  require(a.rows() == a.cols() && a.rows() % d == 0, "input size is not a multiple of the domain dimension");
  const int k = static_cast<int>(a.rows()) / d;
  CMat out = CMat::Zero(k * n, k * n);
  for (int al = 0; al < k; ++al)
    for (int be = 0; be < k; ++be)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          const cplx s = a(al * d + i, be * d + j);
          if (s != cplx(0.0)) out.block(al * n, be * n, n, n) += s * phi.image_of_unit(i, j);
        }
  return out;
}

CMat apply(const ChoiMatrix& phi, const OperatorSpaceSpec& v, const LevelElement& x) {
  require(v.d == phi.d, "map domain does not match the space");
  return ncb::apply(phi, realize(v, x));
}

bool is_cp(const ChoiMatrix& phi, double tol) {
  if (!is_hermitian(phi.c, 1e-10)) return false;
  return psd_check(herm_part(phi.c), tol).psd;
}

CbNormResult cb_norm(const ChoiMatrix& phi, const sdp::Settings& settings) {
  const int d = phi.d;
  const int n = phi.n;
  const int dn = d * n;
  sdp::Problem p;
  const int z = p.add_block("corners", 2 * dn);
  const int s1 = p.add_block("slack1", n);
  const int s2 = p.add_block("slack2", n);
  const int t = p.add_block("t", 1, sdp::BlockKind::real_symmetric);
  for (int r = 0; r < dn; ++r)
    for (int c = 0; c < dn; ++c) p.add_complex_equality({{z, r, dn + c, 1.0}}, phi.c(r, c));
  for (int corner = 0; corner < 2; ++corner) {
    const int off = corner * dn;
    const int s = corner == 0 ? s1 : s2;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        std::vector<sdp::Term> terms{{s, a, b, 1.0}};
        for (int i = 0; i < d; ++i) terms.push_back({z, off + i * n + a, off + i * n + b, 1.0});
        if (a == b) {
          terms.push_back({t, 0, 0, -1.0});
          p.add_equality(sdp::Functional{terms}, 0.0);
        } else {
          p.add_complex_equality(terms, 0.0);
        }
      }
  }
  sdp::Functional obj;
  obj.add(t, 0, 0, 1.0);
  p.set_objective(obj, sdp::Sense::minimize);

  const sdp::Solution sol = sdp::solve(p, settings);
  CbNormResult r;
  r.status = sol.status;
  r.verified = sol.status == sdp::Status::optimal;
  r.value = sol.blocks.empty() ? 0.0 : sol.blocks[t](0, 0).real();
  r.witness = phi;
  r.witness.cb_checked = r.verified;
  if (!sol.blocks.empty()) {
    r.witness.slack1 = sol.blocks[z].topLeftCorner(dn, dn);
    r.witness.slack2 = sol.blocks[z].bottomRightCorner(dn, dn);
  }
  return r;
}

// ---------------------------------------------------------------------------

MapProgram::MapProgram(int d, int n, bool cp_form, bool unital)
    : d_(d), n_(n), cp_form_(cp_form), unital_(unital) {
  require(d >= 1 && n >= 1, "map dimensions must be positive");
  require(cp_form || !unital, "the unital form is only available for CP maps");
  const int dn = d * n;
  main_block_ = problem_.add_block(cp_form ? "choi" : "corners", cp_form ? dn : 2 * dn);
  const int corners = cp_form ? 1 : 2;
  for (int corner = 0; corner < corners; ++corner) {
    const int s = unital ? -1 : problem_.add_block(corner == 0 ? "slack1" : "slack2", n);
    const int off = corner * dn;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        std::vector<sdp::Term> terms;
        if (s >= 0) terms.push_back({s, a, b, 1.0});
        for (int i = 0; i < d; ++i) terms.push_back({main_block_, off + i * n + a, off + i * n + b, 1.0});
        if (a == b)
          problem_.add_equality(sdp::Functional{terms}, 1.0);
        else
          problem_.add_complex_equality(terms, 0.0);
      }
  }
}

void MapProgram::add_choi_term(std::vector<sdp::Term>& terms, int r, int c, cplx coef) const {
  if (coef == cplx(0.0)) return;
  terms.push_back({main_block_, r, cp_form_ ? c : d_ * n_ + c, coef});
}

void MapProgram::add_image_terms(std::vector<sdp::Term>& terms, const CMat& a, int p, int q,
                                 cplx coef) const {
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) add_choi_term(terms, i * n_ + p, j * n_ + q, coef * a(i, j));
}

void MapProgram::add_amplified_terms(std::vector<sdp::Term>& terms, const CMat& a, int r, int c,
                                     cplx coef) const {
  const int al = r / n_;
  const int be = c / n_;
  add_image_terms(terms, a.block(al * d_, be * d_, d_, d_), r % n_, c % n_, coef);
}

sdp::Functional MapProgram::pairing(const CMat& a, const CVec& xi, const CVec& eta) const {
  require(a.rows() % d_ == 0 && a.rows() == a.cols(), "input size is not a multiple of the domain dimension");
  const int k = static_cast<int>(a.rows()) / d_;
  require(xi.size() == k * n_ && eta.size() == k * n_, "pairing vectors have wrong length");
  // coefficient of C[i n + p][j n + q] in <xi, φ_k(a) eta>
  CMat coef = CMat::Zero(d_ * n_, d_ * n_);
  for (int al = 0; al < k; ++al)
    for (int be = 0; be < k; ++be) {
      const CMat blk = a.block(al * d_, be * d_, d_, d_);
      if (blk.cwiseAbs().maxCoeff() == 0.0) continue;
      const CMat outer = xi.segment(al * n_, n_).conjugate() * eta.segment(be * n_, n_).transpose();
      for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j)
          if (blk(i, j) != cplx(0.0)) coef.block(i * n_, j * n_, n_, n_) += blk(i, j) * outer;
    }
  sdp::Functional f;
  for (int r = 0; r < d_ * n_; ++r)
    for (int c = 0; c < d_ * n_; ++c) add_choi_term(f.terms, r, c, coef(r, c));
  return f;
}

void MapProgram::require_image(const CMat& a, const CMat& target) {
  require(a.rows() == d_ && a.cols() == d_, "domain element has wrong shape");
  require(target.rows() == n_ && target.cols() == n_, "target has wrong shape");
  for (int p = 0; p < n_; ++p)
    for (int q = 0; q < n_; ++q) {
      std::vector<sdp::Term> terms;
      add_image_terms(terms, a, p, q, 1.0);
      problem_.add_complex_equality(terms, target(p, q));
    }
}

ChoiMatrix MapProgram::extract(const sdp::Solution& sol) const {
  ChoiMatrix m;
  m.d = d_;
  m.n = n_;
  const int dn = d_ * n_;
  const CMat& blk = sol.blocks.at(static_cast<std::size_t>(main_block_));
  if (cp_form_) {
    m.c = blk;
    m.slack1 = blk;
    m.slack2 = blk;
    m.cp_checked = true;
  } else {
    m.c = blk.topRightCorner(dn, dn);
    m.slack1 = blk.topLeftCorner(dn, dn);
    m.slack2 = blk.bottomRightCorner(dn, dn);
  }
  m.cb_checked = sol.status == sdp::Status::optimal;
  return m;
}

// ---------------------------------------------------------------------------

void measure_residuals(SnWitness& w, const OperatorSpaceSpec& v, const std::vector<CMat>& targets) {
  require(static_cast<int>(targets.size()) == v.dim(), "one target per basis element is required");
  w.restriction_residual = 0.0;
  for (int t = 0; t < v.dim(); ++t)
    w.restriction_residual = std::max(w.restriction_residual, spec_norm(ncb::apply(w.choi, v.basis[t]) - targets[t]));
  w.unit_residual = 0.0;
  if (v.u)
    w.unit_residual = spec_norm(ncb::apply(w.choi, v.u_matrix()) - CMat::Identity(w.choi.n, w.choi.n));
}

SnWitness sn_membership(const OperatorSpaceSpec& v, const std::vector<CMat>& targets,
                        const sdp::Settings& settings) {
  require(v.u.has_value(), "S_n(V;u) needs a distinguished element");
  require(static_cast<int>(targets.size()) == v.dim(), "one target per basis element is required");
  const int n = static_cast<int>(targets.front().rows());
  MapProgram prog(v.d, n, false);
  for (int t = 0; t < v.dim(); ++t) prog.require_image(v.basis[t], targets[t]);
  prog.require_image(v.u_matrix(), CMat::Identity(n, n));

  const sdp::Solution sol = sdp::feasibility(prog.problem(), settings);
  SnWitness w;
  w.status = sol.status;
  w.certificate = sol.certificate;
  if (sol.status == sdp::Status::infeasible || sol.blocks.empty()) return w;
  w.choi = prog.extract(sol);
  measure_residuals(w, v, targets);
  w.feasible = sol.status == sdp::Status::optimal && w.restriction_residual <= 1e-7 && w.unit_residual <= 1e-7;
  return w;
}

SnWitness compression_element(const OperatorSpaceSpec& v, const CMat& w) {
  require(v.u.has_value(), "compression needs a distinguished element");
  require((v.u_matrix() - CMat::Identity(v.d, v.d)).cwiseAbs().maxCoeff() <= 1e-9,
          "u must be realized as the identity; apply conjugate_embedding first");
  require(w.rows() == v.d && w.cols() <= v.d, "isometry has wrong shape");
  const auto n = static_cast<int>(w.cols());
  require((w.adjoint() * w - CMat::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-9, "W is not an isometry");
  SnWitness s;
  s.choi = choi_of(v.d, n, [&](const CMat& a) { return CMat(w.adjoint() * a * w); });
  s.choi.slack1 = s.choi.c;
  s.choi.slack2 = s.choi.c;
  s.choi.cp_checked = true;
  s.choi.cb_checked = true;
  std::vector<CMat> targets;
  for (const auto& g : v.basis) targets.push_back(w.adjoint() * g * w);
  measure_residuals(s, v, targets);
  s.feasible = true;
  s.status = sdp::Status::optimal;
  return s;
}

void enforce_unit(ChoiMatrix& phi, const CMat& u) {
  const CMat r = CMat::Identity(phi.n, phi.n) - ncb::apply(phi, u);
  phi.c += kron(u.conjugate() / u.squaredNorm(), r);
}

}  // namespace ncb

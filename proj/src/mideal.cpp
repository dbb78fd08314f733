// SPDX-License-Identifier: Apache-2.0

#include "ncb/mideal.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ncb {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

struct RangeBasis {
  CMat columns;  // independent columns of the map, in V coefficients
  CMat coords;   // coordinates of every image in those columns
};

RangeBasis range_basis(const CMat& map) {
  Eigen::ColPivHouseholderQR<CMat> qr(map);
  qr.setThreshold(1e-10);
  const auto r = qr.rank();
  RangeBasis out;
  out.columns.resize(map.rows(), r);
  for (Eigen::Index j = 0; j < r; ++j) out.columns.col(j) = map.col(qr.colsPermutation().indices()(j));
  if (r == 0) return out;
  out.coords = out.columns.colPivHouseholderQr().solve(map);
  return out;
}

OperatorSpaceSpec subspace(const OperatorSpaceSpec& v, const CMat& columns, const std::string& label,
                           const std::optional<CVec>& u) {
  std::vector<CMat> basis;
  for (Eigen::Index j = 0; j < columns.cols(); ++j) basis.push_back(v.realize(columns.col(j)));
  return compress_to_support(make_space(label, std::move(basis), u));
}

int complex_rank(const CMat& a, double tol = 1e-10) {
  if (a.cols() == 0) return 0;
  const RVec s = Eigen::JacobiSVD<CMat>(a).singularValues();
  int r = 0;
  while (r < s.size() && s(r) > tol * std::max(1.0, s(0))) ++r;
  return r;
}

}  // namespace

CMat trailing_projection(int m, int w) {
  require(w >= 0 && w <= m, "summand larger than the space");
  CMat p = CMat::Zero(m, m);
  p.bottomRightCorner(w, w).setIdentity();
  return p;
}

MProjectionReport verify_complete_m_projection(const OperatorSpaceSpec& v, const CMat& p, int k_max, int samples,
                                               std::uint64_t seed, double tol) {
  const int m = v.dim();
  require(p.rows() == m && p.cols() == m, "projection has wrong shape");
  require((p * p - p).cwiseAbs().maxCoeff() <= 1e-10, "P is not idempotent");
  const CMat ip = CMat::Identity(m, m) - p;

  MProjectionReport rep;
  rep.projection.p = p;
  rep.projection.samples_per_level = samples;
  Rng rng = seeded_rng(seed, {0x3e1du});
  for (int k = 1; k <= k_max; ++k) {
    for (int s = 0; s < samples; ++s) {
      const LevelElement x = random_unit_element(v, k, rng);
      const double split = std::max(level_norm(v, map_coeffs(p, x)), level_norm(v, map_coeffs(ip, x)));
      const double res = std::abs(level_norm(v, x) - split);
      if (res > rep.worst_residual || !rep.worst) {
        rep.worst_residual = res;
        rep.worst = x;
      }
    }
    if (rep.worst_residual > tol) break;
    rep.projection.verified_levels = k;
  }
  rep.projection.max_residual = rep.worst_residual;
  rep.verified = rep.worst_residual <= tol;
  return rep;
}

QuotientSpace quotient_by_msummand(const OperatorSpaceSpec& v, const MProjection& mp) {
  const int m = v.dim();
  const CMat ip = CMat::Identity(m, m) - mp.p;
  const RangeBasis rb = range_basis(ip);
  if (rb.columns.cols() == 0) throw ContractViolation("quotient is zero");
  QuotientSpace qs;
  qs.lift = rb.columns;
  qs.q = rb.coords;
  std::optional<CVec> u;
  if (v.u) u = CVec(qs.q * *v.u);
  qs.z = subspace(v, rb.columns, v.label + " / W", u);
  return qs;
}

LevelElement apply_quotient(const QuotientSpace& qs, const LevelElement& x) { return map_coeffs(qs.q, x); }

QuotientUnitalityReport check_quotient_unitality(const OperatorSpaceSpec& v, const MProjection& mp,
                                                 const QuotientUnitalityOptions& opts) {
  require(v.u.has_value(), "the unit v must be given");
  const CVec& vu = *v.u;
  require(std::abs(level_norm(v, LevelElement::scalar(vu)) - 1.0) <= 1e-8, "v must have norm one");
  const int m = v.dim();
  const QuotientSpace qs = quotient_by_msummand(v, mp);
  const CVec uz = qs.q * vu;
  const CVec u_part = (CMat::Identity(m, m) - mp.p) * vu;
  const CVec w_part = mp.p * vu;

  QuotientUnitalityReport rep;
  rep.q_norm = level_norm(qs.z, LevelElement::scalar(uz));
  rep.u_norm = level_norm(v, LevelElement::scalar(u_part));
  rep.w_norm = level_norm(v, LevelElement::scalar(w_part));
  const bool q_unit = std::abs(rep.q_norm - 1.0) <= 1e-8;
  const bool parts_unit = q_unit && std::abs(rep.w_norm - 1.0) <= 1e-8;

  rep.ncb_v = ncb_estimate(v, opts.ncb);
  if (q_unit) rep.ncb_quotient = ncb_estimate(qs.z, opts.ncb);
  rep.theorem_alarm = rep.ncb_v.kind == EstimateKind::exact && rep.ncb_v.value > 1e-6 && !parts_unit;

  NormedSpaceSpec zn = make_matrix_realized(qs.z);
  if (!parts_unit && rep.w_norm > 1e-12) {
    const RangeBasis wb = range_basis(mp.p);
    const OperatorSpaceSpec ws = subspace(v, wb.columns, v.label + " W", std::nullopt);
    rep.degeneracy = check_gu_sum(zn, make_matrix_realized(ws), uz, CVec(wb.coords * vu), 20, opts.seed);
  }

  Rng rng = seeded_rng(opts.seed, {0x51a1u});
  if (q_unit) {
    rep.f = gamma_classic(zn, uz, uz).witness.f;
    const CMat psi = qs.lift + w_part * rep.f.transpose();
    rep.psi_unit_error = (psi * uz - vu).norm();
    for (int s = 0; s < opts.samples; ++s) {
      const LevelElement x = random_unit_element(qs.z, 1 + s % 2, rng);
      rep.psi_max_error = std::max(rep.psi_max_error, std::abs(level_norm(v, map_coeffs(psi, x)) - 1.0));
      ++rep.psi_samples;
    }
  }
  for (int s = 0; s < opts.samples; ++s) {
    const LevelElement x = random_unit_element(v, 1 + s % 2, rng);
    rep.quotient_excess = std::max(rep.quotient_excess, level_norm(qs.z, apply_quotient(qs, x)) - 1.0);
  }

  bool ncb_order = true;
  if (q_unit && rep.ncb_v.kind == EstimateKind::exact && rep.ncb_quotient.kind == EstimateKind::exact)
    ncb_order = rep.ncb_v.value <= rep.ncb_quotient.value + 1e-9;
  rep.passed = q_unit && !rep.theorem_alarm && ncb_order && rep.psi_max_error <= 1e-6 &&
               rep.psi_unit_error <= 1e-9 && rep.quotient_excess <= 1e-9 &&
               (!rep.degeneracy || rep.degeneracy->passed);
  return rep;
}

QuotientOssysReport check_quotient_ossys(const OperatorSpaceSpec& v, const MProjection& mp, int samples,
                                         std::uint64_t seed, const NcbOptions& ncb, const ConeOptions& cone) {
  QuotientOssysReport rep;
  rep.source = check_operator_system(v, ncb);
  const QuotientSpace qs = quotient_by_msummand(v, mp);
  rep.quotient = check_operator_system(qs.z, ncb);

  const WitnessFamily fam = sn_family(v);
  const auto& basis = rep.source.cone_basis;
  rep.images_exact = has_unitary_realization(qs.z);
  rep.min_image_margin = std::numeric_limits<double>::infinity();
  Rng rng = seeded_rng(seed, {0xc0feu});
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int s = 0; s < samples && !basis.empty(); ++s) {
    // self-adjoint part plus enough of v to be positive on the compression
    CVec c = CVec::Zero(v.dim());
    for (const auto& b : basis) c += gauss(rng) * b;
    const CMat hc = herm_part(fam.left.adjoint() * v.realize(c) * fam.right);
    const double lmin = herm_eigenvalues(hc)(hc.rows() - 1);
    c += (-lmin + 0.2 * std::abs(gauss(rng))) * *v.u;
    LevelElement x = LevelElement::scalar(c);
    x = scaled(x, 1.0 / level_norm(v, x));
    const LevelElement qx = apply_quotient(qs, x);
    const ConeVerdict verdict =
        rep.images_exact ? cone_membership_exact(qs.z, qx) : cone_membership_sampled(qs.z, qx, cone);
    rep.min_image_margin = std::min(rep.min_image_margin, verdict.margin);
    ++rep.cone_samples;
  }
  rep.containment_ok = rep.cone_samples > 0 && rep.min_image_margin >= (rep.images_exact ? -1e-8 : -1e-6);

  CMat images(qs.z.dim(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) images.col(static_cast<Eigen::Index>(j)) = qs.q * basis[j];
  rep.image_span_dim = complex_rank(images);
  rep.span_ok = rep.image_span_dim == qs.z.dim();
  rep.passed = rep.source.passed && rep.quotient.passed && rep.containment_ok && rep.span_ok;
  return rep;
}

}  // namespace ncb

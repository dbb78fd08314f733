#include "doctest.h"

#include <cmath>

#include "ncb/mideal.hpp"

using namespace ncb;

namespace {

std::vector<CMat> full_basis(int d) {
  std::vector<CMat> b;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) b.push_back(matrix_unit(d, i, j));
  return b;
}

OperatorSpaceSpec m2(const CMat& u) {
  return make_space("M2", full_basis(2), CVec(u.reshaped<Eigen::RowMajor>()));
}

OperatorSpaceSpec two_blocks(const CMat& a, const CMat& b) { return direct_sum_inf(m2(a), m2(b)); }

}  // namespace

TEST_CASE("complete M-projection verification") {
  const auto v = two_blocks(CMat::Identity(2, 2), CMat::Identity(2, 2));
  const MProjectionReport ok = verify_complete_m_projection(v, trailing_projection(8, 4), 3, 40);
  CHECK(ok.verified);
  CHECK(ok.projection.verified_levels == 3);
  CHECK(ok.worst_residual <= 1e-10);

  const MProjectionReport id = verify_complete_m_projection(v, CMat::Identity(8, 8), 2, 10);
  CHECK(id.verified);
  CHECK(id.worst_residual <= 1e-12);

  // span{E11} along span{E12, E21, E22} in M_2
  const auto plain = m2(CMat::Identity(2, 2));
  CMat p = CMat::Zero(4, 4);
  p(0, 0) = 1.0;
  const MProjectionReport bad = verify_complete_m_projection(plain, p, 2, 20);
  CHECK_FALSE(bad.verified);
  CHECK(bad.projection.verified_levels == 0);
  REQUIRE(bad.worst.has_value());
  // E11 + E12: ‖x‖ = √2 against max(1, 1)
  CVec e = CVec::Zero(4);
  e(0) = e(1) = 1.0;
  const LevelElement x = LevelElement::scalar(e);
  CHECK(level_norm(plain, x) == doctest::Approx(std::sqrt(2.0)));
  CHECK(level_norm(plain, map_coeffs(p, x)) == doctest::Approx(1.0));
  CHECK(level_norm(plain, map_coeffs(CMat::Identity(4, 4) - p, x)) == doctest::Approx(1.0));

  CMat nilpotent = CMat::Zero(8, 8);
  nilpotent(0, 1) = 1.0;
  CHECK_THROWS_AS(verify_complete_m_projection(v, nilpotent), ContractViolation);
}

TEST_CASE("quotient by a summand") {
  Rng rng(83);
  const auto v = two_blocks(CMat::Identity(2, 2), CMat::Identity(2, 2));
  const MProjection mp = verify_complete_m_projection(v, trailing_projection(8, 4), 2, 20).projection;
  const QuotientSpace qs = quotient_by_msummand(v, mp);
  CHECK(qs.z.dim() == 4);
  CHECK(qs.z.d == 2);
  CHECK(has_unitary_realization(qs.z));
  for (int trial = 0; trial < 10; ++trial) {
    const int k = 1 + trial % 3;
    const LevelElement x = random_unit_element(v, k, rng);
    const double q = level_norm(qs.z, apply_quotient(qs, x));
    CHECK(std::abs(q - level_norm(v, map_coeffs(CMat::Identity(8, 8) - mp.p, x))) <= 1e-10);
    CHECK(q <= 1.0 + 1e-10);
  }
  MProjection all = mp;
  all.p = CMat::Identity(8, 8);
  CHECK_THROWS_AS(quotient_by_msummand(v, all), ContractViolation);
}

TEST_CASE("quotient unitality") {
  QuotientUnitalityOptions opts;
  opts.samples = 40;
  const auto v = two_blocks(CMat::Identity(2, 2), CMat::Identity(2, 2));
  const MProjection mp{trailing_projection(8, 4), 3, 40, 0.0};
  const QuotientUnitalityReport r = check_quotient_unitality(v, mp, opts);
  CHECK(r.passed);
  CHECK(std::abs(r.q_norm - 1.0) <= 1e-8);
  CHECK(r.ncb_v.kind == EstimateKind::exact);
  CHECK(r.ncb_quotient.kind == EstimateKind::exact);
  CHECK(r.psi_max_error <= 1e-6);
  CHECK(r.psi_unit_error <= 1e-9);
  CHECK(r.quotient_excess <= 1e-9);
  CHECK_FALSE(r.degeneracy.has_value());

  // unitary parts
  Rng rng(89);
  const auto vu = two_blocks(random_unitary(2, rng), random_unitary(2, rng));
  const QuotientUnitalityReport ru = check_quotient_unitality(vu, mp, opts);
  CHECK(ru.passed);
  CHECK(std::abs(ru.q_norm - 1.0) <= 1e-8);

  // a short second part: classical degeneracy, so n_cb(V; v) = 0
  QuotientUnitalityOptions quick = opts;
  quick.ncb.k_max = 1;
  quick.ncb.sphere_restarts = 1;
  quick.ncb.descent_steps = 1;
  auto vs = two_blocks(CMat::Identity(2, 2), CMat::Identity(2, 2));
  vs.u->tail(4) *= 0.5;
  const QuotientUnitalityReport rs = check_quotient_unitality(vs, mp, quick);
  CHECK(std::abs(rs.w_norm - 0.5) <= 1e-12);
  CHECK_FALSE(rs.theorem_alarm);
  REQUIRE(rs.degeneracy.has_value());
  CHECK(rs.degeneracy->degeneracy_expected);
  CHECK(rs.degeneracy->min_gamma <= 1e-9);
  CHECK(rs.psi_max_error <= 1e-6);
  CHECK(rs.passed);
}

TEST_CASE("quotient of an operator system") {
  const auto v = two_blocks(CMat::Identity(2, 2), CMat::Identity(2, 2));
  const MProjection mp{trailing_projection(8, 4), 3, 40, 0.0};
  const QuotientOssysReport r = check_quotient_ossys(v, mp, 30);
  CHECK(r.source.passed);
  CHECK(r.quotient.passed);
  CHECK(r.images_exact);
  CHECK(r.cone_samples == 30);
  CHECK(r.min_image_margin >= -1e-8);
  CHECK(r.span_ok);
  CHECK(r.image_span_dim == 4);
  CHECK(r.passed);
}

#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ncb/ossys.hpp"

using namespace ncb;

namespace {

std::vector<CMat> full_basis(int d) {
  std::vector<CMat> b;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) b.push_back(matrix_unit(d, i, j));
  return b;
}

CVec identity_coeffs(int d) {
  CVec c = CVec::Zero(d * d);
  for (int i = 0; i < d; ++i) c(i * d + i) = 1.0;
  return c;
}

OperatorSpaceSpec m2() { return make_space("M2", full_basis(2), identity_coeffs(2)); }

LevelElement element_of(const OperatorSpaceSpec& v, const CMat& a) {
  return level_element_of(v, static_cast<int>(a.rows()) / v.d, a);
}

ConeOptions quick_cone() {
  ConeOptions o;
  o.n_max = 2;
  o.restarts = 3;
  return o;
}

// Diagonal-only cones on M_2: level 1 spanned by E11, E22; level 2 by E_ii ⊗ E_jj.
ConeSpec diagonal_cones(const OperatorSpaceSpec& v) {
  ConeSpec c;
  c.label = "diag";
  c.kind = ConeSpec::Kind::generators;
  c.declared_levels = 2;
  c.generators.resize(2);
  for (int j = 0; j < 2; ++j) c.generators[0].push_back(element_of(v, matrix_unit(2, j, j)));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c.generators[1].push_back(element_of(v, kron(matrix_unit(2, i, i), matrix_unit(2, j, j))));
  return c;
}

}  // namespace

TEST_CASE("psd margin") {
  CHECK(psd_margin(CMat::Identity(2, 2)) == doctest::Approx(1.0));
  CMat a = CMat::Identity(2, 2);
  a(0, 0) = -0.3;
  CHECK(psd_margin(a) == doctest::Approx(-0.3));
  CHECK(psd_margin(matrix_unit(2, 0, 1)) == doctest::Approx(-0.5));
  CMat skew = CMat::Identity(2, 2) * cplx(1.0, 0.2);
  CHECK(psd_margin(skew) == doctest::Approx(-0.2));
}

TEST_CASE("exact cone membership examples") {
  const auto v = m2();
  CHECK(cone_membership_exact(v, element_of(v, matrix_unit(2, 0, 0))).member);
  CHECK_FALSE(cone_membership_exact(v, element_of(v, matrix_unit(2, 0, 1))).member);

  CMat u = CMat::Zero(2, 2);
  u(0, 0) = 1.0;
  u(1, 1) = std::polar(1.0, std::numbers::pi / 3);
  const auto twisted = make_space("M2 twisted", full_basis(2), CVec(u.reshaped<Eigen::RowMajor>()));
  CMat d12 = CMat::Zero(2, 2);
  d12(0, 0) = 1.0;
  d12(1, 1) = 2.0;
  const ConeVerdict t = cone_membership_exact(twisted, element_of(twisted, u * d12));
  CHECK(t.member);
  CHECK(t.margin == doctest::Approx(1.0));
  CHECK_FALSE(cone_membership_exact(twisted, element_of(twisted, d12)).member);

  CVec tilt = CVec::Zero(4);
  tilt(0) = 1.0;
  tilt(3) = 0.5;
  const auto nonunitary = make_space("M2 tilted", full_basis(2), tilt);
  CHECK_THROWS_AS(cone_membership_exact(nonunitary, element_of(nonunitary, d12)), ContractViolation);
}

TEST_CASE("sampled membership agrees with the exact test") {
  Rng rng(71);
  const auto v2 = m2();
  const auto v3 = make_space("M3", full_basis(3), identity_coeffs(3));
  int members = 0;
  int violations = 0;
  for (int trial = 0; trial < 16; ++trial) {
    const auto& v = trial < 8 ? v2 : v3;
    const int k = 1 + trial % 2;
    const int n = v.d * k;
    const CMat h = random_hermitian(n, rng);
    const double shift = -herm_eigenvalues(h)(n - 1) + (trial % 4 < 2 ? 0.2 : -0.2);
    const CMat a = h + shift * CMat::Identity(n, n);
    const LevelElement x = element_of(v, a);
    const ConeVerdict exact = cone_membership_exact(v, x);
    const ConeVerdict sampled = cone_membership_sampled(v, x, quick_cone());
    if (exact.member) {
      ++members;
      CHECK(sampled.member);
      CHECK(sampled.margin >= -1e-6);
    } else {
      ++violations;
      CHECK_FALSE(sampled.member);
      CHECK(sampled.margin <= -1e-4);
      // unital CP compressions never go below λ_min
      CHECK(sampled.margin >= exact.margin - 1e-6);
      REQUIRE(sampled.witness.has_value());
      CHECK(psd_margin(ncb::apply(*sampled.witness, a)) <= -1e-4);
    }
  }
  CHECK(members > 0);
  CHECK(violations > 0);

  CMat a = CMat::Identity(3, 3);
  a(2, 2) = -0.3;
  const ConeVerdict s3 = cone_membership_sampled(v3, element_of(v3, a), quick_cone());
  CHECK(std::abs(s3.margin + 0.3) <= 1e-6);

  const ConeVerdict e12 = cone_membership_sampled(v2, element_of(v2, matrix_unit(2, 0, 1)), quick_cone());
  CHECK_FALSE(e12.member);
  CHECK(e12.level_n == 1);
}

TEST_CASE("exact cone is closed under nonnegative combinations") {
  Rng rng(73);
  const auto v = m2();
  for (int trial = 0; trial < 10; ++trial) {
    const CMat g1 = random_ginibre(4, 4, rng);
    const CMat g2 = random_ginibre(4, 4, rng);
    const CMat p1 = g1 * g1.adjoint();
    const CMat p2 = g2 * g2.adjoint();
    const LevelElement x = element_of(v, 0.3 * p1 + 1.7 * p2);
    CHECK(cone_membership_exact(v, x).member);
  }
}

TEST_CASE("operator system characterization") {
  const OperatorSystemReport full = check_operator_system(m2());
  CHECK(full.passed);
  CHECK(full.self_adjoint_dim == 4);

  std::vector<CMat> diag;
  for (int i = 0; i < 3; ++i) diag.push_back(matrix_unit(3, i, i));
  const OperatorSystemReport d3 = check_operator_system(make_space("diag3", diag, CVec::Ones(3)));
  CHECK(d3.passed);
  CHECK(d3.cone_basis.size() == 3);

  CVec u(2);
  u << 1.0, 0.0;
  const OperatorSystemReport ie = check_operator_system(
      make_space("span{I,E12}", {CMat::Identity(2, 2), matrix_unit(2, 0, 1)}, u));
  CHECK_FALSE(ie.passed);
  CHECK_FALSE(ie.span_ok);
  CHECK(ie.self_adjoint_dim == 1);
  // aI + bE12 is Hermitian only for b = 0 and real a
  REQUIRE(ie.cone_basis.size() == 1);
  CHECK(std::abs(ie.cone_basis[0](1)) <= 1e-12);
  CHECK(std::abs(ie.cone_basis[0](0).imag()) <= 1e-12);

  CMat traceless = matrix_unit(2, 0, 0) - matrix_unit(2, 1, 1);
  CVec u4 = CVec::Zero(4);
  u4(0) = 1.0;
  const OperatorSystemReport aug = check_operator_system(make_space(
      "span{I,E12,E21,E11-E22}", {CMat::Identity(2, 2), matrix_unit(2, 0, 1), matrix_unit(2, 1, 0), traceless}, u4));
  CHECK(aug.passed);
}

TEST_CASE("S_n^+ membership") {
  const auto v = m2();
  const ConeSpec psd = psd_cones(v, 2);
  CHECK(splus_membership(v, psd, v.basis).feasible);

  std::vector<CMat> tr;
  for (const auto& g : v.basis) tr.push_back(g.transpose());
  const SnWitness t = splus_membership(v, psd, tr);
  CHECK_FALSE(t.feasible);
  CHECK(t.status == sdp::Status::infeasible);

  std::vector<CMat> state;
  for (const auto& g : v.basis) state.push_back(CMat::Constant(1, 1, g.trace() / 2.0));
  CHECK(splus_membership(v, psd, state).feasible);

  // the identity is positive on diagonal cones and contractive
  CHECK(splus_membership(v, diagonal_cones(v), v.basis).feasible);
  CHECK_FALSE(splus_membership(v, diagonal_cones(v), tr).feasible);
}

TEST_CASE("cone validation") {
  const auto v = m2();
  ConeSpec bad = diagonal_cones(v);
  bad.generators[0].push_back(scaled(bad.generators[0][0], -1.0));
  CHECK_THROWS_AS(validate(v, bad), ContractViolation);
  const auto line = make_space("span E12", {matrix_unit(2, 0, 1)});
  CHECK_THROWS_AS(psd_cones(line, 1), ContractViolation);
}

TEST_CASE("K_n with psd cones and n_cb^+") {
  const auto v = m2();
  const ConeSpec psd = psd_cones(v, 2);
  Rng rng(79);
  const CMat g = random_ginibre(4, 4, rng);
  CHECK(k_n_outer(v, psd, element_of(v, g * g.adjoint()), quick_cone()).member);
  CMat a = CMat::Identity(4, 4);
  a(3, 3) = -0.25;
  const ConeVerdict neg = k_n_outer(v, psd, element_of(v, a), quick_cone());
  CHECK_FALSE(neg.member);
  CHECK(neg.margin <= -0.25 + 1e-6);

  NcbOptions opts;
  opts.n_max = 2;
  opts.sphere_restarts = 2;
  opts.descent_steps = 1;
  opts.gamma.restarts = 3;
  CHECK(ncb_plus_estimate(v, psd, opts).value >= 0.999);
}

TEST_CASE("non-unital operator system checks") {
  const auto v = m2();
  NonunitalOptions opts;
  opts.ncb.n_max = 2;
  opts.ncb.sphere_restarts = 2;
  opts.ncb.descent_steps = 1;
  opts.ncb.gamma.restarts = 3;
  opts.cone = quick_cone();

  const NonunitalReport psd = check_nonunital_ossys(v, psd_cones(v, 2), opts);
  CHECK(psd.passed);
  CHECK(psd.generators_in_k);
  CHECK_FALSE(psd.counterexample.has_value());

  const ConeSpec diag = diagonal_cones(v);
  const NonunitalReport shrunk = check_nonunital_ossys(v, diag, opts);
  CHECK_FALSE(shrunk.passed);
  CHECK(shrunk.generators_in_k);
  REQUIRE(shrunk.counterexample.has_value());
  CHECK(shrunk.counterexample_distance > 1e-3);
  CHECK(shrunk.counterexample_margin >= -1e-6);

  // J ⊗ E11 is in K_2 for every map positive on E11, but not diagonal
  LevelElement j = LevelElement::zero(2, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) j.at(a, b)(0) = 1.0;
  CHECK_FALSE(declared_cone_contains(v, diag, j).inside);
  CHECK(k_n_outer(v, diag, j, quick_cone()).member);

  // a positive off-diagonal element is cut at level 1 by the contractive
  // functional x ↦ −(x_12 + x_21)/2, which vanishes on E11 and E22
  CMat half = CMat::Identity(2, 2);
  half(0, 1) = half(1, 0) = 0.5;
  const ConeVerdict cut = k_n_outer(v, diag, element_of(v, half), quick_cone());
  CHECK_FALSE(cut.member);
  CHECK(cut.margin <= -0.5 + 1e-4);
}

#include "doctest.h"

#include <cmath>

#include "ncb/cbmap.hpp"

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

// Local ascent for max ‖φ_k(x)‖ over the unit ball of M_k(M_d): alternate the
// top singular pair (ξ, η) of φ_k(x) with the maximizer of Re<ξ, φ_k(x) η>,
// which is the unitary polar factor of the dual matrix B, B_ba = <ξ, φ_k(E_ab) η>.
double brute_force_amplified_norm(const ChoiMatrix& phi, int k, int starts, Rng& rng) {
  const int kd = k * phi.d;
  std::vector<CMat> images;
  for (int a = 0; a < kd; ++a)
    for (int b = 0; b < kd; ++b) images.push_back(ncb::apply(phi, matrix_unit(kd, a, b)));
  double best = 0.0;
  for (int s = 0; s < starts; ++s) {
    CMat x = random_unitary(kd, rng);
    double val = 0.0;
    for (int it = 0; it < 200; ++it) {
      const SingularPair sp = top_singular_pair(ncb::apply(phi, x));
      CMat bmat(kd, kd);
      for (int a = 0; a < kd; ++a)
        for (int b = 0; b < kd; ++b) bmat(b, a) = sp.left.dot(images[a * kd + b] * sp.right);
      Eigen::JacobiSVD<CMat> svd(bmat, Eigen::ComputeFullU | Eigen::ComputeFullV);
      x = svd.matrixV() * svd.matrixU().adjoint();
      const double next = spec_norm(ncb::apply(phi, x));
      if (next <= val + 1e-13) break;
      val = next;
    }
    best = std::max(best, val);
  }
  return best;
}

ChoiMatrix random_map(int d, int n, Rng& rng) {
  const CMat a = random_ginibre(d * n, d * n, rng);
  ChoiMatrix m;
  m.d = d;
  m.n = n;
  m.c = a / spec_norm(a);
  return m;
}

}  // namespace

TEST_CASE("apply: identity, trace, amplification") {
  Rng rng(3);
  const CMat a = random_ginibre(2, 2, rng);
  CHECK((ncb::apply(identity_map(2), a) - a).norm() <= 1e-15);
  CHECK(ncb::apply(trace_map(2), matrix_unit(2, 0, 0))(0, 0) == cplx(1.0));
  const CMat a2 = random_ginibre(4, 4, rng);
  CHECK((ncb::apply(identity_map(2), a2) - a2).norm() <= 1e-14);
  CHECK_THROWS_AS(ncb::apply(identity_map(2), CMat::Zero(3, 3)), ContractViolation);
}

TEST_CASE("Choi round trip") {
  Rng rng(5);
  const ChoiMatrix m = random_map(3, 2, rng);
  const ChoiMatrix again = choi_of(3, 2, [&](const CMat& a) { return ncb::apply(m, a); });
  CHECK((again.c - m.c).norm() <= 1e-14);
}

TEST_CASE("complete positivity") {
  CHECK(is_cp(identity_map(3)));
  const ChoiMatrix t = transpose_map(2);
  CHECK_FALSE(is_cp(t));
  CHECK(herm_eigenvalues(t.c)(3) == doctest::Approx(-1.0));
  CHECK(is_cp(choi_of(3, 3, [](const CMat& a) { return CMat(a.diagonal().asDiagonal()); })));
}

TEST_CASE("cb norm calibration") {
  for (int d = 1; d <= 4; ++d) {
    const CbNormResult r = cb_norm(identity_map(d));
    REQUIRE(r.verified);
    CHECK(std::abs(r.value - 1.0) <= 1e-6);
  }
  ChoiMatrix three = identity_map(2);
  three.c *= 3.0;
  CHECK(std::abs(cb_norm(three).value - 3.0) <= 1e-6);

  const CbNormResult tr = cb_norm(transpose_map(2));
  CHECK(std::abs(tr.value - 2.0) <= 1e-6);
  Rng rng(7);
  const double brute = brute_force_amplified_norm(transpose_map(2), 2, 10, rng);
  CHECK(std::abs(brute - 2.0) <= 1e-3);
  // the level-1 norm of the transpose is 1; the gap needs the amplification
  CHECK(brute_force_amplified_norm(transpose_map(2), 1, 10, rng) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("cb norm witness corners are feasible") {
  Rng rng(9);
  const ChoiMatrix m = random_map(2, 3, rng);
  const CbNormResult r = cb_norm(m);
  REQUIRE(r.verified);
  const int dn = 6;
  CMat big(2 * dn, 2 * dn);
  big << *r.witness.slack1, m.c, m.c.adjoint(), *r.witness.slack2;
  CHECK(psd_check(herm_part(big), 1e-7).psd);
  const CMat p1 = partial_trace(*r.witness.slack1, 2, 3, TraceSide::first);
  CHECK(herm_eigenvalues(herm_part(p1))(0) <= r.value + 1e-6);
}

TEST_CASE("cb norm is unitarily invariant") {
  Rng rng(11);
  for (int trial = 0; trial < 4; ++trial) {
    const ChoiMatrix m = random_map(2, 2, rng);
    const CMat ud = random_unitary(2, rng);
    const CMat un = random_unitary(2, rng);
    const ChoiMatrix conj = choi_of(2, 2, [&](const CMat& a) {
      return CMat(un * ncb::apply(m, ud * a * ud.adjoint()) * un.adjoint());
    });
    CHECK(std::abs(cb_norm(m).value - cb_norm(conj).value) <= 1e-6);
  }
}

TEST_CASE("cb norm is attained at amplification level n") {
  Rng rng(13);
  for (int trial = 0; trial < 6; ++trial) {
    const int d = 1 + trial % 3;
    const int n = 1 + (trial / 2) % 3;
    const ChoiMatrix m = random_map(d, n, rng);
    const double sdp_value = cb_norm(m).value;
    const double brute = brute_force_amplified_norm(m, n, 12, rng);
    CHECK(brute <= sdp_value + 1e-6);
    CHECK(std::abs(brute - sdp_value) <= 1e-3);
  }
}

TEST_CASE("S_n membership examples") {
  const auto m2 = make_space("M2", full_basis(2), identity_coeffs(2));
  {
    const SnWitness w = sn_membership(m2, m2.basis);
    CHECK(w.feasible);
    CHECK(w.restriction_residual <= 1e-7);
    CHECK(w.unit_residual <= 1e-7);
  }
  {
    CVec u(1);
    u << 1.0;
    CMat g = CMat::Zero(2, 2);
    g(0, 0) = 1.0;
    g(1, 1) = 0.5;
    const auto line = make_space("span diag(1,1/2)", {g}, u);
    const SnWitness w = sn_membership(line, {CMat::Identity(1, 1)});
    CHECK(w.feasible);
    // the rank-one functional a·u ↦ a is completely contractive: level-2 check
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      const LevelElement x = random_unit_element(line, 2, rng);
      CHECK(spec_norm(ncb::apply(w.choi, line, x)) <= level_norm(line, x) + 1e-6);
    }
  }
  {
    std::vector<CMat> targets = m2.basis;
    targets[1] = 2.0 * matrix_unit(2, 0, 1);
    const SnWitness w = sn_membership(m2, targets);
    CHECK_FALSE(w.feasible);
    CHECK(w.status == sdp::Status::infeasible);
    CHECK(w.certificate.has_value());
    // the forced extension has cb norm above 1
    const ChoiMatrix forced = choi_of(2, 2, [&](const CMat& a) {
      CMat r = a;
      r(0, 1) *= 2.0;
      return r;
    });
    CHECK(cb_norm(forced).value > 1.0 + 1e-3);
  }
}

TEST_CASE("compression elements") {
  const auto m2 = make_space("M2", full_basis(2), identity_coeffs(2));
  const SnWitness id = compression_element(m2, CMat::Identity(2, 2));
  CHECK((id.choi.c - identity_map(2).c).norm() <= 1e-15);

  const SnWitness state = compression_element(m2, CMat::Identity(2, 1));
  Rng rng(19);
  const CMat a = random_ginibre(2, 2, rng);
  CHECK(std::abs(ncb::apply(state.choi, a)(0, 0) - a(0, 0)) <= 1e-15);

  const auto m3 = make_space("M3", full_basis(3), identity_coeffs(3));
  const CMat w = random_isometry(3, 2, rng);
  const SnWitness comp = compression_element(m3, w);
  CHECK(comp.unit_residual <= 1e-12);
  std::vector<CMat> targets;
  for (const auto& g : m3.basis) targets.push_back(w.adjoint() * g * w);
  CHECK(sn_membership(m3, targets).feasible);

  CHECK_THROWS_AS(compression_element(m3, CMat::Ones(3, 2)), ContractViolation);
}

TEST_CASE("witnesses restrict to subspaces and are cb contractive") {
  const auto m2 = make_space("M2", full_basis(2), identity_coeffs(2));
  Rng rng(23);
  const CMat w = random_isometry(2, 2, rng);
  std::vector<CMat> targets;
  for (const auto& g : m2.basis) targets.push_back(w.adjoint() * g * w);
  SnWitness big = sn_membership(m2, targets);
  REQUIRE(big.feasible);

  CVec u(2);
  u << 1.0, 0.0;
  const auto sub = make_space("span{I, E12}", {CMat::Identity(2, 2), matrix_unit(2, 0, 1)}, u);
  SnWitness small = big;
  measure_residuals(small, sub, {w.adjoint() * sub.basis[0] * w, w.adjoint() * sub.basis[1] * w});
  CHECK(small.restriction_residual <= big.restriction_residual + 1e-15);
  CHECK(small.unit_residual == doctest::Approx(big.unit_residual).epsilon(1e-12));

  for (int k = 1; k <= 3; ++k)
    for (int trial = 0; trial < 5; ++trial) {
      const LevelElement x = random_unit_element(m2, k, rng);
      CHECK(spec_norm(ncb::apply(big.choi, m2, x)) <= level_norm(m2, x) + 1e-6);
    }
}

TEST_CASE("enforce_unit fixes the unit exactly") {
  Rng rng(29);
  ChoiMatrix m = random_map(2, 3, rng);
  const CMat u = random_unitary(2, rng);
  enforce_unit(m, u);
  CHECK((ncb::apply(m, u) - CMat::Identity(3, 3)).norm() <= 1e-14);
}

#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ncb/banach.hpp"

using namespace ncb;

namespace {

CVec vec(std::initializer_list<cplx> xs) {
  CVec v(static_cast<int>(xs.size()));
  int i = 0;
  for (auto x : xs) v(i++) = x;
  return v;
}

NormedSpaceSpec matrix_space(const CVec& u) {
  std::vector<CMat> b;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) b.push_back(matrix_unit(2, i, j));
  NormedSpaceSpec x = make_matrix_realized(make_space("M2", b, u));
  x.u = u;
  return x;
}

CVec id2() { return vec({1.0, 0.0, 0.0, 1.0}); }

CVec random_coeffs(int m, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVec c(m);
  for (int i = 0; i < m; ++i) c(i) = cplx(g(rng), g(rng));
  return c;
}

// max_θ λ_max(Re(e^{-iθ} A)) on a dense grid.
double numerical_radius_grid(const CMat& a) {
  double best = 0.0;
  constexpr int kSteps = 8192;
  for (int j = 0; j < kSteps; ++j) {
    const double t = 2.0 * std::numbers::pi * j / kSteps;
    best = std::max(best, herm_eigenvalues(herm_part(std::polar(1.0, -t) * a))(0));
  }
  return best;
}

}  // namespace

TEST_CASE("gamma on M_2 with u = I is the numerical radius") {
  const NormedSpaceSpec x = matrix_space(id2());
  CHECK(std::abs(gamma_classic(x, vec({0.0, 1.0, 0.0, 0.0})).value - 0.5) <= 1e-9);
  Rng rng(51);
  for (int trial = 0; trial < 5; ++trial) {
    const CVec z = random_coeffs(4, rng);
    const ClassicGamma g = gamma_classic(x, z);
    CHECK(std::abs(g.value - numerical_radius_grid(x.space->realize(z))) <= 1e-6);
    REQUIRE(g.witness.trace_class.has_value());
    CHECK(trace_norm(*g.witness.trace_class) <= 1.0 + 1e-9);
    CHECK(std::abs(g.witness.value_at_u - 1.0) <= 1e-9);
    CHECK(std::abs(std::abs(apply_functional(g.witness.f, z)) - g.value) <= 1e-12);
  }
}

// Extreme points of {F : ‖F‖_1 ≤ 1, Tr(F u) = 1} are a (u a)* with
// ‖a‖ = ‖u a‖ = 1, so h(z) = sup Re <u a, z a> over those a.
TEST_CASE("face support against the rank-one description of the face") {
  Rng rng(53);
  for (int trial = 0; trial < 4; ++trial) {
    const CVec z = random_coeffs(4, rng);
    const CMat zm = matrix_space(id2()).space->realize(z);
    // u = I: every unit a, sup = λ_max(Re z)
    CHECK(std::abs(face_support(matrix_space(id2()), id2(), z) - herm_eigenvalues(herm_part(zm))(0)) <= 1e-12);
    // u = diag(1, 1/2): a = e_1 only
    const CVec tilt = vec({1.0, 0.0, 0.0, 0.5});
    CHECK(std::abs(face_support(matrix_space(tilt), tilt, z) - zm(0, 0).real()) <= 1e-12);
    // u = E_12: a = e_2, u a = e_1
    const CVec e12 = vec({0.0, 1.0, 0.0, 0.0});
    CHECK(std::abs(face_support(matrix_space(e12), e12, z) - zm(0, 1).real()) <= 1e-12);
  }
}

TEST_CASE("l_inf examples") {
  const NormedSpaceSpec l2 = linf(2, vec({1.0, 1.0}));
  CHECK(gamma_classic(l2, vec({1.0, 1.0})).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gamma_classic(l2, vec({1.0, -1.0})).value == doctest::Approx(1.0).epsilon(1e-12));
  Rng rng(57);
  for (int trial = 0; trial < 10; ++trial) {
    // coordinate evaluations span the face at the constant one
    const CVec z = random_coeffs(2, rng);
    CHECK(std::abs(gamma_classic(l2, z).value - z.cwiseAbs().maxCoeff()) <= 1e-12);
  }
  // u = (1, 1/2): the face is the first coordinate only
  const NormedSpaceSpec tilted = linf(2, vec({1.0, 0.5}));
  CHECK(gamma_classic(tilted, vec({0.0, 1.0})).value <= 1e-15);
  CHECK_THROWS_AS(gamma_classic(l2, vec({0.5, 0.5}), vec({1.0, 0.0})), ContractViolation);
}

TEST_CASE("seminorm properties across spec kinds") {
  const NormedSpaceSpec m2 = matrix_space(id2());
  const NormedSpaceSpec l2 = linf(2, vec({1.0, 1.0}));
  const NormedSpaceSpec poly = make_polytope("hexagon-ish", {vec({1.0, 0.0}), vec({0.0, 1.0}), vec({0.5, 0.5})},
                                             vec({1.0, 0.0}));
  const NormedSpaceSpec sum1 = direct_sum_1(m2, l2);
  const NormedSpaceSpec suminf = make_sum(NormedKind::linf_sum, l2, m2, vec({1.0, 1.0, 1.0, 0.0, 0.0, 1.0}));
  Rng rng(59);
  for (const NormedSpaceSpec* x : {&m2, &l2, &poly, &sum1, &suminf}) {
    CAPTURE(x->label);
    CHECK(std::abs(gamma_classic(*x, *x->u).value - 1.0) <= 1e-9);
    for (int trial = 0; trial < 8; ++trial) {
      const CVec z = random_coeffs(x->m, rng);
      const ClassicGamma g = gamma_classic(*x, z);
      CHECK(g.value <= norm(*x, z) + 1e-9);
      CHECK(std::abs(g.witness.value_at_u - 1.0) <= 1e-9);
      // ‖f‖ ≤ 1 on samples
      for (int s = 0; s < 5; ++s) {
        const CVec w = random_coeffs(x->m, rng);
        CHECK(std::abs(apply_functional(g.witness.f, w)) <= norm(*x, w) * (1.0 + 1e-9));
      }
      // convexity: the midpoint with another witness stays in S(X;u)
      const ClassicGamma h = gamma_classic(*x, random_coeffs(x->m, rng));
      const CVec mid = 0.5 * (g.witness.f + h.witness.f);
      CHECK(std::abs(apply_functional(mid, *x->u) - 1.0) <= 1e-9);
      CHECK(std::abs(apply_functional(mid, z)) <= norm(*x, z) + 1e-9);
      // homogeneity
      CHECK(std::abs(gamma_classic(*x, cplx(0.0, 2.0) * z).value - 2.0 * g.value) <= 1e-8);
    }
  }
}

TEST_CASE("classical constants") {
  NClassicOptions opts;
  opts.restarts = 50;
  CHECK(std::abs(n_classic(matrix_space(id2()), opts).value - 0.5) <= 1e-3);
  opts.restarts = 5;
  CHECK(std::abs(n_classic(linf(3, CVec::Ones(3)), opts).value - 1.0) <= 1e-9);
  const NormedSpaceSpec c = make_polytope("C", {vec({1.0})}, vec({1.0}));
  CHECK(std::abs(n_classic(c, opts).value - 1.0) <= 1e-12);
}

TEST_CASE("l1 sums keep n") {
  NClassicOptions opts;
  opts.restarts = 20;
  const NSumReport a = check_n_sum(linf(2, vec({1.0, 1.0})), linf(2), 50, opts);
  CHECK(a.passed);
  CHECK(std::abs(a.n_sum - 1.0) <= 1e-6);
  const NSumReport b = check_n_sum(matrix_space(id2()), linf(2), 50, opts);
  CHECK(b.passed);
  CHECK(b.identity_max_error <= 1e-6);
  CHECK(std::abs(b.n_x - 0.5) <= 2e-3);
  const NormedSpaceSpec c = make_polytope("C", {vec({1.0})}, vec({1.0}));
  CHECK(std::abs(n_classic(direct_sum_1(c, linf(2)), opts).value - 1.0) <= 1e-6);
}

TEST_CASE("l_inf sums degenerate when one part of u is short") {
  const NormedSpaceSpec one = linf(1);
  const GuSumReport short_v = check_gu_sum(one, one, vec({1.0}), vec({0.5}));
  CHECK(short_v.degeneracy_expected);
  CHECK(short_v.passed);
  CHECK(short_v.min_gamma <= 1e-12);
  const GuSumReport both = check_gu_sum(one, one, vec({1.0}), vec({1.0}));
  CHECK_FALSE(both.degeneracy_expected);
  CHECK(both.passed);
  CHECK(std::abs(both.min_gamma - 1.0) <= 1e-12);

  Rng rng(61);
  const CMat w = random_unitary(2, rng);
  const CVec wc = vec({w(0, 0), w(0, 1), w(1, 0), w(1, 1)});
  const GuSumReport m = check_gu_sum(matrix_space(id2()), matrix_space(wc), id2(), 0.9 * wc);
  CHECK(m.degeneracy_expected);
  CHECK(m.passed);
}

TEST_CASE("minimal quantization attains norms on a single point") {
  const NormedSpaceSpec l4 = linf(4, CVec::Ones(4));
  NClassicOptions opts;
  opts.restarts = 3;
  const MinComparisonReport r = min_comparison(l4, 3, 10, 5, opts);
  CHECK(r.passed);
  CHECK(r.max_attainment_error <= 1e-8);
  for (const auto& s : r.samples) {
    CHECK(std::abs(s.c.norm() - 1.0) <= 1e-12);
    CHECK(std::abs(s.d.norm() - 1.0) <= 1e-12);
  }
  const MinComparisonReport scalar = min_comparison(l4, 1, 5, 7, opts);
  CHECK(scalar.passed);
}

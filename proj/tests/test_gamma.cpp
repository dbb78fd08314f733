#include "doctest.h"

#include <cmath>

#include "ncb/gamma.hpp"

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

CVec vec(std::initializer_list<cplx> xs) {
  CVec v(static_cast<int>(xs.size()));
  int i = 0;
  for (auto x : xs) v(i++) = x;
  return v;
}

GammaOptions quick() {
  GammaOptions o;
  o.restarts = 4;
  o.max_rounds = 20;
  return o;
}

// max Re Tr(ρ a) over density matrices ρ, solved directly.
double state_sup(const CMat& a) {
  const auto n = static_cast<int>(a.rows());
  sdp::Problem p;
  const int r = p.add_block("rho", n);
  sdp::Functional tr;
  sdp::Functional obj;
  for (int i = 0; i < n; ++i) tr.add(r, i, i, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (a(j, i) != cplx(0.0)) obj.add(r, i, j, a(j, i));
  p.add_equality(tr, 1.0);
  p.set_objective(obj, sdp::Sense::maximize);
  const sdp::Solution sol = sdp::solve(p);
  REQUIRE(sol.status == sdp::Status::optimal);
  return sol.primal_objective;
}

}  // namespace

TEST_CASE("span{I, E12}: level 1 sees states, level 2 sees the identity") {
  const auto v = make_space("span{I,E12}", {CMat::Identity(2, 2), matrix_unit(2, 0, 1)}, vec({1.0, 0.0}));
  const LevelElement x = LevelElement::scalar(vec({0.0, 1.0}));
  const GammaEstimate g1 = gamma_fixed_n(v, x, 1, quick());
  // states are phase invariant, so sup |Tr ρ E12| = sup Re Tr ρ E12
  CHECK(std::abs(g1.value - state_sup(matrix_unit(2, 0, 1))) <= 1e-6);
  const GammaEstimate g = gamma(v, x, 2, quick());
  CHECK(std::abs(g.value - 1.0) <= 1e-6);
  CHECK(g.kind == EstimateKind::exact);
  CHECK(g.level_n == 2);
  REQUIRE(g.history.size() == 2);
  CHECK(g.history[0] <= g.history[1]);
}

TEST_CASE("gamma of the distinguished element is 1") {
  Rng rng(31);
  const CMat w = random_unitary(2, rng);
  std::vector<CMat> basis = full_basis(2);
  CVec uc = CVec::Zero(4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) uc(i * 2 + j) = w(i, j);
  const auto v = make_space("M2 twisted", basis, uc);
  const GammaEstimate g = gamma(v, LevelElement::scalar(uc), 0, quick());
  CHECK(std::abs(g.value - 1.0) <= 1e-9);

  CMat diag = CMat::Zero(2, 2);
  diag(0, 0) = 1.0;
  diag(1, 1) = 0.5;
  const auto line = make_space("span diag(1,1/2)", {diag}, vec({1.0}));
  CHECK(std::abs(gamma(line, LevelElement::scalar(vec({1.0})), 0, quick()).value - 1.0) <= 1e-9);
}

TEST_CASE("sandwich and unital exactness on M_2") {
  const auto m2 = make_space("M2", full_basis(2), identity_coeffs(2));
  Rng rng(37);
  for (int k = 1; k <= 2; ++k)
    for (int trial = 0; trial < 3; ++trial) {
      const LevelElement x = scaled(random_unit_element(m2, k, rng), 1.7);
      const GammaEstimate g = gamma(m2, x, 0, quick());
      CHECK(g.value <= g.norm_bound + 1e-6);
      CHECK(std::abs(g.norm_bound - 1.7) <= 1e-12);
      // the identity map lies in S_2, so the sup is attained
      CHECK(std::abs(g.value - 1.7) <= 1e-6);
      for (std::size_t i = 1; i < g.history.size(); ++i) CHECK(g.history[i - 1] <= g.history[i]);
    }
}

TEST_CASE("non-unital u: values stay below the norm and grow with n") {
  CVec u = CVec::Zero(4);
  u(0) = 1.0;
  u(3) = 0.5;
  const auto v = make_space("M2, u = diag(1,1/2)", full_basis(2), u);
  Rng rng(41);
  for (int trial = 0; trial < 3; ++trial) {
    const LevelElement x = random_unit_element(v, 1, rng);
    const GammaEstimate g = gamma(v, x, 2, quick());
    CHECK(g.value <= 1.0 + 1e-6);
    CHECK(g.value >= 0.0);
    for (std::size_t i = 1; i < g.history.size(); ++i) CHECK(g.history[i - 1] <= g.history[i]);
    CHECK(g.witness.d == 2);
    CHECK((ncb::apply(g.witness, v.u_matrix()) - CMat::Identity(g.witness.n, g.witness.n)).norm() <= 1e-12);
  }
}

TEST_CASE("min quantization of l_inf^2") {
  const NormedSpaceSpec x = linf(2, vec({1.0, 1.0}));
  const OperatorSpaceSpec v = min_quantization(x);
  const GammaEstimate g = gamma(v, LevelElement::scalar(vec({1.0, -1.0})), 0, quick());
  CHECK(std::abs(g.value - 1.0) <= 1e-6);
}

TEST_CASE("conjugate embedding transports gamma") {
  Rng rng(43);
  const CMat w = random_unitary(2, rng);
  CVec uc(4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) uc(i * 2 + j) = w(i, j);
  const auto v = make_space("span{u, E12}", {w, matrix_unit(2, 0, 1)}, vec({1.0, 0.0}));
  const ConjugatedSpace c = conjugate_embedding(v);
  for (int trial = 0; trial < 3; ++trial) {
    const LevelElement x = random_unit_element(v, 1, rng);
    const double a = gamma(v, x, 0, quick()).value;
    const double b = gamma(c.space, x, 0, quick()).value;
    CHECK(std::abs(a - b) <= 1e-6);
  }
}

TEST_CASE("n_cb estimates") {
  const auto m2 = make_space("M2", full_basis(2), identity_coeffs(2));
  const NcbEstimate e = ncb_estimate(m2);
  CHECK(e.unitary_shortcut);
  CHECK(e.kind == EstimateKind::exact);
  CHECK(e.value == 1.0);

  NcbOptions opts;
  opts.sphere_restarts = 2;
  opts.descent_steps = 2;
  opts.gamma = quick();
  opts.gamma.restarts = 2;

  CMat diag = CMat::Zero(2, 2);
  diag(0, 0) = 1.0;
  diag(1, 1) = 0.5;
  const auto line = make_space("span diag(1,1/2)", {diag}, vec({1.0}));
  const NcbEstimate l = ncb_estimate(line, opts);
  CHECK_FALSE(l.unitary_shortcut);
  CHECK(l.kind == EstimateKind::heuristic);
  CHECK(l.value >= 0.99);
  CHECK(l.value <= 1.0 + 1e-6);
  REQUIRE(l.witness_x.has_value());

  opts.k_max = 1;
  CVec u = CVec::Zero(4);
  u(0) = 1.0;
  u(3) = 0.5;
  const auto v = make_space("M2, u = diag(1,1/2)", full_basis(2), u);
  const NcbEstimate h = ncb_estimate(v, opts);
  CHECK(h.kind == EstimateKind::heuristic);
  CHECK(h.value > 0.0);
  CHECK(h.value <= 1.0 + 1e-6);
  CHECK(h.gamma_evaluations >= 2);
}

TEST_CASE("quotient by the kernel") {
  const auto m2 = make_space("M2", full_basis(2), identity_coeffs(2));
  const QuotientData q = quotient_Vu(m2, 1, 1e-6, quick());
  CHECK(q.kernel.empty());
  CHECK(q.quotient_basis.size() == 4);
  CHECK_FALSE(q.ambiguous);

  const auto v = make_space("span{E11,E12}", {matrix_unit(2, 0, 0), matrix_unit(2, 0, 1)}, vec({1.0, 0.0}));
  const QuotientData k = quotient_Vu(v, 2, 1e-6, quick());
  REQUIRE(k.kernel.size() == 1);
  CHECK(std::abs(std::abs(k.kernel[0](1)) - 1.0) <= 1e-12);
  CHECK(std::abs(k.kernel[0](0)) <= 1e-12);
  REQUIRE(k.kernel_gamma.size() == 1);
  CHECK(k.kernel_gamma[0] <= 1e-6);
  CHECK_FALSE(k.ambiguous);
  CHECK(k.q_map.rows() == 1);
  CHECK(k.q_map.cols() == 2);
  for (const auto& e : k.table) CHECK(e.value <= 1.0 + 1e-6);

  // the corner state kills E12 and factors; the identity does not
  const ChoiMatrix corner = choi_of(2, 1, [](const CMat& a) { return CMat::Constant(1, 1, a(0, 0)); });
  const InducedMap f = factor_through_quotient(v, k, corner);
  CHECK(f.images.size() == 1);
  CHECK(f.residual <= 1e-12);
  CHECK_THROWS_AS(factor_through_quotient(v, k, identity_map(2)), ContractViolation);
}

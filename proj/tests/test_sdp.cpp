#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <map>
#include <tuple>

#include "ncb/sdp.hpp"
#include "ncb/sdp_cache.hpp"
#include "ncb/sdp_schur.hpp"

using namespace ncb;
using namespace ncb::sdp;

namespace {

// Re Tr(c X) = sum_ij Re(c_ji X_ij)
Functional trace_pairing(int block, const CMat& c) {
  Functional f;
  for (int i = 0; i < c.rows(); ++i)
    for (int j = 0; j < c.cols(); ++j)
      if (c(j, i) != cplx(0.0)) f.add(block, i, j, c(j, i));
  return f;
}

Functional trace_of(int block, int n) { return trace_pairing(block, CMat::Identity(n, n)); }

}  // namespace

TEST_CASE("maximize Tr X subject to X <= I") {
  Problem p;
  const int x = p.add_block("X", 2);
  const int s = p.add_block("S", 2);
  for (int i = 0; i < 2; ++i)
    for (int j = i; j < 2; ++j)
      p.add_complex_equality({{x, i, j, 1.0}, {s, i, j, 1.0}}, i == j ? 1.0 : 0.0);
  p.set_objective(trace_of(x, 2), Sense::maximize);
  const Solution sol = solve(p);
  REQUIRE(sol.status == Status::optimal);
  CHECK(sol.primal_objective == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(sol.primal_infeasibility <= 1e-7);
}

TEST_CASE("largest eigenvalue as min t with tI - A >= 0") {
  Problem p;
  const int t = p.add_block("t", 1, BlockKind::real_symmetric);
  const int s = p.add_block("S", 2);
  const double a[2] = {3.0, 1.0};
  for (int i = 0; i < 2; ++i)
    for (int j = i; j < 2; ++j) {
      std::vector<Term> terms{{s, i, j, 1.0}};
      if (i == j) terms.push_back({t, 0, 0, -1.0});
      p.add_complex_equality(terms, i == j ? -a[i] : 0.0);
    }
  Functional obj;
  obj.add(t, 0, 0, 1.0);
  p.set_objective(obj, Sense::minimize);
  const Solution sol = solve(p);
  REQUIRE(sol.status == Status::optimal);
  CHECK(sol.primal_objective == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("trace norm through the 2x2 block representation") {
  Rng rng(2);
  std::vector<CMat> cases{matrix_unit(2, 0, 1), random_ginibre(3, 3, rng)};
  for (const CMat& f : cases) {
    const int n = static_cast<int>(f.rows());
    Problem p;
    const int z = p.add_block("Z", 2 * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) p.add_complex_equality({{z, i, n + j, 1.0}}, f(i, j));
    p.set_objective(trace_pairing(z, 0.5 * CMat::Identity(2 * n, 2 * n)), Sense::minimize);
    const Solution sol = solve(p);
    REQUIRE(sol.status == Status::optimal);
    CHECK(std::abs(sol.primal_objective - trace_norm(f)) <= 1e-7);
  }
}

TEST_CASE("feasibility: unit-trace PSD matrices") {
  Problem p;
  const int x = p.add_block("X", 2);
  p.add_equality(trace_of(x, 2), 1.0);
  const Solution sol = feasibility(p);
  REQUIRE(sol.status == Status::optimal);
  CHECK(sol.primal_infeasibility <= 1e-7);
  CHECK(psd_check(sol.blocks[0], 1e-8).psd);
  // the path-following iterate converges to the analytic centre I/2
  CHECK((sol.blocks[0] - 0.5 * CMat::Identity(2, 2)).norm() <= 1e-6);
}

TEST_CASE("feasibility: negative trace is certified infeasible") {
  Problem p;
  const int x = p.add_block("X", 2);
  p.add_equality(trace_of(x, 2), -1.0);
  const Solution sol = feasibility(p);
  REQUIRE(sol.status == Status::infeasible);
  REQUIRE(sol.certificate.has_value());
  const auto& y = sol.certificate->multipliers;
  REQUIRE(y.size() == 1);
  CHECK(y[0] * -1.0 == doctest::Approx(1.0));  // b^T y = 1
  CHECK(sol.certificate->max_violation <= 1e-9);
}

TEST_CASE("inconsistent equalities are caught before the interior-point loop") {
  Problem p;
  const int x = p.add_block("X", 2);
  p.add_equality(trace_of(x, 2), 1.0);
  p.add_equality(trace_pairing(x, 2.0 * CMat::Identity(2, 2)), 3.0);
  const Solution sol = feasibility(p);
  REQUIRE(sol.status == Status::infeasible);
  REQUIRE(sol.certificate.has_value());
  CHECK(std::abs(sol.certificate->max_violation) <= 1e-12);
}

TEST_CASE("dependent but consistent equalities are dropped") {
  Problem p;
  const int x = p.add_block("X", 2);
  p.add_equality(trace_of(x, 2), 1.0);
  p.add_equality(trace_pairing(x, 2.0 * CMat::Identity(2, 2)), 2.0);
  CMat c(2, 2);
  c << 1.0, 0.3, 0.3, -1.0;
  p.set_objective(trace_pairing(x, c), Sense::maximize);
  const Solution sol = solve(p);
  REQUIRE(sol.status == Status::optimal);
  CHECK(std::abs(sol.primal_objective - herm_eigenvalues(c)(0)) <= 1e-7);
}

TEST_CASE("inequality constraints get slack variables") {
  Problem p;
  const int x = p.add_block("X", 3);
  p.add_constraint(trace_of(x, 3), Relation::less_equal, 2.0);
  CMat c = CMat::Zero(3, 3);
  c(0, 0) = 1.0;
  c(1, 1) = 0.5;
  p.set_objective(trace_pairing(x, c), Sense::maximize);
  const Solution sol = solve(p);
  REQUIRE(sol.status == Status::optimal);
  CHECK(sol.primal_objective == doctest::Approx(2.0).epsilon(1e-7));

  Problem q;
  const int y = q.add_block("Y", 2);
  q.add_constraint(trace_of(y, 2), Relation::greater_equal, 1.5);
  q.set_objective(trace_of(y, 2), Sense::minimize);
  const Solution sq = solve(q);
  REQUIRE(sq.status == Status::optimal);
  CHECK(sq.primal_objective == doctest::Approx(1.5).epsilon(1e-7));
}

TEST_CASE("weak duality and eigenvalue oracle on random density-matrix problems") {
  Rng rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 + trial % 3;
    const CMat c = random_hermitian(n, rng);
    Problem p;
    const int x = p.add_block("rho", n);
    p.add_equality(trace_of(x, n), 1.0);
    p.set_objective(trace_pairing(x, c), Sense::maximize);
    const Solution sol = solve(p);
    REQUIRE(sol.status == Status::optimal);
    CHECK(sol.primal_objective <= sol.dual_objective + 1e-9);
    CHECK(std::abs(sol.primal_objective - herm_eigenvalues(c)(0)) <= 1e-7);
  }
}

TEST_CASE("optimum is invariant under a unitary change of block basis") {
  Rng rng(43);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 3;
    const CMat c = random_hermitian(n, rng);
    const CMat a = random_hermitian(n, rng);
    const CMat u = random_unitary(n, rng);
    auto build = [&](const CMat& cc, const CMat& aa) {
      Problem p;
      const int x = p.add_block("X", n);
      p.add_equality(trace_of(x, n), 1.0);
      p.add_constraint(trace_pairing(x, aa), Relation::less_equal, 0.1);
      p.set_objective(trace_pairing(x, cc), Sense::maximize);
      return p;
    };
    const Settings s;
    const Solution s1 = solve(build(c, a), s);
    const Solution s2 = solve(build(u.adjoint() * c * u, u.adjoint() * a * u), s);
    if (s1.status != Status::optimal) continue;  // constraint may be infeasible
    REQUIRE(s2.status == Status::optimal);
    CHECK(std::abs(s1.primal_objective - s2.primal_objective) <= 2 * s.gap_tol * 10);
  }
}

TEST_CASE("complex problems match their hand-built real symmetric embedding") {
  Rng rng(47);
  const int n = 3;
  const CMat c = random_hermitian(n, rng);
  const CMat a = random_hermitian(n, rng);

  Problem pc;
  const int x = pc.add_block("X", n);
  pc.add_equality(trace_of(x, n), 1.0);
  pc.add_constraint(trace_pairing(x, a), Relation::less_equal, 0.2);
  pc.set_objective(trace_pairing(x, c), Sense::maximize);

  // Re Tr(H X) = (1/2) Tr(H_r X_r) with H_r = [[Re H, -Im H], [Im H, Re H]].
  auto embed = [](const CMat& h) {
    const int k = static_cast<int>(h.rows());
    CMat r = CMat::Zero(2 * k, 2 * k);
    r.block(0, 0, k, k) = h.real().cast<cplx>();
    r.block(k, k, k, k) = h.real().cast<cplx>();
    r.block(0, k, k, k) = -h.imag().cast<cplx>();
    r.block(k, 0, k, k) = h.imag().cast<cplx>();
    return r;
  };
  Problem pr;
  const int xr = pr.add_block("Xr", 2 * n, BlockKind::real_symmetric);
  pr.add_equality(trace_pairing(xr, 0.5 * embed(CMat::Identity(n, n))), 1.0);
  pr.add_constraint(trace_pairing(xr, 0.5 * embed(a)), Relation::less_equal, 0.2);
  pr.set_objective(trace_pairing(xr, 0.5 * embed(c)), Sense::maximize);

  const Solution sc = solve(pc);
  const Solution sr = solve(pr);
  REQUIRE(sc.status == Status::optimal);
  REQUIRE(sr.status == Status::optimal);
  CHECK(std::abs(sc.primal_objective - sr.primal_objective) <= 1e-9 * 10);
}

TEST_CASE("parallel Schur assembly matches the serial reference") {
  Rng rng(53);
  std::uniform_int_distribution<int> pick(0, 5);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::vector<int> dims{6, 4, 1};
  std::vector<RMat> x, zinv;
  for (int d : dims) {
    RMat r = RMat::Random(d, d);
    x.push_back(r * r.transpose() + RMat::Identity(d, d));
    RMat q = RMat::Random(d, d);
    zinv.push_back(q * q.transpose() + RMat::Identity(d, d));
  }
  std::vector<ConstraintMatrix> a(30);
  for (auto& cm : a) {
    std::map<std::tuple<int, int, int>, double> m;
    for (int k = 0; k < 5; ++k) {
      const int b = pick(rng) % 3;
      const int p = pick(rng) % dims[b];
      const int q = pick(rng) % dims[b];
      const double v = g(rng);
      m[{b, p, q}] += v;
      if (p != q) m[{b, q, p}] += v;
    }
    for (const auto& [key, v] : m)
      cm.entries.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), v});
  }
  const RMat ms = assemble_schur_serial(a, x, zinv);
  for (int threads : {1, 2, 4}) {
    const RMat mp = assemble_schur_omp(a, x, zinv, threads);
    CHECK((ms - mp).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + ms.cwiseAbs().maxCoeff()));
  }
  CHECK((assemble_schur_omp(a, x, zinv, 1) - assemble_schur_omp(a, x, zinv, 3)).norm() == 0.0);
}

TEST_CASE("solution cache returns verified hits") {
  const auto dir = std::filesystem::temp_directory_path() / "ncb_test_cache";
  std::filesystem::remove_all(dir);
  SolutionCache cache(dir);
  Problem p;
  const int x = p.add_block("X", 2);
  p.add_equality(trace_of(x, 2), 1.0);
  CMat c(2, 2);
  c << 0.2, cplx(0.1, 0.4), cplx(0.1, -0.4), -0.3;
  p.set_objective(trace_pairing(x, c), Sense::maximize);
  Settings s;
  s.cache = &cache;
  const Solution fresh = solve(p, s);
  CHECK_FALSE(fresh.from_cache);
  const Solution again = solve(p, s);
  CHECK(again.from_cache);
  CHECK(cache.hits() == 1);
  CHECK(std::abs(fresh.primal_objective - again.primal_objective) <= 1e-10);
  CHECK((fresh.blocks[0] - again.blocks[0]).norm() == 0.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed problems are rejected") {
  Problem p;
  p.add_block("X", 2);
  Functional f;
  f.add(3, 0, 0, 1.0);
  p.add_equality(f, 1.0);
  CHECK_THROWS_AS(solve(p), ContractViolation);
  Problem q;
  q.add_block("X", 2);
  Functional g;
  g.add(0, 2, 0, 1.0);
  q.add_equality(g, 1.0);
  CHECK_THROWS_AS(solve(q), ContractViolation);
}

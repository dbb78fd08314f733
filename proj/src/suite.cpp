// SPDX-License-Identifier: Apache-2.0

#include "ncb/suite.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace ncb {

namespace {

using io::Json;

// Every γ̂ computed by a run, for the sandwich half of criterion 11.
struct Sandwich {
  double max_excess = -std::numeric_limits<double>::infinity();  // γ̂ − ‖x‖
  double max_unit_error = 0.0;                                   // |γ̂(u) − 1|
  int evaluations = 0;
  int unit_evaluations = 0;

  void record(const GammaEstimate& g) {
    max_excess = std::max(max_excess, g.value - g.norm_bound);
    ++evaluations;
  }
  void record_unit(const GammaEstimate& g) {
    record(g);
    max_unit_error = std::max(max_unit_error, std::abs(g.value - 1.0));
    ++unit_evaluations;
  }
};

struct Context {
  const SuiteConfig& config;
  Sandwich& sandwich;

  GammaOptions gamma_options(std::uint64_t salt) const {
    GammaOptions o;
    o.seed = config.seed ^ salt;
    if (config.restarts > 0) o.restarts = config.restarts;
    o.sdp = config.sdp;
    return o;
  }
};

CriterionResult start(int id, std::string title) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  return r;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::vector<CMat> full_basis(int d) {
  std::vector<CMat> b;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) b.push_back(matrix_unit(d, i, j));
  return b;
}

OperatorSpaceSpec matrix_algebra(int d) {
  CVec u = CVec::Zero(d * d);
  for (int i = 0; i < d; ++i) u(i * d + i) = 1.0;
  return make_space("M_" + std::to_string(d), full_basis(d), u);
}

OperatorSpaceSpec span_i_e12() {
  CVec u = CVec::Zero(2);
  u(0) = 1.0;
  return make_space("span{I,E12}", {CMat::Identity(2, 2), matrix_unit(2, 0, 1)}, u);
}

OperatorSpaceSpec diagonal(int d) {
  std::vector<CMat> b;
  for (int i = 0; i < d; ++i) b.push_back(matrix_unit(d, i, i));
  return make_space("diag_" + std::to_string(d), b, CVec::Ones(d));
}

NormedSpaceSpec m2_normed() {
  NormedSpaceSpec x = make_matrix_realized(matrix_algebra(2));
  x.u = matrix_algebra(2).u;
  return x;
}

LevelElement unit_at_level(const OperatorSpaceSpec& v, int k) {
  LevelElement x = LevelElement::zero(k, v.dim());
  for (int a = 0; a < k; ++a) x.at(a, a) = *v.u;
  return x;
}

// Local ascent for max ‖φ_k(x)‖ over unitaries x ∈ M_k(M_d), whose convex
// hull is the unit ball: alternate the top singular pair (ξ, η) of φ_k(x) with
// the polar factor of the matrix B_ba = <ξ, φ_k(E_ab) η>.
double amplified_norm_ascent(const ChoiMatrix& phi, int k, int starts, Rng& rng) {
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

CriterionResult cb_calibration(const Context& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r = start(1, "cb-norm calibration");
  bool ok = true;
  Json ids = Json::array();
  for (int d = 1; d <= 4; ++d) {
    const CbNormResult c = cb_norm(identity_map(d), ctx.config.sdp);
    ids.push_back(c.value);
    ok = ok && c.verified && std::abs(c.value - 1.0) <= 1e-6;
  }
  const CbNormResult t = cb_norm(transpose_map(2), ctx.config.sdp);
  Rng rng = seeded_rng(ctx.config.seed, {1});
  const double brute = amplified_norm_ascent(transpose_map(2), 2, 10, rng);
  ok = ok && t.verified && std::abs(t.value - 2.0) <= 1e-3 && std::abs(brute - t.value) <= 1e-3;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < 30.0;
  r.passed = ok && in_time;
  r.data = {{"identity", ids}, {"transpose", t.value}, {"transpose_level2_ascent", brute}, {"within_30s", in_time}};
  r.summary = "transpose " + fmt(t.value) + ", ascent " + fmt(brute);
  return r;
}

CriterionResult unital_exactness(const Context& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r = start(2, "unital exactness");
  const std::vector<OperatorSpaceSpec> spaces{matrix_algebra(2), span_i_e12(),
                                              min_quantization(linf(3, CVec::Ones(3)))};
  double worst = 0.0;
  bool truncated = ctx.config.n_max > 0;
  Json per = Json::array();
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    const auto& v = spaces[s];
    Rng rng = seeded_rng(ctx.config.seed, {2, s});
    double gap = 0.0;
    for (int i = 0; i < 20; ++i) {
      const int k = 1 + i / 10;
      const int n_max = ctx.config.n_max > 0 ? ctx.config.n_max : v.d * k;
      const LevelElement x = random_unit_element(v, k, rng);
      const GammaEstimate g = gamma(v, x, n_max, ctx.gamma_options(0x200 + 40 * s + i));
      ctx.sandwich.record(g);
      gap = std::max(gap, g.norm_bound - g.value);
    }
    for (int k = 1; k <= 2; ++k)
      ctx.sandwich.record_unit(gamma(v, unit_at_level(v, k), v.d * k, ctx.gamma_options(0x2f0 + k)));
    worst = std::max(worst, gap);
    per.push_back({{"space", v.label}, {"max_gap", gap}});
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < 300.0;
  r.passed = worst <= 1e-4 && in_time;
  r.data = {{"spaces", per}, {"max_gap", worst}, {"n_max", truncated ? ctx.config.n_max : 0}, {"within_5min", in_time}};
  r.summary = "max ‖x‖ − γ̂ = " + fmt(worst) + (truncated ? " (n_max truncated: lower bounds)" : "");
  return r;
}

CriterionResult level_sweep(const Context& ctx) {
  CriterionResult r = start(3, "level-sweep monotonicity");
  const OperatorSpaceSpec v = span_i_e12();
  CVec e = CVec::Zero(2);
  e(1) = 1.0;
  const LevelElement x = LevelElement::scalar(e);
  const GammaEstimate g1 = gamma_fixed_n(v, x, 1, ctx.gamma_options(0x301));
  const GammaEstimate g2 = gamma_fixed_n(v, x, 2, ctx.gamma_options(0x302));
  ctx.sandwich.record(g1);
  ctx.sandwich.record(g2);
  r.passed = std::abs(g1.value - 0.5) <= 1e-3 && std::abs(g2.value - 1.0) <= 1e-3;
  r.data = {{"n1", g1.value}, {"n2", g2.value}};
  r.summary = "n=1 " + fmt(g1.value) + ", n=2 " + fmt(g2.value);
  return r;
}

CriterionResult classical_constants(const Context& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r = start(4, "classical constants");
  NClassicOptions o;
  o.restarts = 50;
  o.seed = ctx.config.seed;
  const NClassicEstimate m2 = n_classic(m2_normed(), o);
  const NClassicEstimate l3 = n_classic(linf(3, CVec::Ones(3)), o);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < 120.0;
  r.passed = std::abs(m2.value - 0.5) <= 1e-3 && std::abs(l3.value - 1.0) <= 1e-6 && in_time;
  r.data = {{"n_M2", m2.value}, {"n_linf3", l3.value}, {"restarts", o.restarts}, {"within_2min", in_time}};
  r.summary = "n(M_2;I) " + fmt(m2.value) + ", n(l_inf^3;1) " + fmt(l3.value);
  return r;
}

CriterionResult n_sum(const Context& ctx) {
  CriterionResult r = start(5, "n of l1 sums");
  NClassicOptions o;
  o.restarts = 20;
  o.seed = ctx.config.seed;
  CVec ones = CVec::Ones(2);
  const NSumReport a = check_n_sum(linf(2, ones), linf(2), 50, o);
  const NSumReport b = check_n_sum(m2_normed(), linf(2), 50, o);
  const NormedSpaceSpec c = direct_sum_1(make_polytope("C", {CVec::Ones(1)}, CVec::Ones(1)), linf(2));
  const double nc = n_classic(c, o).value;
  const auto ok = [](const NSumReport& s) {
    return std::abs(s.n_sum - s.n_x) <= 2e-3 && s.identity_max_error <= 1e-6 && s.pairs >= 50;
  };
  r.passed = ok(a) && ok(b) && std::abs(nc - 1.0) <= 1e-6;
  r.data = {{"linf2", {{"n_x", a.n_x}, {"n_sum", a.n_sum}, {"identity_error", a.identity_max_error}}},
            {"M2", {{"n_x", b.n_x}, {"n_sum", b.n_sum}, {"identity_error", b.identity_max_error}}},
            {"C_plus_linf2", nc}};
  r.summary = "M_2: " + fmt(b.n_x) + " vs " + fmt(b.n_sum) + ", C(+)l_inf^2: " + fmt(nc);
  return r;
}

CriterionResult min_attainment(const Context& ctx) {
  CriterionResult r = start(6, "minimal quantization attainment");
  NClassicOptions o;
  o.restarts = 3;
  o.seed = ctx.config.seed;
  const MinComparisonReport m = min_comparison(linf(4, CVec::Ones(4)), 3, 20, ctx.config.seed, o);
  r.passed = m.samples.size() == 20 && m.max_attainment_error <= 1e-8;
  r.data = {{"samples", m.samples.size()}, {"max_attainment_error", m.max_attainment_error}};
  r.summary = "max error " + fmt(m.max_attainment_error);
  return r;
}

CriterionResult cone_exactness(const Context& ctx) {
  CriterionResult r = start(7, "cone exactness");
  const OperatorSpaceSpec v = matrix_algebra(2);
  Rng rng = seeded_rng(ctx.config.seed, {7});
  std::uniform_real_distribution<double> unif(0.01, 1.0);
  ConeOptions co;
  co.seed = ctx.config.seed;
  co.sdp = ctx.config.sdp;
  int disagreements = 0, false_violations = 0, missed = 0, members = 0, tested = 0;
  double worst_detected = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 150; ++i) {
    const int k = i < 100 ? 1 : 2;
    const int n = 2 * k;
    CMat a;
    if (i % 5 == 4) {
      a = random_ginibre(n, n, rng);
    } else {
      const CMat h = random_hermitian(n, rng);
      const double lmin = herm_eigenvalues(h)(n - 1);
      const double target = (i % 5 < 2 ? 1.0 : -1.0) * unif(rng);
      a = h + (target - lmin) * CMat::Identity(n, n);
    }
    // independent oracle: Hermitian with nonnegative spectrum
    const bool hermitian = (a - a.adjoint()).norm() <= 1e-12 * std::max(1.0, a.norm());
    const double lmin = herm_eigenvalues(herm_part(a))(n - 1);
    const bool oracle = hermitian && lmin >= -1e-8;
    const LevelElement x = level_element_of(v, k, a);
    if (cone_membership_exact(v, x).member != oracle) ++disagreements;
    const ConeVerdict s = cone_membership_sampled(v, x, co);
    ++tested;
    if (oracle) {
      ++members;
      if (!s.member || s.margin < -1e-6) ++false_violations;
    } else if (!hermitian || lmin <= -0.01) {
      worst_detected = std::max(worst_detected, s.margin);
      if (s.margin > -1e-4) ++missed;
    }
  }
  r.passed = disagreements == 0 && false_violations == 0 && missed == 0;
  r.data = {{"tested", tested},
            {"members", members},
            {"exact_disagreements", disagreements},
            {"sampled_false_violations", false_violations},
            {"sampled_missed_violations", missed},
            {"weakest_detected_margin", worst_detected}};
  r.summary = std::to_string(disagreements) + " disagreements, " + std::to_string(false_violations) +
              " false violations, " + std::to_string(missed) + " missed";
  return r;
}

CriterionResult operator_systems(const Context& ctx) {
  CriterionResult r = start(8, "operator-system characterization");
  NcbOptions no;
  no.gamma = ctx.gamma_options(0x800);
  const OperatorSystemReport m2 = check_operator_system(matrix_algebra(2), no);
  const OperatorSystemReport d3 = check_operator_system(diagonal(3), no);
  const OperatorSystemReport ie = check_operator_system(span_i_e12(), no);
  r.passed = m2.passed && d3.passed && !ie.span_ok && !ie.passed;
  r.data = {{"M2", m2.passed}, {"diag3", d3.passed}, {"span_I_E12_span_ok", ie.span_ok},
            {"span_I_E12_self_adjoint_dim", ie.self_adjoint_dim}};
  r.summary = std::string("M_2 ") + (m2.passed ? "pass" : "fail") + ", diag_3 " + (d3.passed ? "pass" : "fail") +
              ", span{I,E12} span check " + (ie.span_ok ? "pass" : "fail");
  return r;
}

CriterionResult m_ideal_quotient(const Context& ctx) {
  CriterionResult r = start(9, "M-ideal quotient");
  const OperatorSpaceSpec v = direct_sum_inf(matrix_algebra(2), matrix_algebra(2));
  const MProjectionReport mp = verify_complete_m_projection(v, trailing_projection(8, 4), 3, 200, ctx.config.seed);
  QuotientUnitalityOptions qo;
  qo.samples = 100;
  qo.seed = ctx.config.seed;
  qo.ncb.gamma = ctx.gamma_options(0x900);
  const QuotientUnitalityReport qu = check_quotient_unitality(v, mp.projection, qo);
  ConeOptions co;
  co.seed = ctx.config.seed;
  co.sdp = ctx.config.sdp;
  const QuotientOssysReport qs = check_quotient_ossys(v, mp.projection, 50, ctx.config.seed, qo.ncb, co);
  r.passed = mp.verified && mp.projection.verified_levels == 3 && mp.worst_residual <= 1e-8 &&
             std::abs(qu.q_norm - 1.0) <= 1e-8 && qu.psi_samples == 100 && qu.psi_max_error <= 1e-6 && qu.passed &&
             qs.passed;
  r.data = {{"projection_residual", mp.worst_residual},
            {"verified_levels", mp.projection.verified_levels},
            {"q_norm", qu.q_norm},
            {"psi_max_error", qu.psi_max_error},
            {"unitality_passed", qu.passed},
            {"quotient_ossys_passed", qs.passed}};
  r.summary = "residual " + fmt(mp.worst_residual) + ", ‖Q(v)‖ " + fmt(qu.q_norm) + ", Ψ error " +
              fmt(qu.psi_max_error);
  return r;
}

CriterionResult nonunital(const Context& ctx) {
  CriterionResult r = start(10, "non-unital operator systems");
  const OperatorSpaceSpec v = matrix_algebra(2);
  NonunitalOptions o;
  o.ncb.n_max = 2;
  o.ncb.gamma = ctx.gamma_options(0xa00);
  o.cone.seed = ctx.config.seed;
  o.cone.sdp = ctx.config.sdp;
  const NonunitalReport psd = check_nonunital_ossys(v, psd_cones(v, 2), o);

  ConeSpec diag;
  diag.label = "diagonal";
  diag.declared_levels = 2;
  diag.generators.resize(2);
  for (int j = 0; j < 2; ++j) diag.generators[0].push_back(level_element_of(v, 1, matrix_unit(2, j, j)));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      diag.generators[1].push_back(level_element_of(v, 2, kron(matrix_unit(2, i, i), matrix_unit(2, j, j))));
  const NonunitalReport dg = check_nonunital_ossys(v, diag, o);

  r.passed = psd.passed && psd.ncb_plus.value >= 0.999 && !dg.passed && dg.counterexample.has_value();
  r.data = {{"psd_ncb_plus", psd.ncb_plus.value},
            {"psd_passed", psd.passed},
            {"diag_passed", dg.passed},
            {"diag_counterexample_distance", dg.counterexample_distance}};
  if (dg.counterexample) r.data["diag_counterexample"] = io::to_json(*dg.counterexample);
  r.summary = "n_cb^+ " + fmt(psd.ncb_plus.value) + ", diagonal cones " +
              (dg.counterexample ? "fail with K_n member at distance " + fmt(dg.counterexample_distance)
                                 : std::string("no counterexample"));
  return r;
}

using Criterion = std::function<CriterionResult(const Context&)>;

std::vector<CriterionResult> run_once(const SuiteConfig& config, Sandwich& sandwich) {
  const Context ctx{config, sandwich};
  const std::vector<Criterion> all{cb_calibration,  unital_exactness, level_sweep,   classical_constants,
                                   n_sum,           min_attainment,   cone_exactness, operator_systems,
                                   m_ideal_quotient, nonunital};
  std::vector<CriterionResult> out;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = c(ctx);
    } catch (const std::exception& e) {
      r.passed = false;
      r.summary = std::string("error: ") + e.what();
      r.data = {{"error", e.what()}};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

Json body_of(const std::vector<CriterionResult>& rs) {
  Json a = Json::array();
  for (const auto& r : rs)
    a.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"summary", r.summary}, {"data", r.data}});
  return a;
}

}  // namespace

Json SuiteReport::body() const {
  return {{"passed", passed}, {"criteria", body_of(criteria)}};
}

SuiteReport run_suite(const SuiteConfig& config) {
  SuiteReport rep;
  Sandwich sandwich;
  std::vector<std::string> bodies;
  double first_run_seconds = 0.0;
  for (int run = 0; run < std::max(1, config.determinism_runs); ++run) {
    std::vector<CriterionResult> rs = run_once(config, sandwich);
    bodies.push_back(body_of(rs).dump());
    if (run == 0) {
      rep.criteria = std::move(rs);
      for (const auto& r : rep.criteria) first_run_seconds += r.seconds;
    }
  }
  CriterionResult det = start(11, "determinism and sandwich");
  bool identical = bodies.size() >= 2;
  for (const auto& b : bodies) identical = identical && b == bodies.front();
  const bool sandwich_ok = sandwich.max_excess <= 1e-6 && sandwich.max_unit_error <= 1e-9 &&
                           sandwich.unit_evaluations > 0;
  det.passed = identical && sandwich_ok;
  det.data = {{"runs", bodies.size()},
              {"bodies_identical", identical},
              {"gamma_evaluations", sandwich.evaluations},
              {"max_gamma_minus_norm", sandwich.max_excess},
              {"max_unit_error", sandwich.max_unit_error}};
  det.summary = std::to_string(bodies.size()) + " runs " + (identical ? "identical" : "differ") +
                ", max γ̂ − ‖x‖ " + fmt(sandwich.max_excess) + ", max |γ̂(u) − 1| " + fmt(sandwich.max_unit_error);
  det.seconds = first_run_seconds;  // time of the repeated runs, approximately
  rep.criteria.push_back(std::move(det));
  rep.passed = true;
  for (const auto& r : rep.criteria) rep.passed = rep.passed && r.passed;
  return rep;
}

}  // namespace ncb

// SPDX-License-Identifier: Apache-2.0

#include "ncb/ossys.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ncb {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

constexpr double kViolation = 1e-6;

CVec transfer(const CVec& v, int k, int d, int n) {
  CVec out = CVec::Zero(k * n);
  const int w = std::min(d, n);
  for (int b = 0; b < k; ++b) out.segment(b * n, w) = v.segment(b * d, w);
  return out;
}

CVec normalized_or_random(const CVec& v, Rng& rng) {
  const double nv = v.norm();
  return nv > 1e-8 ? CVec(v / nv) : random_unit_vector(static_cast<int>(v.size()), rng);
}

bool usable(const sdp::Solution& sol) {
  if (sol.blocks.empty() || sol.status == sdp::Status::infeasible) return false;
  if (sol.status == sdp::Status::optimal) return true;
  return sol.primal_infeasibility <= 1e-6 && sol.min_block_eigenvalue >= -1e-7;
}

// Real vectorization of a complex matrix: [Re; Im] column-major.
RVec real_vec(const CMat& a) {
  const auto n = a.size();
  RVec v(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = a.reshaped()(i).real();
    v(n + i) = a.reshaped()(i).imag();
  }
  return v;
}

// Lawson-Hanson active set method for min ‖A x − b‖ subject to x ≥ 0.
RVec nnls(const RMat& a, const RVec& b) {
  const auto n = a.cols();
  RVec x = RVec::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double tol = 1e-12 * (1.0 + a.cwiseAbs().maxCoeff()) * (1.0 + b.cwiseAbs().maxCoeff());
  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    const RVec w = a.transpose() * (b - a * x);
    Eigen::Index j = -1;
    double wmax = tol;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!passive[i] && w(i) > wmax) {
        wmax = w(i);
        j = i;
      }
    if (j < 0) break;
    passive[j] = true;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index i = 0; i < n; ++i)
        if (passive[i]) idx.push_back(i);
      RMat ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
      for (std::size_t c = 0; c < idx.size(); ++c) ap.col(static_cast<Eigen::Index>(c)) = a.col(idx[c]);
      const RVec sp = ap.colPivHouseholderQr().solve(b);
      RVec s = RVec::Zero(n);
      for (std::size_t c = 0; c < idx.size(); ++c) s(idx[c]) = sp(static_cast<Eigen::Index>(c));
      bool positive = true;
      for (auto i : idx)
        if (s(i) <= 0.0) positive = false;
      if (positive) {
        x = s;
        break;
      }
      double alpha = 1.0;
      for (auto i : idx)
        if (s(i) <= 0.0) alpha = std::min(alpha, x(i) / (x(i) - s(i)));
      x += alpha * (s - x);
      for (auto i : idx)
        if (x(i) <= tol) {
          x(i) = 0.0;
          passive[i] = false;
        }
    }
  }
  return x;
}

void add_cone_constraints(MapProgram& prog, const OperatorSpaceSpec& v, const ConeSpec& cones) {
  const int n = prog.n();
  for (int m = 1; m <= cones.declared_levels; ++m)
    for (const auto& g : cones.generators[static_cast<std::size_t>(m - 1)]) {
      const CMat gh = realize(v, g);
      const int w = prog.problem().add_block("cone", m * n);
      for (int r = 0; r < m * n; ++r)
        for (int c = 0; c < m * n; ++c) {
          std::vector<sdp::Term> terms{{w, r, c, 1.0}};
          prog.add_amplified_terms(terms, gh, r, c, -1.0);
          prog.problem().add_complex_equality(terms, 0.0);
        }
    }
}

}  // namespace

double psd_margin(const CMat& a) {
  const CMat h = herm_part(a);
  const double lmin = herm_eigenvalues(h)(h.rows() - 1);
  const double skew = spec_norm(skew_part(a));
  // skew parts at rounding level are not treated as violations
  if (skew <= 1e-12 * (1.0 + spec_norm(h))) return lmin;
  return std::min(lmin, -skew);
}

ConeVerdict cone_membership_exact(const OperatorSpaceSpec& v, const LevelElement& x) {
  require(v.u.has_value(), "the cone needs a distinguished element");
  if (!has_unitary_realization(v))
    throw ContractViolation("u is not unitary in this realization; use cone_membership_sampled");
  const CMat ik = CMat::Identity(x.k, x.k);
  const CMat a = kron(ik, v.u_matrix().adjoint()) * realize(v, x);
  ConeVerdict out;
  out.exact = true;
  out.margin = psd_margin(a);
  out.member = out.margin >= -1e-8;
  return out;
}

ConeVerdict adversarial_membership(const WitnessFamily& fam, const CMat& a, const ConeOptions& opts) {
  const CMat a_eff = compress_input(fam, a);
  const int k = static_cast<int>(a.rows()) / fam.d;
  const int r_dim = static_cast<int>(a_eff.rows()) / k;
  const HermEig he = herm_eig(herm_part(a_eff));
  const CVec bottom = he.vectors.col(he.values.size() - 1);

  ConeVerdict out;
  out.margin = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= opts.n_max; ++n) {
    const MapProgram base = fam.build(n);
    for (int r = 0; r < std::max(1, opts.restarts); ++r) {
      Rng rng = seeded_rng(opts.seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r), 0xc0e5u});
      // 0: Hermitian part; 1, 2: the imaginary part with either sign
      const int objective = r % 3;
      CVec xi = r == 0 ? normalized_or_random(transfer(bottom, k, r_dim, n), rng) : random_unit_vector(k * n, rng);
      double last = std::numeric_limits<double>::infinity();
      int stall = 0;
      for (int round = 0; round < opts.max_rounds; ++round) {
        const cplx rot = objective == 0 ? cplx(1.0) : (objective == 1 ? cplx(0.0, 1.0) : cplx(0.0, -1.0));
        sdp::Problem p = base.problem();
        p.set_objective(base.pairing(a_eff, xi, rot * xi), sdp::Sense::minimize);
        const sdp::Solution sol = sdp::solve(p, opts.sdp);
        ++out.sdp_solves;
        if (!usable(sol)) break;
        ChoiMatrix psi = base.extract(sol);
        if (fam.unit) enforce_unit(psi, *fam.unit);
        const CMat img = ncb::apply(psi, a_eff);
        const double m = psd_margin(img);
        if (m < out.margin) {
          out.margin = m;
          out.level_n = n;
          out.witness = lift_witness(fam, psi);
        }
        const HermEig e = herm_eig(objective == 0 ? herm_part(img) : skew_part(img));
        xi = objective == 1 ? CVec(e.vectors.col(0)) : CVec(e.vectors.col(e.values.size() - 1));
        stall = last - sol.primal_objective < opts.stall_tol ? stall + 1 : 0;
        last = sol.primal_objective;
        if (stall >= 2) break;
      }
    }
    if (out.margin < -kViolation) break;
  }
  if (!std::isfinite(out.margin)) throw std::runtime_error("every adversarial restart failed in the SDP solver");
  out.member = out.margin >= -kViolation;
  return out;
}

ConeVerdict cone_membership_sampled(const OperatorSpaceSpec& v, const LevelElement& x, const ConeOptions& opts) {
  return adversarial_membership(sn_family(v), realize(v, x), opts);
}

OperatorSystemReport check_operator_system(const OperatorSpaceSpec& v, const NcbOptions& opts) {
  require(v.u.has_value(), "an operator system needs a distinguished element");
  OperatorSystemReport rep;
  rep.ncb = ncb_estimate(v, opts);
  rep.approximate = rep.ncb.kind != EstimateKind::exact;

  const WitnessFamily fam = sn_family(v);
  const int m = v.dim();
  std::vector<CMat> b;
  for (const auto& g : v.basis) b.push_back(fam.left.adjoint() * g * fam.right);
  const auto r = static_cast<int>(fam.left.cols());
  // c = a + i b̃ ↦ Σ c_t B_t − (Σ c_t B_t)*, as a real map R^{2m} → R^{2 r²}
  RMat sys(2 * r * r, 2 * m);
  for (int t = 0; t < m; ++t) {
    sys.col(t) = real_vec(b[t] - b[t].adjoint());
    sys.col(m + t) = real_vec(cplx(0.0, 1.0) * (b[t] + b[t].adjoint()));
  }
  Eigen::JacobiSVD<RMat> svd(sys, Eigen::ComputeFullV);
  const RVec s = svd.singularValues();
  const double scale = std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  int rank = 0;
  while (rank < s.size() && s(rank) > 1e-10 * scale) ++rank;
  for (int j = rank; j < 2 * m; ++j) {
    const RVec col = svd.matrixV().col(j);
    CVec c(m);
    for (int t = 0; t < m; ++t) c(t) = cplx(col(t), col(m + t));
    rep.cone_basis.push_back(c);
  }
  rep.self_adjoint_dim = 2 * m - rank;
  rep.span_ok = rep.self_adjoint_dim == m;
  rep.passed = rep.span_ok && rep.ncb.kind == EstimateKind::exact && std::abs(rep.ncb.value - 1.0) <= 1e-9;
  return rep;
}

// ---------------------------------------------------------------------------

ConeSpec psd_cones(const OperatorSpaceSpec& v, int levels) {
  ConeSpec c;
  c.label = "psd(" + v.label + ")";
  c.kind = ConeSpec::Kind::psd;
  c.declared_levels = levels;
  validate(v, c);
  return c;
}

void validate(const OperatorSpaceSpec& v, const ConeSpec& cones) {
  require(cones.declared_levels >= 1, "at least one cone level must be declared");
  if (cones.kind == ConeSpec::Kind::psd) {
    require(v.dim() == v.d * v.d, "psd cones are only supported on the full matrix algebra");
    return;
  }
  require(static_cast<int>(cones.generators.size()) == cones.declared_levels,
          "one generator list per declared level is required");
  for (int m = 1; m <= cones.declared_levels; ++m)
    for (const auto& g : cones.generators[static_cast<std::size_t>(m - 1)]) {
      require(g.k == m, "generator level does not match its list");
      require(static_cast<int>(g.coeffs.size()) == m * m, "generator has wrong shape");
      for (const auto& c : g.coeffs) require(c.size() == v.dim(), "generator coefficient length mismatch");
      require(level_norm(v, g) > 1e-12, "generators must be nonzero");
      require(!declared_cone_contains(v, cones, scaled(g, -1.0)).inside, "declared cone is not pointed");
    }
}

HullTest declared_cone_contains(const OperatorSpaceSpec& v, const ConeSpec& cones, const LevelElement& x) {
  require(x.k >= 1 && x.k <= cones.declared_levels, "level is outside the declared cones");
  const CMat xh = realize(v, x);
  HullTest out;
  if (cones.kind == ConeSpec::Kind::psd) {
    const HermEig e = herm_eig(herm_part(xh));
    double dist2 = skew_part(xh).squaredNorm();
    for (int i = 0; i < e.values.size(); ++i) dist2 += std::pow(std::min(0.0, e.values(i)), 2);
    out.residual = std::sqrt(dist2);
    out.inside = psd_margin(xh) >= -1e-8;
    return out;
  }
  const auto& gens = cones.generators[static_cast<std::size_t>(x.k - 1)];
  const RVec target = real_vec(xh);
  if (gens.empty()) {
    out.residual = target.norm();
  } else {
    RMat a(target.size(), static_cast<Eigen::Index>(gens.size()));
    for (std::size_t j = 0; j < gens.size(); ++j) a.col(static_cast<Eigen::Index>(j)) = real_vec(realize(v, gens[j]));
    out.residual = (a * nnls(a, target) - target).norm();
  }
  out.inside = out.residual <= 1e-7 * std::max(1.0, target.norm());
  return out;
}

WitnessFamily splus_family(const OperatorSpaceSpec& v, const ConeSpec& cones) {
  validate(v, cones);
  WitnessFamily fam;
  fam.d = v.d;
  fam.build = [v, cones](int n) {
    if (cones.kind == ConeSpec::Kind::psd) {
      // positivity up to level d on M_d is complete positivity; for CP maps
      // the cb norm is ‖φ(I)‖
      require(cones.declared_levels >= std::min(v.d, n), "psd cones must be declared up to level min(d, n)");
      return MapProgram(v.d, n, true);
    }
    MapProgram prog(v.d, n, false);
    add_cone_constraints(prog, v, cones);
    return prog;
  };
  return fam;
}

SnWitness splus_membership(const OperatorSpaceSpec& v, const ConeSpec& cones, const std::vector<CMat>& targets,
                           const sdp::Settings& settings) {
  require(static_cast<int>(targets.size()) == v.dim(), "one target per basis element is required");
  const int n = static_cast<int>(targets.front().rows());
  MapProgram prog = splus_family(v, cones).build(n);
  for (int t = 0; t < v.dim(); ++t) prog.require_image(v.basis[t], targets[t]);
  const sdp::Solution sol = sdp::feasibility(prog.problem(), settings);
  SnWitness w;
  w.status = sol.status;
  w.certificate = sol.certificate;
  if (sol.status == sdp::Status::infeasible || sol.blocks.empty()) return w;
  w.choi = prog.extract(sol);
  OperatorSpaceSpec no_unit = v;
  no_unit.u.reset();
  measure_residuals(w, no_unit, targets);
  w.feasible = sol.status == sdp::Status::optimal && w.restriction_residual <= 1e-7;
  return w;
}

NcbEstimate ncb_plus_estimate(const OperatorSpaceSpec& v, const ConeSpec& cones, const NcbOptions& opts) {
  return sphere_search(v, splus_family(v, cones), opts);
}

ConeVerdict k_n_outer(const OperatorSpaceSpec& v, const ConeSpec& cones, const LevelElement& x,
                      const ConeOptions& opts) {
  return adversarial_membership(splus_family(v, cones), realize(v, x), opts);
}

NonunitalReport check_nonunital_ossys(const OperatorSpaceSpec& v, const ConeSpec& cones,
                                      const NonunitalOptions& opts) {
  validate(v, cones);
  NonunitalReport rep;
  rep.ncb_plus = ncb_plus_estimate(v, cones, opts.ncb);

  Rng rng = seeded_rng(opts.cone.seed, {0x2a2au});
  // generators to test: declared ones, or random rank-one PSD elements for psd cones
  std::vector<std::vector<LevelElement>> gens(static_cast<std::size_t>(cones.declared_levels));
  for (int m = 1; m <= cones.declared_levels; ++m) {
    if (cones.kind == ConeSpec::Kind::generators) {
      gens[m - 1] = cones.generators[static_cast<std::size_t>(m - 1)];
    } else {
      for (int s = 0; s < 2; ++s) {
        const CVec xi = random_unit_vector(m * v.d, rng);
        gens[m - 1].push_back(level_element_of(v, m, xi * xi.adjoint()));
      }
    }
  }

  rep.generators_in_k = true;
  for (const auto& level : gens)
    for (const auto& g : level) {
      ++rep.generators_tested;
      if (!k_n_outer(v, cones, g, opts.cone).member) rep.generators_in_k = false;
    }

  std::normal_distribution<double> gauss(0.0, 1.0);
  if (cones.declared_levels >= 2 && !gens[0].empty()) {
    for (int c = 0; c < opts.candidates && !rep.counterexample; ++c) {
      const int m = 2 + c % (cones.declared_levels - 1);
      const LevelElement& g = gens[0][static_cast<std::size_t>(c) % gens[0].size()];
      CMat alpha(1, m);
      for (int j = 0; j < m; ++j) alpha(0, j) = cplx(gauss(rng), gauss(rng));
      LevelElement x = scalar_sandwich(alpha.adjoint(), g, alpha);
      x = scaled(x, 1.0 / level_norm(v, x));
      ++rep.candidates_tested;
      const HullTest hull = declared_cone_contains(v, cones, x);
      if (hull.inside) continue;
      const ConeVerdict verdict = k_n_outer(v, cones, x, opts.cone);
      if (verdict.member) {
        rep.counterexample = x;
        rep.counterexample_distance = hull.residual;
        rep.counterexample_margin = verdict.margin;
      }
    }
  }
  rep.passed = rep.ncb_plus.value >= opts.ncb_threshold && rep.generators_in_k && !rep.counterexample;
  return rep;
}

}  // namespace ncb

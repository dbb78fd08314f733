// SPDX-License-Identifier: Apache-2.0

#include "ncb/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ncb {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

// Spread a vector of C^{kd} over C^{kn} block by block, truncating or padding.
CVec transfer(const CVec& v, int k, int d, int n) {
  CVec out = CVec::Zero(k * n);
  const int w = std::min(d, n);
  for (int b = 0; b < k; ++b) out.segment(b * n, w) = v.segment(b * d, w);
  return out;
}

CVec unit_or_random(const CVec& v, Rng& rng) {
  const double nv = v.norm();
  if (nv > 1e-8) return v / nv;
  return random_unit_vector(static_cast<int>(v.size()), rng);
}

// Solutions accepted as witnesses: optimal, or stopped on iterations with
// constraints still met to 1e-6.
bool usable(const sdp::Solution& sol) {
  if (sol.blocks.empty() || sol.status == sdp::Status::infeasible) return false;
  if (sol.status == sdp::Status::optimal) return true;
  return sol.primal_infeasibility <= 1e-6 && sol.min_block_eigenvalue >= -1e-7;
}

}  // namespace

std::string to_string(EstimateKind k) {
  switch (k) {
    case EstimateKind::exact:
      return "exact";
    case EstimateKind::lower_bound:
      return "lower_bound";
    case EstimateKind::heuristic:
      return "heuristic";
  }
  return "unknown";
}

CMat compress_input(const WitnessFamily& fam, const CMat& a) {
  if (fam.left.size() == 0) return a;
  require(a.rows() == a.cols() && a.rows() % fam.d == 0, "element size is not a multiple of d");
  const CMat ik = CMat::Identity(a.rows() / fam.d, a.rows() / fam.d);
  return kron(ik, fam.left.adjoint()) * a * kron(ik, fam.right);
}

ChoiMatrix lift_witness(const WitnessFamily& fam, const ChoiMatrix& psi) {
  if (fam.left.size() == 0) return psi;
  ChoiMatrix phi = choi_of(fam.d, psi.n, [&](const CMat& x) {
    return ncb::apply(psi, CMat(fam.left.adjoint() * x * fam.right));
  });
  phi.cb_checked = psi.cb_checked;
  return phi;
}

WitnessFamily sn_family(const OperatorSpaceSpec& v) {
  require(v.u.has_value(), "S_n(V;u) needs a distinguished element");
  const CMat u = v.u_matrix();
  Eigen::JacobiSVD<CMat> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  int r = 0;
  while (r < svd.singularValues().size() && svd.singularValues()(r) >= 1.0 - 1e-9) ++r;
  require(r >= 1, "the distinguished element must have norm 1");
  WitnessFamily fam;
  fam.d = v.d;
  fam.unit = CMat::Identity(r, r);
  fam.left = svd.matrixU().leftCols(r);
  fam.right = svd.matrixV().leftCols(r);
  fam.build = [r](int n) { return MapProgram(r, n, true, true); };
  return fam;
}

GammaEstimate sup_norm_fixed_n(const WitnessFamily& fam, const CMat& a, int n, const GammaOptions& opts) {
  require(n >= 1, "n must be at least 1");
  require(a.rows() == a.cols() && a.rows() % fam.d == 0, "element size is not a multiple of d");
  const int d = fam.d;
  const int k = static_cast<int>(a.rows()) / d;
  const MapProgram base = fam.build(n);
  const bool twisted = fam.left.size() > 0;
  const int r_dim = twisted ? static_cast<int>(fam.left.cols()) : d;
  const CMat a_eff = compress_input(fam, a);
  const SingularPair top = top_singular_pair(a);
  const SingularPair top_eff = twisted ? top_singular_pair(a_eff) : top;

  GammaEstimate best;
  best.k = k;
  best.level_n = n;
  best.norm_bound = top.value;
  best.value = -1.0;

  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    Rng rng = seeded_rng(opts.seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r), 0x9a33u});
    CVec xi, eta;
    if (r == 0) {
      xi = unit_or_random(transfer(top_eff.left, k, r_dim, n), rng);
      eta = unit_or_random(transfer(top_eff.right, k, r_dim, n), rng);
    } else {
      xi = random_unit_vector(k * n, rng);
      eta = random_unit_vector(k * n, rng);
    }

    double restart_best = -1.0;
    std::vector<double> trail;
    bool failed = false;
    for (int round = 0; round < opts.max_rounds; ++round) {
      sdp::Problem p = base.problem();
      p.set_objective(base.pairing(a_eff, xi, eta), sdp::Sense::maximize);
      const sdp::Solution sol = sdp::solve(p, opts.sdp);
      ++best.sdp_solves;
      if (!usable(sol)) {
        failed = restart_best < 0.0;
        break;
      }
      ChoiMatrix psi = base.extract(sol);
      if (fam.unit) enforce_unit(psi, *fam.unit);
      const SingularPair sp = top_singular_pair(ncb::apply(psi, a_eff));
      if (sp.value > best.value) {
        best.value = sp.value;
        best.witness = lift_witness(fam, psi);
        best.xi = sp.left;
        best.eta = sp.right;
      }
      restart_best = std::max(restart_best, sp.value);
      trail.push_back(restart_best);
      xi = sp.left;
      eta = sp.right;
      if (best.value >= best.norm_bound - opts.closure_tol) break;
      const auto s = trail.size();
      if (s > static_cast<std::size_t>(opts.stall_rounds) &&
          trail[s - 1] - trail[s - 1 - static_cast<std::size_t>(opts.stall_rounds)] < opts.stall_tol)
        break;
    }
    if (failed) ++best.failed_restarts;
    if (best.value >= best.norm_bound - opts.closure_tol) break;
  }
  if (best.value < 0.0) throw std::runtime_error("every seesaw restart failed in the SDP solver");
  best.history = {best.value};
  best.kind = best.value >= best.norm_bound - 1e-6 ? EstimateKind::exact : EstimateKind::lower_bound;
  return best;
}

GammaEstimate sup_norm(const WitnessFamily& fam, const CMat& a, int n_max, const GammaOptions& opts) {
  require(n_max >= 1, "n_max must be at least 1");
  GammaEstimate best;
  std::vector<double> history;
  int solves = 0;
  int failed = 0;
  for (int n = 1; n <= n_max; ++n) {
    GammaEstimate e = sup_norm_fixed_n(fam, a, n, opts);
    solves += e.sdp_solves;
    failed += e.failed_restarts;
    if (n == 1 || e.value > best.value) best = e;
    history.push_back(best.value);
    if (best.value >= best.norm_bound - opts.closure_tol) break;
  }
  best.history = std::move(history);
  best.sdp_solves = solves;
  best.failed_restarts = failed;
  best.kind = best.value >= best.norm_bound - 1e-6 ? EstimateKind::exact : EstimateKind::lower_bound;
  return best;
}

GammaEstimate gamma_fixed_n(const OperatorSpaceSpec& v, const LevelElement& x, int n, const GammaOptions& opts) {
  return sup_norm_fixed_n(sn_family(v), realize(v, x), n, opts);
}

GammaEstimate gamma(const OperatorSpaceSpec& v, const LevelElement& x, int n_max, const GammaOptions& opts) {
  if (n_max <= 0) n_max = v.d * x.k;
  return sup_norm(sn_family(v), realize(v, x), n_max, opts);
}

// ---------------------------------------------------------------------------

namespace {

// Real-linear functional c ↦ Re sum_{a,b,t} w_abt c_abt with
// w_abt = <xi_a, ψ(G_t) eta_b>, returned as the coefficient-space gradient conj(w).
LevelElement linear_gradient(const OperatorSpaceSpec& v, int k, const std::function<CMat(const CMat&)>& psi,
                             const CVec& xi, const CVec& eta) {
  const int m = v.dim();
  std::vector<CMat> images;
  for (const auto& g : v.basis) images.push_back(psi(g));
  const auto n = static_cast<int>(images.front().rows());
  LevelElement grad = LevelElement::zero(k, m);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      for (int t = 0; t < m; ++t) {
        const cplx w = xi.segment(a * n, n).dot(images[t] * eta.segment(b * n, n));
        grad.at(a, b)(t) = std::conj(w);
      }
  return grad;
}

double coeff_norm(const LevelElement& x) {
  double s = 0.0;
  for (const auto& c : x.coeffs) s += c.squaredNorm();
  return std::sqrt(s);
}

}  // namespace

NcbEstimate sphere_search(const OperatorSpaceSpec& v, const WitnessFamily& fam, const NcbOptions& opts) {
  NcbEstimate out;
  out.kind = EstimateKind::heuristic;
  out.value = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= opts.k_max; ++k) {
    const int n_max = opts.n_max > 0 ? opts.n_max : v.d * k;
    for (int s = 0; s < opts.sphere_restarts; ++s) {
      Rng rng = seeded_rng(opts.gamma.seed, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(s), 0x5e7eu});
      LevelElement x = random_unit_element(v, k, rng);
      GammaEstimate g = sup_norm(fam, realize(v, x), n_max, opts.gamma);
      ++out.gamma_evaluations;
      double step = 0.5;
      for (int t = 0; t < opts.descent_steps; ++t) {
        const LevelElement gg = linear_gradient(
            v, k, [&](const CMat& a) { return ncb::apply(g.witness, a); }, g.xi, g.eta);
        const SingularPair np = top_singular_pair(realize(v, x));
        const LevelElement gn = linear_gradient(
            v, k, [](const CMat& a) { return a; }, np.left, np.right);
        LevelElement dir = add(gg, scaled(gn, -g.value));
        const double dn = coeff_norm(dir);
        if (dn < 1e-12) break;
        dir = scaled(dir, -step * coeff_norm(x) / dn);
        LevelElement cand = add(x, dir);
        cand = scaled(cand, 1.0 / level_norm(v, cand));
        GammaEstimate gc = sup_norm(fam, realize(v, cand), n_max, opts.gamma);
        ++out.gamma_evaluations;
        if (gc.value < g.value - 1e-12) {
          x = std::move(cand);
          g = std::move(gc);
          step = std::min(1.0, step * 1.5);
        } else {
          step *= 0.5;
        }
      }
      if (g.value < out.value) {
        out.value = g.value;
        out.witness_x = x;
        out.gamma_at_witness = g;
      }
    }
  }
  return out;
}

NcbEstimate ncb_estimate(const OperatorSpaceSpec& v, const NcbOptions& opts) {
  require(v.u.has_value(), "n_cb needs a distinguished element");
  if (has_unitary_realization(v)) {
    NcbEstimate out;
    out.value = 1.0;
    out.kind = EstimateKind::exact;
    out.unitary_shortcut = true;
    return out;
  }
  return sphere_search(v, sn_family(v), opts);
}

// ---------------------------------------------------------------------------

QuotientData quotient_Vu(const OperatorSpaceSpec& v, int k_max, double kernel_tol, const GammaOptions& opts) {
  require(v.u.has_value(), "the quotient needs a distinguished element");
  const int m = v.dim();
  const CMat u = v.u_matrix();
  Eigen::JacobiSVD<CMat> usvd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVec s = usvd.singularValues();
  int r = 0;
  while (r < s.size() && s(r) >= 1.0 - 1e-9) ++r;
  const CMat u1 = usvd.matrixU().leftCols(r);
  const CMat w1 = usvd.matrixV().leftCols(r);

  CMat lmat(r * r, m);
  for (int t = 0; t < m; ++t) lmat.col(t) = (u1.adjoint() * v.basis[t] * w1).reshaped();
  Eigen::JacobiSVD<CMat> lsvd(lmat, Eigen::ComputeFullV);
  const RVec ls = lsvd.singularValues();
  const double scale = std::max(1.0, ls.size() > 0 ? ls(0) : 0.0);
  int rank = 0;
  while (rank < ls.size() && ls(rank) > 1e-10 * scale) ++rank;

  QuotientData q;
  for (int i = rank; i < ls.size(); ++i)
    if (ls(i) > 1e-12 * scale) {
      q.ambiguous = true;
      q.warnings.push_back("near-singular direction in the annihilator test");
    }
  const CMat vv = lsvd.matrixV();
  for (int i = 0; i < m; ++i) (i < rank ? q.quotient_basis : q.kernel).push_back(vv.col(i));
  q.q_map = vv.leftCols(rank).adjoint();

  for (const auto& kv : q.kernel) {
    const LevelElement x = LevelElement::scalar(kv / spec_norm(v.realize(kv)));
    const double g = gamma(v, x, v.d, opts).value;
    q.kernel_gamma.push_back(g);
    if (g > kernel_tol) {
      q.ambiguous = true;
      q.warnings.push_back(g <= 10.0 * kernel_tol ? "kernel direction inside the guard band"
                                                  : "kernel direction with large seesaw value");
    }
  }

  Rng rng = seeded_rng(opts.seed, {0x0b0bu});
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 1; k <= k_max; ++k) {
    std::vector<LevelElement> elems;
    if (k == 1) {
      for (const auto& c : q.quotient_basis) elems.push_back(LevelElement::scalar(c));
      elems.push_back(LevelElement::scalar(*v.u));
    } else {
      for (int rep = 0; rep < 2 && rank > 0; ++rep) {
        LevelElement x = LevelElement::zero(k, m);
        for (auto& c : x.coeffs) {
          CVec z(rank);
          for (int i = 0; i < rank; ++i) z(i) = cplx(gauss(rng), gauss(rng));
          c = vv.leftCols(rank) * z;
        }
        elems.push_back(x);
      }
    }
    for (auto& x : elems) {
      x = scaled(x, 1.0 / level_norm(v, x));
      const double g = gamma(v, x, 0, opts).value;
      q.table.push_back({k, x, g});
    }
  }
  return q;
}

InducedMap factor_through_quotient(const OperatorSpaceSpec& v, const QuotientData& q, const ChoiMatrix& psi,
                                   double tol) {
  require(psi.d == v.d, "map domain does not match the space");
  for (const auto& kv : q.kernel)
    if (spec_norm(ncb::apply(psi, v.realize(kv))) > tol)
      throw ContractViolation("map does not vanish on the detected kernel");
  InducedMap out;
  for (const auto& c : q.quotient_basis) out.images.push_back(ncb::apply(psi, v.realize(c)));
  for (int t = 0; t < v.dim(); ++t) {
    CMat rebuilt = CMat::Zero(psi.n, psi.n);
    for (std::size_t s = 0; s < out.images.size(); ++s)
      rebuilt += q.q_map(static_cast<int>(s), t) * out.images[s];
    out.residual = std::max(out.residual, spec_norm(ncb::apply(psi, v.basis[t]) - rebuilt));
  }
  return out;
}

}  // namespace ncb

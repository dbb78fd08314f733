// SPDX-License-Identifier: Apache-2.0

#include "ncb/banach.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <random>

namespace ncb {

namespace {

constexpr double kFaceTol = 1e-9;

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

CVec concat(const CVec& a, const CVec& b) {
  CVec out(a.size() + b.size());
  out << a, b;
  return out;
}

CVec gaussian_coeffs(int m, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVec c(m);
  for (int i = 0; i < m; ++i) c(i) = cplx(g(rng), g(rng));
  return c;
}

CVec trace_pairing_coeffs(const OperatorSpaceSpec& v, const CMat& f) {
  CVec out(v.dim());
  for (int t = 0; t < v.dim(); ++t) out(t) = (f * v.basis[t]).trace();
  return out;
}

struct TopSubspaces {
  CMat u1;
  CMat w1;
};

TopSubspaces top_subspaces(const CMat& u) {
  Eigen::JacobiSVD<CMat> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  int r = 0;
  while (r < svd.singularValues().size() && svd.singularValues()(r) >= 1.0 - kFaceTol) ++r;
  require(r >= 1, "infeasible face: the distinguished element has norm below 1");
  return {svd.matrixU().leftCols(r), svd.matrixV().leftCols(r)};
}

// Golden-section maximization of a periodic function: 33-point grid, then
// refinement around the three best grid points.
double scan_theta(const std::function<double(double)>& f, double* arg) {
  constexpr int kGrid = 33;
  const double step = 2.0 * std::numbers::pi / kGrid;
  std::vector<std::pair<double, int>> grid;
  for (int j = 0; j < kGrid; ++j) grid.emplace_back(f(j * step), j);
  std::sort(grid.begin(), grid.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  double best = grid.front().first;
  double best_theta = grid.front().second * step;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int b = 0; b < 3; ++b) {
    double lo = (grid[b].second - 1) * step;
    double hi = (grid[b].second + 1) * step;
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > 1e-9) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = f(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = f(x1);
      }
    }
    for (auto [val, th] : {std::pair{f1, x1}, std::pair{f2, x2}})
      if (val > best) {
        best = val;
        best_theta = th;
      }
  }
  if (arg) *arg = best_theta;
  return best;
}

}  // namespace

DualWitness norming_functional(const NormedSpaceSpec& x, const CVec& z) {
  require(z.size() == x.m, "coefficient length mismatch");
  DualWitness w;
  switch (x.kind) {
    case NormedKind::polytope:
    case NormedKind::sup_over_points: {
      int j = 0;
      double best = -1.0;
      for (int i = 0; i < static_cast<int>(x.functionals.size()); ++i) {
        const double a = std::abs(apply_functional(x.functionals[i], z));
        if (a > best) {
          best = a;
          j = i;
        }
      }
      const cplx val = apply_functional(x.functionals[j], z);
      const cplx phase = std::abs(val) > 0.0 ? std::abs(val) / val : cplx(1.0);
      w.f = phase * x.functionals[j];
      w.vertex = j;
      break;
    }
    case NormedKind::matrix_realized: {
      const SingularPair sp = top_singular_pair(x.space->realize(z));
      const CMat f = sp.right * sp.left.adjoint();
      w.f = trace_pairing_coeffs(*x.space, f);
      w.trace_class = f;
      break;
    }
    case NormedKind::l1_sum: {
      const DualWitness a = norming_functional(*x.left, z.head(x.left->m));
      const DualWitness b = norming_functional(*x.right, z.tail(x.right->m));
      w.f = concat(a.f, b.f);
      break;
    }
    case NormedKind::linf_sum: {
      const CVec zl = z.head(x.left->m);
      const CVec zr = z.tail(x.right->m);
      if (norm(*x.left, zl) >= norm(*x.right, zr))
        w.f = concat(norming_functional(*x.left, zl).f, CVec::Zero(x.right->m));
      else
        w.f = concat(CVec::Zero(x.left->m), norming_functional(*x.right, zr).f);
      break;
    }
  }
  return w;
}

double face_support(const NormedSpaceSpec& x, const std::optional<CVec>& u, const CVec& z,
                    DualWitness* attaining) {
  require(z.size() == x.m, "coefficient length mismatch");
  if (!u) {
    if (attaining) *attaining = norming_functional(x, z);
    return norm(x, z);
  }
  DualWitness w;
  double h = 0.0;
  switch (x.kind) {
    case NormedKind::polytope:
    case NormedKind::sup_over_points: {
      h = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < static_cast<int>(x.functionals.size()); ++i) {
        const cplx fu = apply_functional(x.functionals[i], *u);
        if (std::abs(fu) < 1.0 - kFaceTol) continue;
        const CVec g = x.functionals[i] / fu;
        const double val = apply_functional(g, z).real();
        if (val > h) {
          h = val;
          w.f = g;
          w.vertex = i;
        }
      }
      require(w.vertex.has_value(), "infeasible face: no functional attains the norm at u");
      break;
    }
    case NormedKind::matrix_realized: {
      const TopSubspaces s = top_subspaces(x.space->realize(*u));
      const HermEig e = herm_eig(herm_part(s.u1.adjoint() * x.space->realize(z) * s.w1));
      h = e.values(0);
      const CVec top = e.vectors.col(0);
      const CMat f = s.w1 * top * top.adjoint() * s.u1.adjoint();
      w.f = trace_pairing_coeffs(*x.space, f);
      w.trace_class = f;
      break;
    }
    case NormedKind::l1_sum: {
      const CVec ul = u->head(x.left->m);
      const CVec ur = u->tail(x.right->m);
      const double a = norm(*x.left, ul);
      const double b = norm(*x.right, ur);
      DualWitness wl, wr;
      h = face_support(*x.left, a > 1e-12 ? std::optional<CVec>(ul / a) : std::nullopt, z.head(x.left->m), &wl) +
          face_support(*x.right, b > 1e-12 ? std::optional<CVec>(ur / b) : std::nullopt, z.tail(x.right->m), &wr);
      w.f = concat(wl.f, wr.f);
      break;
    }
    case NormedKind::linf_sum: {
      const CVec ul = u->head(x.left->m);
      const CVec ur = u->tail(x.right->m);
      h = -std::numeric_limits<double>::infinity();
      if (norm(*x.left, ul) >= 1.0 - kFaceTol) {
        DualWitness wl;
        h = face_support(*x.left, ul, z.head(x.left->m), &wl);
        w.f = concat(wl.f, CVec::Zero(x.right->m));
      }
      if (norm(*x.right, ur) >= 1.0 - kFaceTol) {
        DualWitness wr;
        const double hr = face_support(*x.right, ur, z.tail(x.right->m), &wr);
        if (hr > h) {
          h = hr;
          w.f = concat(CVec::Zero(x.left->m), wr.f);
        }
      }
      require(std::isfinite(h), "infeasible face: neither part of u has norm 1");
      break;
    }
  }
  w.value_at_u = apply_functional(w.f, *u);
  if (attaining) *attaining = std::move(w);
  return h;
}

namespace {

// The face support along the phase orbit of a fixed z, θ ↦ h(e^{-iθ} z),
// precomputed so each evaluation costs one small eigenvalue problem.
struct PhaseOrbit {
  NormedKind kind = NormedKind::polytope;
  double constant = 0.0;       // full dual ball: ‖z‖
  bool full = false;
  std::vector<cplx> values;    // polytope: g_i(z)
  CMat h, k;                   // matrix: U_1* z W_1 = h + i k
  std::unique_ptr<PhaseOrbit> left, right;

  double operator()(double theta) const {
    if (full) return constant;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    switch (kind) {
      case NormedKind::polytope:
      case NormedKind::sup_over_points: {
        double best = -std::numeric_limits<double>::infinity();
        for (const cplx& v : values) best = std::max(best, c * v.real() + s * v.imag());
        return best;
      }
      case NormedKind::matrix_realized:
        return lambda_max_small(c * h + s * k);
      case NormedKind::l1_sum:
        return (*left)(theta) + (*right)(theta);
      case NormedKind::linf_sum:
        return std::max(left ? (*left)(theta) : -std::numeric_limits<double>::infinity(),
                        right ? (*right)(theta) : -std::numeric_limits<double>::infinity());
    }
    return 0.0;
  }

  static double lambda_max_small(const CMat& a) {
    if (a.rows() == 1) return a(0, 0).real();
    if (a.rows() == 2) {
      const double p = 0.5 * (a(0, 0).real() + a(1, 1).real());
      const double q = 0.5 * (a(0, 0).real() - a(1, 1).real());
      return p + std::sqrt(q * q + std::norm(a(0, 1)));
    }
    return Eigen::SelfAdjointEigenSolver<CMat>(a, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  }
};

std::unique_ptr<PhaseOrbit> phase_orbit(const NormedSpaceSpec& x, const std::optional<CVec>& u, const CVec& z) {
  auto o = std::make_unique<PhaseOrbit>();
  o->kind = x.kind;
  if (!u) {
    o->full = true;
    o->constant = norm(x, z);
    return o;
  }
  switch (x.kind) {
    case NormedKind::polytope:
    case NormedKind::sup_over_points:
      for (const auto& f : x.functionals) {
        const cplx fu = apply_functional(f, *u);
        if (std::abs(fu) >= 1.0 - kFaceTol) o->values.push_back(apply_functional(f, z) / fu);
      }
      require(!o->values.empty(), "infeasible face: no functional attains the norm at u");
      break;
    case NormedKind::matrix_realized: {
      const TopSubspaces s = top_subspaces(x.space->realize(*u));
      const CMat a = s.u1.adjoint() * x.space->realize(z) * s.w1;
      o->h = herm_part(a);
      o->k = skew_part(a);
      break;
    }
    case NormedKind::l1_sum: {
      const CVec ul = u->head(x.left->m);
      const CVec ur = u->tail(x.right->m);
      const double a = norm(*x.left, ul);
      const double b = norm(*x.right, ur);
      o->left = phase_orbit(*x.left, a > 1e-12 ? std::optional<CVec>(ul / a) : std::nullopt, z.head(x.left->m));
      o->right = phase_orbit(*x.right, b > 1e-12 ? std::optional<CVec>(ur / b) : std::nullopt, z.tail(x.right->m));
      break;
    }
    case NormedKind::linf_sum: {
      const CVec ul = u->head(x.left->m);
      const CVec ur = u->tail(x.right->m);
      if (norm(*x.left, ul) >= 1.0 - kFaceTol) o->left = phase_orbit(*x.left, ul, z.head(x.left->m));
      if (norm(*x.right, ur) >= 1.0 - kFaceTol) o->right = phase_orbit(*x.right, ur, z.tail(x.right->m));
      require(o->left || o->right, "infeasible face: neither part of u has norm 1");
      break;
    }
  }
  return o;
}

}  // namespace

ClassicGamma gamma_classic(const NormedSpaceSpec& x, const CVec& u, const CVec& z) {
  require(u.size() == x.m && z.size() == x.m, "coefficient length mismatch");
  require(std::abs(norm(x, u) - 1.0) <= kFaceTol, "infeasible face: u must have norm 1");
  ClassicGamma out;
  if (x.kind == NormedKind::polytope || x.kind == NormedKind::sup_over_points) {
    // the face is a polytope; γ is the largest vertex modulus
    double best = -1.0;
    for (int i = 0; i < static_cast<int>(x.functionals.size()); ++i) {
      const cplx fu = apply_functional(x.functionals[i], u);
      if (std::abs(fu) < 1.0 - kFaceTol) continue;
      const CVec g = x.functionals[i] / fu;
      const cplx gz = apply_functional(g, z);
      if (std::abs(gz) > best) {
        best = std::abs(gz);
        out.witness.f = g;
        out.witness.vertex = i;
        out.theta = std::arg(gz);
      }
    }
    require(best >= 0.0, "infeasible face: no functional attains the norm at u");
    out.value = best;
    out.witness.value_at_u = apply_functional(out.witness.f, u);
    return out;
  }
  const auto orbit = phase_orbit(x, u, z);
  double theta = 0.0;
  scan_theta(std::cref(*orbit), &theta);
  face_support(x, u, std::polar(1.0, -theta) * z, &out.witness);
  const cplx fz = apply_functional(out.witness.f, z);
  out.value = std::abs(fz);
  out.theta = std::arg(fz);
  return out;
}

ClassicGamma gamma_classic(const NormedSpaceSpec& x, const CVec& z) {
  require(x.u.has_value(), "the spec has no distinguished element");
  return gamma_classic(x, *x.u, z);
}

// ---------------------------------------------------------------------------

NClassicEstimate n_classic(const NormedSpaceSpec& x, const NClassicOptions& opts) {
  require(x.u.has_value(), "the spec has no distinguished element");
  const CVec& u = *x.u;
  const int m = x.m;
  NClassicEstimate out;
  out.value = std::numeric_limits<double>::infinity();

  auto ratio = [&](const CVec& c, ClassicGamma* g) {
    ++out.evaluations;
    const double nc = norm(x, c);
    ClassicGamma r = gamma_classic(x, u, c);
    const double v = r.value / nc;
    if (g) *g = std::move(r);
    return v;
  };

  std::vector<CVec> compass;
  for (int t = 0; t < m; ++t)
    for (cplx s : {cplx(1.0), cplx(-1.0), cplx(0.0, 1.0), cplx(0.0, -1.0)}) compass.push_back(s * CVec::Unit(m, t));

  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    Rng rng = seeded_rng(opts.seed, {static_cast<std::uint64_t>(r), 0xba4au});
    CVec c = gaussian_coeffs(m, rng);
    c /= norm(x, c);
    ClassicGamma g;
    double val = ratio(c, &g);

    double step = opts.initial_step;
    for (int it = 0; it < opts.descent_steps && step >= opts.min_step; ++it) {
      const DualWitness phi = norming_functional(x, c);
      const CVec grad = std::polar(1.0, g.theta) * g.witness.f.conjugate() - val * phi.f.conjugate();
      const double gn = grad.norm();
      if (gn < 1e-14) break;
      bool moved = false;
      while (step >= opts.min_step) {
        CVec cand = c - (step * c.norm() / gn) * grad;
        cand /= norm(x, cand);
        ClassicGamma gc;
        const double vc = ratio(cand, &gc);
        if (vc < val - 1e-15) {
          c = cand;
          g = std::move(gc);
          val = vc;
          step = std::min(opts.initial_step, 1.5 * step);
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }

    // compass search on the (possibly nonsmooth) ratio
    std::vector<CVec> dirs = compass;
    for (int j = 0; j < 2 * m; ++j) {
      CVec d = gaussian_coeffs(m, rng);
      dirs.push_back(d / d.norm());
    }
    step = opts.initial_step;
    const int budget = out.evaluations + 400 * m;
    while (step >= opts.min_step && out.evaluations < budget) {
      bool improved = false;
      for (const CVec& d : dirs) {
        CVec cand = c + (step * c.norm()) * d;
        cand /= norm(x, cand);
        ClassicGamma gc;
        const double vc = ratio(cand, &gc);
        if (vc < val - 1e-15) {
          c = cand;
          g = std::move(gc);
          val = vc;
          improved = true;
          break;
        }
      }
      if (!improved) step *= 0.5;
    }

    if (val < out.value) {
      out.value = val;
      out.witness_x = c;
      out.at_witness = g;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

NormedSpaceSpec direct_sum_1(const NormedSpaceSpec& x, const NormedSpaceSpec& y) {
  require(x.u.has_value(), "the first summand needs a distinguished element");
  return make_sum(NormedKind::l1_sum, x, y, concat(*x.u, CVec::Zero(y.m)));
}

NSumReport check_n_sum(const NormedSpaceSpec& x, const NormedSpaceSpec& y, int pairs, const NClassicOptions& opts,
                       double n_tol, double identity_tol) {
  const NormedSpaceSpec f = direct_sum_1(x, y);
  NSumReport rep;
  rep.pairs = pairs;
  Rng rng = seeded_rng(opts.seed, {0x5a11u});
  for (int p = 0; p < pairs; ++p) {
    const CVec a = gaussian_coeffs(x.m, rng);
    const CVec b = gaussian_coeffs(y.m, rng);
    const double lhs = gamma_classic(f, concat(a, b)).value;
    const double rhs = gamma_classic(x, a).value + norm(y, b);
    rep.identity_max_error = std::max(rep.identity_max_error, std::abs(lhs - rhs));
  }
  rep.n_x = n_classic(x, opts).value;
  rep.n_sum = n_classic(f, opts).value;
  rep.passed = rep.identity_max_error <= identity_tol && std::abs(rep.n_x - rep.n_sum) <= n_tol;
  return rep;
}

GuSumReport check_gu_sum(const NormedSpaceSpec& x, const NormedSpaceSpec& y, const CVec& u, const CVec& v,
                         int samples, std::uint64_t seed) {
  const NormedSpaceSpec z = make_sum(NormedKind::linf_sum, x, y, concat(u, v));
  GuSumReport rep;
  rep.norm_u = norm(x, u);
  rep.norm_v = norm(y, v);
  rep.samples = samples;
  const bool full_u = rep.norm_u >= 1.0 - kFaceTol;
  const bool full_v = rep.norm_v >= 1.0 - kFaceTol;
  rep.degeneracy_expected = !(full_u && full_v);
  Rng rng = seeded_rng(seed, {0x6a5au});
  rep.min_gamma = std::numeric_limits<double>::infinity();
  auto probe = [&](bool left_part) {
    const NormedSpaceSpec& part = left_part ? x : y;
    CVec c = gaussian_coeffs(part.m, rng);
    c /= norm(part, c);
    const CVec e = left_part ? concat(c, CVec::Zero(y.m)) : concat(CVec::Zero(x.m), c);
    const double g = gamma_classic(z, e).value;
    if (g < rep.min_gamma) {
      rep.min_gamma = g;
      rep.witness = e;
    }
  };
  for (int s = 0; s < samples; ++s) {
    if (!full_u || (full_u && full_v)) probe(true);
    if (!full_v || (full_u && full_v)) probe(false);
  }
  rep.passed = rep.degeneracy_expected ? rep.min_gamma <= 1e-6 : rep.min_gamma > 1e-6;
  return rep;
}

MinComparisonReport min_comparison(const NormedSpaceSpec& x, int k, int samples, std::uint64_t seed,
                                   const NClassicOptions& opts) {
  require(x.kind == NormedKind::sup_over_points, "min comparison needs a sup_over_points space");
  require(x.u.has_value(), "the spec has no distinguished element");
  const auto npts = static_cast<int>(x.functionals.size());

  // S(X;u) samples: the face vertices and random convex combinations of them
  std::vector<CVec> face;
  for (const auto& f : x.functionals) {
    const cplx fu = apply_functional(f, *x.u);
    if (std::abs(fu) >= 1.0 - kFaceTol) face.push_back(f / fu);
  }
  Rng rng = seeded_rng(seed, {0x314u, static_cast<std::uint64_t>(k)});
  std::vector<CVec> sampled = face;
  std::exponential_distribution<double> expo(1.0);
  for (int s = 0; s < 10 && face.size() > 1; ++s) {
    CVec f = CVec::Zero(x.m);
    double total = 0.0;
    for (const auto& g : face) {
      const double w = expo(rng);
      f += w * g;
      total += w;
    }
    sampled.push_back(f / total);
  }

  MinComparisonReport rep;
  rep.k = k;
  rep.n_estimate = n_classic(x, opts).value;
  rep.min_margin = std::numeric_limits<double>::infinity();
  auto evaluate = [&](const CVec& f, const std::vector<CVec>& entries) {
    CMat out(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) out(i, j) = apply_functional(f, entries[i * k + j]);
    return out;
  };
  for (int s = 0; s < samples; ++s) {
    std::vector<CVec> entries;
    for (int e = 0; e < k * k; ++e) entries.push_back(gaussian_coeffs(x.m, rng));
    MinSample ms;
    for (int w = 0; w < npts; ++w) {
      const double nw = spec_norm(evaluate(x.functionals[w], entries));
      if (nw > ms.norm) {
        ms.norm = nw;
        ms.omega = w;
      }
    }
    const SingularPair sp = top_singular_pair(evaluate(x.functionals[ms.omega], entries));
    ms.c = sp.left;
    ms.d = sp.right;
    CVec y = CVec::Zero(x.m);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) y += std::conj(ms.c(i)) * ms.d(j) * entries[i * k + j];
    ms.compressed_norm = norm(x, y);
    for (const auto& f : sampled) ms.sup_sampled = std::max(ms.sup_sampled, spec_norm(evaluate(f, entries)) / ms.norm);
    rep.max_attainment_error = std::max(rep.max_attainment_error, std::abs(ms.norm - ms.compressed_norm));
    rep.min_margin = std::min(rep.min_margin, ms.sup_sampled - rep.n_estimate);
    rep.samples.push_back(std::move(ms));
  }
  rep.passed = rep.max_attainment_error <= 1e-8 && rep.min_margin >= -1e-6;
  return rep;
}

}  // namespace ncb

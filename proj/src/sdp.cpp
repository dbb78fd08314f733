// SPDX-License-Identifier: Apache-2.0
//
// Infeasible-start primal-dual path following (HKM direction, Mehrotra
// predictor-corrector) on the real symmetric embedding of the problem.

#include "ncb/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "json.hpp"

#include "ncb/sdp_cache.hpp"
#include "ncb/sdp_schur.hpp"

namespace ncb::sdp {

std::string to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::max_iterations: return "max-iterations";
  }
  return "unknown";
}

double Functional::evaluate(const std::vector<CMat>& blocks) const {
  double s = 0.0;
  for (const auto& t : terms) s += std::real(t.coef * blocks[t.block](t.row, t.col));
  return s;
}

int Problem::add_block(std::string name, int dim, BlockKind kind) {
  if (dim <= 0) throw ContractViolation("add_block: dimension must be positive");
  blocks_.push_back(BlockSpec{std::move(name), dim, kind});
  return static_cast<int>(blocks_.size()) - 1;
}

void Problem::add_constraint(Functional lhs, Relation rel, double rhs) {
  constraints_.push_back(ConstraintSpec{std::move(lhs), rel, rhs});
}

void Problem::set_objective(Functional f, Sense sense) {
  objective_ = std::move(f);
  sense_ = sense;
}

void Problem::add_complex_equality(const std::vector<Term>& terms, cplx target) {
  Functional re;
  Functional im;
  for (const auto& t : terms) {
    re.add(t.block, t.row, t.col, t.coef);
    // Im z = Re(-i z)
    im.add(t.block, t.row, t.col, cplx(0.0, -1.0) * t.coef);
  }
  add_equality(std::move(re), target.real());
  add_equality(std::move(im), target.imag());
}

void Problem::validate() const {
  auto check = [&](const Functional& f, const std::string& where) {
    for (const auto& t : f.terms) {
      if (t.block < 0 || t.block >= static_cast<int>(blocks_.size()))
        throw ContractViolation(where + ": unknown block " + std::to_string(t.block));
      const int n = blocks_[t.block].dim;
      if (t.row < 0 || t.col < 0 || t.row >= n || t.col >= n)
        throw ContractViolation(where + ": entry out of range in block " + blocks_[t.block].name);
    }
  };
  check(objective_, "objective");
  for (std::size_t i = 0; i < constraints_.size(); ++i)
    check(constraints_[i].lhs, "constraint " + std::to_string(i));
}

namespace {

nlohmann::json functional_json(const Functional& f) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : f.terms)
    out.push_back({t.block, t.row, t.col, t.coef.real(), t.coef.imag()});
  return out;
}

}  // namespace

std::string Problem::canonical_json() const {
  nlohmann::json j;
  j["schema"] = "opspace-sdp/1";
  j["sense"] = sense_ == Sense::maximize ? "maximize" : "minimize";
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : blocks_)
    blocks.push_back({{"name", b.name},
                      {"dim", b.dim},
                      {"kind", b.kind == BlockKind::hermitian ? "hermitian" : "real"}});
  j["blocks"] = blocks;
  j["objective"] = functional_json(objective_);
  nlohmann::json cons = nlohmann::json::array();
  for (const auto& c : constraints_) {
    const char* rel = c.relation == Relation::equal        ? "=="
                      : c.relation == Relation::less_equal ? "<="
                                                           : ">=";
    cons.push_back({{"lhs", functional_json(c.lhs)}, {"rel", rel}, {"rhs", c.rhs}});
  }
  j["constraints"] = cons;
  return j.dump();
}

double constraint_residual(const Problem& problem, const std::vector<CMat>& blocks) {
  double worst = 0.0;
  for (const auto& c : problem.constraints()) {
    const double v = c.lhs.evaluate(blocks) - c.rhs;
    switch (c.relation) {
      case Relation::equal: worst = std::max(worst, std::abs(v)); break;
      case Relation::less_equal: worst = std::max(worst, v); break;
      case Relation::greater_equal: worst = std::max(worst, -v); break;
    }
  }
  return worst;
}

namespace {

// ---------------------------------------------------------------------------
// Lowering to real equality form: min <C, X> s.t. <A_i, X> = b_i, X >= 0.

struct RealForm {
  std::vector<int> dims;
  std::vector<ConstraintMatrix> a;
  std::vector<double> b;
  std::vector<RMat> c;
  double sign = 1.0;  // user objective = sign * internal objective
};

using EntryMap = std::map<std::tuple<int, int, int>, double>;

void put_sym(EntryMap& m, int block, int p, int q, double w) {
  if (w == 0.0) return;
  if (p == q) {
    m[{block, p, p}] += w;
  } else {
    m[{block, p, q}] += 0.5 * w;
    m[{block, q, p}] += 0.5 * w;
  }
}

void lower_term(EntryMap& m, const std::vector<BlockSpec>& blocks, const Term& t) {
  const auto& spec = blocks[t.block];
  if (spec.kind == BlockKind::real_symmetric) {
    put_sym(m, t.block, t.row, t.col, t.coef.real());
    return;
  }
  // Re(c X_ij) with X = A + iB embedded as [[A, -B], [B, A]]: the functional
  // is averaged over both copies so it is invariant under the structure
  // projection of the embedded variable.
  const int n = spec.dim;
  const int i = t.row;
  const int j = t.col;
  const double re = t.coef.real();
  const double im = t.coef.imag();
  put_sym(m, t.block, i, j, 0.5 * re);
  put_sym(m, t.block, n + i, n + j, 0.5 * re);
  put_sym(m, t.block, n + i, j, -0.5 * im);
  put_sym(m, t.block, i, n + j, 0.5 * im);
}

ConstraintMatrix to_matrix(const EntryMap& m) {
  ConstraintMatrix out;
  for (const auto& [key, v] : m) {
    if (v == 0.0) continue;
    out.entries.push_back(SymEntry{std::get<0>(key), std::get<1>(key), std::get<2>(key), v});
  }
  return out;
}

RealForm lower(const Problem& p) {
  RealForm rf;
  const auto& blocks = p.blocks();
  for (const auto& b : blocks)
    rf.dims.push_back(b.kind == BlockKind::hermitian ? 2 * b.dim : b.dim);

  for (const auto& c : p.constraints()) {
    EntryMap m;
    for (const auto& t : c.lhs.terms) lower_term(m, blocks, t);
    if (c.relation != Relation::equal) {
      const int slack = static_cast<int>(rf.dims.size());
      rf.dims.push_back(1);
      m[{slack, 0, 0}] = c.relation == Relation::less_equal ? 1.0 : -1.0;
    }
    rf.a.push_back(to_matrix(m));
    rf.b.push_back(c.rhs);
  }

  rf.sign = p.sense() == Sense::minimize ? 1.0 : -1.0;
  EntryMap obj;
  for (const auto& t : p.objective().terms) lower_term(obj, blocks, t);
  rf.c.resize(rf.dims.size());
  for (std::size_t k = 0; k < rf.dims.size(); ++k) rf.c[k] = RMat::Zero(rf.dims[k], rf.dims[k]);
  for (const auto& [key, v] : obj)
    rf.c[std::get<0>(key)](std::get<1>(key), std::get<2>(key)) += rf.sign * v;
  return rf;
}

double sparse_dot(const ConstraintMatrix& x, const ConstraintMatrix& y) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  auto key = [](const SymEntry& e) { return std::make_tuple(e.block, e.row, e.col); };
  while (i < x.entries.size() && j < y.entries.size()) {
    const auto kx = key(x.entries[i]);
    const auto ky = key(y.entries[j]);
    if (kx < ky) {
      ++i;
    } else if (ky < kx) {
      ++j;
    } else {
      s += x.entries[i].val * y.entries[j].val;
      ++i;
      ++j;
    }
  }
  return s;
}

// Applies A to a dense block-diagonal operand.
RVec apply_a(const std::vector<ConstraintMatrix>& a, const std::vector<RMat>& x) {
  RVec out(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) out(i) = a[i].dot(x);
  return out;
}

std::vector<RMat> apply_at(const std::vector<ConstraintMatrix>& a, const RVec& y,
                           const std::vector<int>& dims) {
  std::vector<RMat> out(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) out[k] = RMat::Zero(dims[k], dims[k]);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (y(i) == 0.0) continue;
    for (const auto& e : a[i].entries) out[e.block](e.row, e.col) += y(i) * e.val;
  }
  return out;
}

double inner(const std::vector<RMat>& x, const std::vector<RMat>& y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (x[k].array() * y[k].array()).sum();
  return s;
}

double max_abs(const std::vector<RMat>& x) {
  double s = 0.0;
  for (const auto& m : x)
    if (m.size() > 0) s = std::max(s, m.cwiseAbs().maxCoeff());
  return s;
}

// Largest alpha with x + alpha * dx still PSD (infinity if unbounded).
double max_step(const RMat& x, const RMat& dx) {
  if (x.rows() == 1) {
    if (dx(0, 0) >= 0.0) return std::numeric_limits<double>::infinity();
    return -x(0, 0) / dx(0, 0);
  }
  Eigen::LLT<RMat> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  RMat w = llt.matrixL().solve(dx);
  w = llt.matrixL().solve(w.transpose()).transpose();
  w = 0.5 * (w + w.transpose());
  Eigen::SelfAdjointEigenSolver<RMat> es(w, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

double max_step(const std::vector<RMat>& x, const std::vector<RMat>& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) a = std::min(a, max_step(x[k], dx[k]));
  return a;
}

double lambda_max(const RMat& s) {
  if (s.rows() == 1) return s(0, 0);
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (s + s.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

double lambda_min(const RMat& s) {
  if (s.rows() == 1) return s(0, 0);
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (s + s.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

struct Presolve {
  std::vector<int> kept;  // indices of independent rows
  bool inconsistent = false;
  std::vector<double> certificate;  // over all rows, when inconsistent
};

// Removes linearly dependent equality rows via pivoted Cholesky of the Gram
// matrix; a dependent row with an inconsistent right-hand side yields a
// certificate y with A^T y = 0 and b^T y = 1.
Presolve presolve(const RealForm& rf) {
  const int m = static_cast<int>(rf.a.size());
  Presolve out;
  if (m == 0) return out;
  RMat g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) g(i, j) = g(j, i) = sparse_dot(rf.a[i], rf.a[j]);

  double scale = 0.0;
  for (int i = 0; i < m; ++i) scale = std::max(scale, g(i, i));
  const double tol = 1e-11 * std::max(scale, 1e-300);

  // Greedy Gram-Schmidt in the row space, in row order so that the choice
  // is deterministic and respects caller ordering.
  RMat l = RMat::Zero(m, m);  // l.col(r) holds coefficients of orthonormal vec r
  std::vector<int> chosen;
  std::vector<int> dependent;
  for (int j = 0; j < m; ++j) {
    // residual norm^2 of row j against chosen rows
    const int r = static_cast<int>(chosen.size());
    RVec proj(r);
    for (int k = 0; k < r; ++k) {
      double s = 0.0;
      for (int t = 0; t <= k; ++t) s += l(t, k) * g(chosen[t], j);
      proj(k) = s;
    }
    const double res2 = g(j, j) - proj.squaredNorm();
    if (res2 > 1e-10 * g(j, j) && res2 > tol) {
      // new orthonormal vector q_r = (a_j - sum_k proj_k q_k) / sqrt(res2)
      const double inv = 1.0 / std::sqrt(res2);
      RVec coef = RVec::Zero(r + 1);
      for (int k = 0; k < r; ++k)
        for (int t = 0; t <= k; ++t) coef(t) -= proj(k) * l(t, k);
      coef(r) += 1.0;
      for (int t = 0; t <= r; ++t) l(t, r) = coef(t) * inv;
      chosen.push_back(j);
    } else {
      dependent.push_back(j);
    }
  }
  out.kept = chosen;
  if (dependent.empty()) return out;

  const int r = static_cast<int>(chosen.size());
  RMat gii(r, r);
  for (int p = 0; p < r; ++p)
    for (int q = 0; q < r; ++q) gii(p, q) = g(chosen[p], chosen[q]);
  Eigen::LDLT<RMat> ldlt(gii);
  double bnorm = 0.0;
  for (double v : rf.b) bnorm = std::max(bnorm, std::abs(v));
  for (int j : dependent) {
    RVec rhs(r);
    for (int p = 0; p < r; ++p) rhs(p) = g(chosen[p], j);
    const RVec alpha = r > 0 ? RVec(ldlt.solve(rhs)) : RVec();
    double pred = 0.0;
    for (int p = 0; p < r; ++p) pred += alpha(p) * rf.b[chosen[p]];
    const double miss = rf.b[j] - pred;
    if (std::abs(miss) > 1e-9 * (1.0 + bnorm)) {
      out.inconsistent = true;
      out.certificate.assign(m, 0.0);
      out.certificate[j] = 1.0 / miss;
      for (int p = 0; p < r; ++p) out.certificate[chosen[p]] = -alpha(p) / miss;
      return out;
    }
  }
  return out;
}

struct IpmResult {
  Status status = Status::max_iterations;
  std::vector<RMat> x, z;
  RVec y;
  int iterations = 0;
  double pobj = 0.0, dobj = 0.0, pinf = 0.0, dinf = 0.0;
  std::optional<InfeasibilityCertificate> cert;
};

IpmResult ipm(const std::vector<int>& dims, const std::vector<ConstraintMatrix>& a,
              const RVec& b, const std::vector<RMat>& c, const Settings& s) {
  const int m = static_cast<int>(a.size());
  const std::size_t nb = dims.size();
  double ntot = 0.0;
  for (int d : dims) ntot += d;

  // Starting point, following the usual CSDP scaling heuristics.
  double amax = 0.0;
  double alpha0 = 0.0;
  for (int i = 0; i < m; ++i) {
    double nrm = 0.0;
    for (const auto& e : a[i].entries) nrm += e.val * e.val;
    nrm = std::sqrt(nrm);
    amax = std::max(amax, nrm);
    alpha0 = std::max(alpha0, (1.0 + std::abs(b(i))) / (1.0 + nrm));
  }
  double cnorm = 0.0;
  for (const auto& cb : c) cnorm += cb.squaredNorm();
  cnorm = std::sqrt(cnorm);
  alpha0 *= ntot;
  const double beta0 = (1.0 + std::max(amax, cnorm)) / std::sqrt(ntot);
  const double x0 = std::max(10.0 * alpha0, 1.0);
  const double z0 = std::max(10.0 * beta0, 1.0);

  IpmResult r;
  r.x.resize(nb);
  r.z.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    r.x[k] = x0 * RMat::Identity(dims[k], dims[k]);
    r.z[k] = z0 * RMat::Identity(dims[k], dims[k]);
  }
  r.y = RVec::Zero(m);

  const double bmax = b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0;
  const double cmax = max_abs(c);

  IpmResult best = r;
  double best_merit = std::numeric_limits<double>::infinity();
  int stalls = 0;

  std::vector<RMat> zinv(nb), rd(nb), t(nb), dx(nb), dz(nb), dxp(nb), dzp(nb), xrz(nb);

  for (int iter = 0; iter <= s.max_iter; ++iter) {
    r.iterations = iter;
    const RVec ax = apply_a(a, r.x);
    const RVec rp = b - ax;
    const auto aty = apply_at(a, r.y, dims);
    for (std::size_t k = 0; k < nb; ++k) rd[k] = c[k] - aty[k] - r.z[k];
    r.pobj = inner(c, r.x);
    r.dobj = b.dot(r.y);
    r.pinf = (rp.size() ? rp.cwiseAbs().maxCoeff() : 0.0) / (1.0 + bmax);
    r.dinf = max_abs(rd) / (1.0 + cmax);
    const double relgap = std::abs(r.pobj - r.dobj) / (1.0 + std::abs(r.pobj) + std::abs(r.dobj));
    const double merit = std::max({relgap / s.gap_tol, r.pinf / s.feas_tol, r.dinf / s.feas_tol});
    if (merit < best_merit) {
      best_merit = merit;
      best = r;
    }
    if (relgap <= s.gap_tol && r.pinf <= s.feas_tol && r.dinf <= s.feas_tol) {
      r.status = Status::optimal;
      return r;
    }

    // Primal infeasibility: a dual ray with b^T y = 1 and A^T y <= 0.
    if (r.dobj > 1e3 * (1.0 + std::abs(r.pobj)) || (r.dobj > 0.0 && iter == s.max_iter)) {
      const RVec yhat = r.y / r.dobj;
      const auto s_mat = apply_at(a, yhat, dims);
      double viol = -std::numeric_limits<double>::infinity();
      for (const auto& sb : s_mat) viol = std::max(viol, lambda_max(sb));
      if (viol <= 1e-9) {
        r.status = Status::infeasible;
        r.cert = InfeasibilityCertificate{std::vector<double>(yhat.data(), yhat.data() + m), viol};
        return r;
      }
    }
    if (iter == s.max_iter) break;

    const double mu = inner(r.x, r.z) / ntot;
    bool ok = true;
    for (std::size_t k = 0; k < nb; ++k) {
      Eigen::LLT<RMat> llt(r.z[k]);
      if (llt.info() != Eigen::Success) {
        ok = false;
        break;
      }
      zinv[k] = llt.solve(RMat::Identity(dims[k], dims[k]));
      zinv[k] = 0.5 * (zinv[k] + zinv[k].transpose());
    }
    if (!ok) break;

    RMat mm = assemble_schur_omp(a, r.x, zinv, s.threads);
    Eigen::LLT<RMat> mchol(mm);
    Eigen::LDLT<RMat> mldlt;
    bool use_ldlt = false;
    if (mchol.info() != Eigen::Success) {
      const double reg = 1e-13 * (1.0 + mm.diagonal().cwiseAbs().maxCoeff());
      mm.diagonal().array() += reg;
      mchol.compute(mm);
      if (mchol.info() != Eigen::Success) {
        mldlt.compute(mm);
        use_ldlt = true;
      }
    }
    auto msolve = [&](const RVec& rhs) -> RVec {
      return use_ldlt ? RVec(mldlt.solve(rhs)) : RVec(mchol.solve(rhs));
    };

    for (std::size_t k = 0; k < nb; ++k) xrz[k] = r.x[k] * rd[k] * zinv[k];
    const RVec a_xrz = apply_a(a, xrz);

    auto direction = [&](const std::vector<RMat>& tt, std::vector<RMat>& ddx,
                         std::vector<RMat>& ddz) -> RVec {
      const RVec rhs = b - apply_a(a, tt) + a_xrz;
      const RVec dy = msolve(rhs);
      const auto atdy = apply_at(a, dy, dims);
      for (std::size_t k = 0; k < nb; ++k) {
        ddz[k] = rd[k] - atdy[k];
        RMat d = tt[k] - r.x[k] - r.x[k] * ddz[k] * zinv[k];
        ddx[k] = 0.5 * (d + d.transpose());
      }
      return dy;
    };

    // Predictor.
    for (std::size_t k = 0; k < nb; ++k) t[k].setZero(dims[k], dims[k]);
    direction(t, dxp, dzp);
    const double ap = std::min(1.0, max_step(r.x, dxp));
    const double ad = std::min(1.0, max_step(r.z, dzp));
    double mu_aff = 0.0;
    for (std::size_t k = 0; k < nb; ++k)
      mu_aff += ((r.x[k] + ap * dxp[k]).array() * (r.z[k] + ad * dzp[k]).array()).sum();
    mu_aff /= ntot;
    double sigma = std::pow(std::max(0.0, mu_aff) / mu, 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector.
    for (std::size_t k = 0; k < nb; ++k) t[k] = (sigma * mu) * zinv[k] - dxp[k] * dzp[k] * zinv[k];
    const RVec dy = direction(t, dx, dz);

    const double sp = std::min(1.0, 0.95 * max_step(r.x, dx));
    const double sd = std::min(1.0, 0.95 * max_step(r.z, dz));
    if (sp < 1e-10 && sd < 1e-10) {
      if (++stalls >= 3) break;
    } else {
      stalls = 0;
    }
    for (std::size_t k = 0; k < nb; ++k) {
      r.x[k] += sp * dx[k];
      r.z[k] += sd * dz[k];
      r.x[k] = 0.5 * (r.x[k] + r.x[k].transpose());
      r.z[k] = 0.5 * (r.z[k] + r.z[k].transpose());
    }
    r.y += sd * dy;
  }
  best.status = Status::max_iterations;
  return best;
}

CMat recover_block(const RMat& xr, const BlockSpec& spec) {
  if (spec.kind == BlockKind::real_symmetric) return xr.cast<cplx>();
  const int n = spec.dim;
  CMat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double re = 0.5 * (xr(i, j) + xr(n + i, n + j));
      const double im = 0.5 * (xr(n + i, j) - xr(i, n + j));
      out(i, j) = cplx(re, im);
    }
  return herm_part(out);
}

Solution solve_uncached(const Problem& problem, const Settings& settings) {
  problem.validate();
  const RealForm rf = lower(problem);
  Solution sol;
  const int m = static_cast<int>(rf.a.size());
  const Presolve pre = presolve(rf);

  auto fill_blocks_zero = [&]() {
    sol.blocks.clear();
    for (const auto& b : problem.blocks()) sol.blocks.push_back(CMat::Zero(b.dim, b.dim));
  };

  if (pre.inconsistent) {
    sol.status = Status::infeasible;
    fill_blocks_zero();
    InfeasibilityCertificate cert;
    cert.multipliers = pre.certificate;
    RVec y = Eigen::Map<const RVec>(pre.certificate.data(), m);
    const auto s_mat = apply_at(rf.a, y, rf.dims);
    double viol = -std::numeric_limits<double>::infinity();
    for (const auto& sb : s_mat) viol = std::max(viol, lambda_max(sb));
    cert.max_violation = viol;
    sol.certificate = cert;
    sol.primal_infeasibility = INFINITY;
    return sol;
  }

  std::vector<ConstraintMatrix> a;
  RVec b(static_cast<Eigen::Index>(pre.kept.size()));
  for (std::size_t k = 0; k < pre.kept.size(); ++k) {
    a.push_back(rf.a[pre.kept[k]]);
    b(k) = rf.b[pre.kept[k]];
  }
  IpmResult res = ipm(rf.dims, a, b, rf.c, settings);

  sol.status = res.status;
  sol.iterations = res.iterations;
  sol.blocks.clear();
  for (std::size_t k = 0; k < problem.blocks().size(); ++k)
    sol.blocks.push_back(recover_block(res.x[k], problem.blocks()[k]));
  sol.primal_objective = rf.sign * res.pobj;
  sol.dual_objective = rf.sign * res.dobj;
  sol.gap = std::abs(sol.primal_objective - sol.dual_objective);
  sol.dual_infeasibility = res.dinf;
  sol.dual.assign(m, 0.0);
  for (std::size_t k = 0; k < pre.kept.size(); ++k) sol.dual[pre.kept[k]] = rf.sign * res.y(k);
  if (res.cert) {
    InfeasibilityCertificate cert;
    cert.max_violation = res.cert->max_violation;
    cert.multipliers.assign(m, 0.0);
    for (std::size_t k = 0; k < pre.kept.size(); ++k)
      cert.multipliers[pre.kept[k]] = res.cert->multipliers[k];
    sol.certificate = cert;
  }
  sol.primal_infeasibility = constraint_residual(problem, sol.blocks);
  double emin = std::numeric_limits<double>::infinity();
  for (const auto& xb : res.x) emin = std::min(emin, lambda_min(xb));
  sol.min_block_eigenvalue = emin;
  return sol;
}

}  // namespace

Solution solve(const Problem& problem, const Settings& settings) {
  if (settings.cache != nullptr) {
    if (auto hit = settings.cache->lookup(problem, settings)) return *hit;
  }
  Solution sol = solve_uncached(problem, settings);
  if (settings.cache != nullptr) settings.cache->store(problem, settings, sol);
  return sol;
}

Solution feasibility(const Problem& problem, const Settings& settings) {
  Problem p = problem;
  p.set_objective(Functional{}, Sense::minimize);
  return solve(p, settings);
}

}  // namespace ncb::sdp

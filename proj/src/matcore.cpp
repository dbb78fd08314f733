// SPDX-License-Identifier: Apache-2.0

#include "ncb/matcore.hpp"

#include <algorithm>
#include <cmath>

namespace ncb {

namespace {

void require_square(const CMat& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw ContractViolation(std::string(what) + ": matrix is not square (" +
                            std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + ")");
  }
}

void require_hermitian(const CMat& a, const char* what) {
  require_square(a, what);
  if (!is_hermitian(a)) {
    throw ContractViolation(std::string(what) + ": matrix is not Hermitian (defect " +
                            std::to_string(hermitian_defect(a)) + ")");
  }
}

}  // namespace

double hermitian_defect(const CMat& a) {
  if (a.rows() != a.cols()) return INFINITY;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = i; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - std::conj(a(j, i))));
  return worst;
}

bool is_hermitian(const CMat& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  // The operator norm is bounded by the Frobenius norm; the cheaper bound is
  // enough for a relative tolerance.
  return hermitian_defect(a) <= rel_tol * (1.0 + a.norm());
}

HermEig herm_eig(const CMat& a) {
  require_hermitian(a, "herm_eig");
  HermEig out;
  if (a.rows() == 0) return out;
  Eigen::SelfAdjointEigenSolver<CMat> es(herm_part(a));
  const Eigen::Index n = a.rows();
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = es.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = es.eigenvectors().col(n - 1 - k);
  }
  return out;
}

RVec herm_eigenvalues(const CMat& a) {
  require_hermitian(a, "herm_eigenvalues");
  if (a.rows() == 0) return RVec();
  Eigen::SelfAdjointEigenSolver<CMat> es(herm_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

double spec_norm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == 1 || a.cols() == 1) return a.norm();
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues()(0);
}

double trace_norm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues().sum();
}

SingularPair top_singular_pair(const CMat& a) {
  SingularPair out;
  if (a.size() == 0) return out;
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.value = svd.singularValues()(0);
  out.left = svd.matrixU().col(0);
  out.right = svd.matrixV().col(0);
  return out;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMat partial_trace(const CMat& a, int dim_first, int dim_second, TraceSide side) {
  require_square(a, "partial_trace");
  if (dim_first <= 0 || dim_second <= 0 || a.rows() != dim_first * dim_second) {
    throw ContractViolation("partial_trace: dimension mismatch (" +
                            std::to_string(a.rows()) + " != " +
                            std::to_string(dim_first) + "*" +
                            std::to_string(dim_second) + ")");
  }
  if (side == TraceSide::second) {
    CMat out = CMat::Zero(dim_first, dim_first);
    for (int i = 0; i < dim_first; ++i)
      for (int j = 0; j < dim_first; ++j)
        out(i, j) = a.block(i * dim_second, j * dim_second, dim_second, dim_second).trace();
    return out;
  }
  CMat out = CMat::Zero(dim_second, dim_second);
  for (int i = 0; i < dim_first; ++i)
    out += a.block(i * dim_second, i * dim_second, dim_second, dim_second);
  return out;
}

PsdReport psd_check(const CMat& a, double tol) {
  require_hermitian(a, "psd_check");
  PsdReport r;
  if (a.rows() == 0) {
    r.psd = true;
    return r;
  }
  const RVec ev = herm_eigenvalues(a);
  r.min_eigenvalue = ev(ev.size() - 1);
  r.psd = r.min_eigenvalue >= -tol;
  return r;
}

CMat herm_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

CMat skew_part(const CMat& a) { return cplx(0.0, -0.5) * (a - a.adjoint()); }

CMat matrix_unit(int n, int i, int j) {
  CMat e = CMat::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

CMat random_ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const double re = g(rng);
      const double im = g(rng);
      out(i, j) = cplx(re, im);
    }
  return out;
}

CMat random_hermitian(int n, Rng& rng) { return herm_part(random_ginibre(n, n, rng)); }

CMat random_unitary(int n, Rng& rng) {
  const CMat g = random_ginibre(n, n, rng);
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ() * CMat::Identity(n, n);
  const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column phases so the distribution is Haar.
  for (int k = 0; k < n; ++k) {
    const cplx d = r(k, k);
    if (std::abs(d) > 0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

CMat random_isometry(int d, int n, Rng& rng) {
  if (n > d) throw ContractViolation("random_isometry: n > d");
  return random_unitary(d, rng).leftCols(n);
}

CVec random_unit_vector(int n, Rng& rng) {
  CVec v = random_ginibre(n, 1, rng).col(0);
  return v / v.norm();
}

Rng seeded_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> salt) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (auto s : salt) {
    words.push_back(static_cast<std::uint32_t>(s));
    words.push_back(static_cast<std::uint32_t>(s >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

}  // namespace ncb

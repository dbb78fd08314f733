// SPDX-License-Identifier: Apache-2.0

#include "ncb/sdp_schur.hpp"

#include <algorithm>

#include <omp.h>

namespace ncb::sdp {

RMat assemble_schur_serial(const std::vector<ConstraintMatrix>& a,
                           const std::vector<RMat>& x,
                           const std::vector<RMat>& z_inv) {
  const int m = static_cast<int>(a.size());
  RMat out = RMat::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      double s = 0.0;
      for (const auto& e : a[i].entries) {
        for (const auto& f : a[j].entries) {
          if (e.block != f.block) continue;
          s += e.val * f.val * x[e.block](e.col, f.row) * z_inv[e.block](f.col, e.row);
        }
      }
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

RMat assemble_schur_omp(const std::vector<ConstraintMatrix>& a,
                        const std::vector<RMat>& x,
                        const std::vector<RMat>& z_inv,
                        int threads) {
  const int m = static_cast<int>(a.size());
  const int nblocks = static_cast<int>(x.size());
  RMat out = RMat::Zero(m, m);
  if (threads <= 0) threads = omp_get_max_threads();

#pragma omp parallel num_threads(threads)
  {
    std::vector<RMat> g(nblocks);
    std::vector<char> touched(nblocks, 0);
    RMat xa;

#pragma omp for schedule(dynamic, 4)
    for (int j = 0; j < m; ++j) {
      std::fill(touched.begin(), touched.end(), 0);
      const auto& ej = a[j].entries;
      // G_b = X_b A_j Z_b^{-1}, built block by block from the sparse columns
      // of A_j.
      std::size_t k = 0;
      while (k < ej.size()) {
        const int b = ej[k].block;
        const Eigen::Index n = x[b].rows();
        xa.setZero(n, n);
        std::vector<int> cols;
        for (; k < ej.size() && ej[k].block == b; ++k) {
          xa.col(ej[k].col) += ej[k].val * x[b].col(ej[k].row);
          if (cols.empty() || cols.back() != ej[k].col) cols.push_back(ej[k].col);
        }
        g[b].setZero(n, n);
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        for (int c : cols) g[b].noalias() += xa.col(c) * z_inv[b].row(c);
        touched[b] = 1;
      }
      for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (const auto& e : a[i].entries)
          if (touched[e.block]) s += e.val * g[e.block](e.col, e.row);
        out(i, j) = s;
      }
    }
  }
  // Tr(A_i X A_j Z^-1) is symmetric in (i, j) in exact arithmetic.
  RMat sym = 0.5 * (out + out.transpose());
  return sym;
}

}  // namespace ncb::sdp

// SPDX-License-Identifier: Apache-2.0
//
// Schur-complement assembly for the HKM search direction,
//
//     M_ij = Tr(A_i X A_j Z^{-1}),
//
// summed over the blocks of a block-diagonal real symmetric SDP. This is the
// hot loop of the interior-point solver. Two implementations are kept:
// a serial reference that evaluates the quadruple sum entry by entry, and an
// OpenMP kernel that forms X A_j Z^{-1} once per constraint and reads off a
// whole column of M. Each column is owned by one thread, so the parallel
// result does not depend on the thread count.

#ifndef NCB_SDP_SCHUR_HPP
#define NCB_SDP_SCHUR_HPP

#include <vector>

#include "ncb/matcore.hpp"

namespace ncb::sdp {

/// Entry of a symmetric constraint matrix; both (row, col) and (col, row)
/// are stored for off-diagonal entries.
struct SymEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  double val = 0.0;
};

struct ConstraintMatrix {
  std::vector<SymEntry> entries;  // sorted by (block, row, col), no duplicates

  double dot(const std::vector<RMat>& x) const {
    double s = 0.0;
    for (const auto& e : entries) s += e.val * x[e.block](e.row, e.col);
    return s;
  }
};

RMat assemble_schur_serial(const std::vector<ConstraintMatrix>& a,
                           const std::vector<RMat>& x,
                           const std::vector<RMat>& z_inv);

RMat assemble_schur_omp(const std::vector<ConstraintMatrix>& a,
                        const std::vector<RMat>& x,
                        const std::vector<RMat>& z_inv,
                        int threads = 0);

}  // namespace ncb::sdp

#endif  // NCB_SDP_SCHUR_HPP

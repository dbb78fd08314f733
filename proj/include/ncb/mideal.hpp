// SPDX-License-Identifier: Apache-2.0
//
// Complete M-projections on a concrete operator space, quotients by the
// corresponding complete M-summands, and the two quotient theorems: the image
// of a complete strict geometric unitary stays unital, and the quotient of an
// operator system is an operator system.
//
// Only summands given by an explicit idempotent P on the coefficient space are
// handled. In finite dimension every complete M-ideal is of this form.

#ifndef NCB_MIDEAL_HPP
#define NCB_MIDEAL_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "ncb/banach.hpp"
#include "ncb/gamma.hpp"
#include "ncb/ossys.hpp"

namespace ncb {

struct MProjection {
  CMat p;                   // m×m idempotent on coefficients, range W
  int verified_levels = 0;
  int samples_per_level = 0;
  double max_residual = 0.0;
};

struct MProjectionReport {
  bool verified = false;     // sample-based: a failure is conclusive, a pass statistical
  MProjection projection;
  std::optional<LevelElement> worst;
  double worst_residual = 0.0;
};

/// Projection onto the trailing `w` coordinates of an (m−w)+w split, i.e. onto
/// the second summand of direct_sum_inf.
CMat trailing_projection(int m, int w);

/// Checks ‖x‖ = max(‖P_k x‖, ‖(I−P)_k x‖) within tol on random unit x at every
/// level k ≤ k_max. Throws ContractViolation when P² ≠ P (1e-10).
MProjectionReport verify_complete_m_projection(const OperatorSpaceSpec& v, const CMat& p, int k_max = 3,
                                               int samples = 200, std::uint64_t seed = 0, double tol = 1e-8);

struct QuotientSpace {
  OperatorSpaceSpec z;  // (I−P)(V), compressed to its support
  CMat q;               // dim Z × m: V coefficients ↦ Z coefficients of (I−P)x
  CMat lift;            // m × dim Z: Z coefficients ↦ V coefficients (inclusion Z ⊆ V)
};

/// Z = (I−P)(V) with basis pruned from the columns of I−P. The distinguished
/// element is Q(u) when V has one. Throws ContractViolation("quotient is zero").
QuotientSpace quotient_by_msummand(const OperatorSpaceSpec& v, const MProjection& mp);

LevelElement apply_quotient(const QuotientSpace& qs, const LevelElement& x);

struct QuotientUnitalityOptions {
  NcbOptions ncb;
  int samples = 100;       // Ψ isometry samples, split over levels 1 and 2
  std::uint64_t seed = 0;
};

struct QuotientUnitalityReport {
  double q_norm = 0.0;            // ‖Q(v)‖
  double u_norm = 0.0;            // v = (u, w)
  double w_norm = 0.0;
  NcbEstimate ncb_v;
  NcbEstimate ncb_quotient;
  std::optional<GuSumReport> degeneracy;  // run when a part is short
  CVec f;                         // functional on Z with f(u) = 1, ‖f‖ ≤ 1
  double psi_max_error = 0.0;     // max |‖Ψ_k x‖ − ‖x‖|
  double psi_unit_error = 0.0;    // ‖Ψ(u) − v‖ in coefficients
  double quotient_excess = 0.0;   // max ‖Q_k x‖ − ‖x‖ over samples of V
  int psi_samples = 0;
  bool theorem_alarm = false;     // exact n_cb > 0 but a part is short
  bool passed = false;
};

QuotientUnitalityReport check_quotient_unitality(const OperatorSpaceSpec& v, const MProjection& mp,
                                                 const QuotientUnitalityOptions& opts = {});

struct QuotientOssysReport {
  OperatorSystemReport source;
  OperatorSystemReport quotient;
  int cone_samples = 0;
  double min_image_margin = 0.0;
  bool images_exact = false;
  bool containment_ok = false;
  int image_span_dim = 0;
  bool span_ok = false;
  bool passed = false;
};

QuotientOssysReport check_quotient_ossys(const OperatorSpaceSpec& v, const MProjection& mp, int samples = 50,
                                         std::uint64_t seed = 0, const NcbOptions& ncb = {},
                                         const ConeOptions& cone = {});

}  // namespace ncb

#endif  // NCB_MIDEAL_HPP

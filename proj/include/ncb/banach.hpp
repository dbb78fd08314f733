// SPDX-License-Identifier: Apache-2.0
//
// Level-1 theory: the face S(X;u) of the dual ball, γ^u, n(X;u), the ⊕¹ and
// ⊕^∞ statements, and the comparison with the minimal quantization.
//
// Everything is driven by the face support function h(z) = sup Re f(z) over
// f ∈ S(X;u); then γ^u(z) = max_θ h(e^{-iθ} z). Each spec kind exposes its
// face directly:
//   polytope / sup_over_points: conv{f_i / f_i(u) : |f_i(u)| = 1};
//   matrix_realized:            {Tr(T U_1* · W_1) : T a density matrix},
//                               with U_1, W_1 the singular-value-1 subspaces of u;
//   ⊕¹:  product of the faces at the normalized parts (the full dual ball for a
//        zero part);
//   ⊕^∞: convex hull of the faces of the parts with norm 1.

#ifndef NCB_BANACH_HPP
#define NCB_BANACH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncb/opspace.hpp"

namespace ncb {

struct DualWitness {
  CVec f;                          // f(z) = sum_t f_t z_t
  cplx value_at_u = 0.0;
  std::optional<int> vertex;       // polytope / point index, when a single vertex attains
  std::optional<CMat> trace_class; // F with f(z) = Tr(F realize(z)), matrix_realized only
};

struct ClassicGamma {
  double value = 0.0;
  double theta = 0.0;  // f(z) = value · e^{iθ} for the witness
  DualWitness witness;
};

/// Throws ContractViolation when |‖u‖ − 1| > 1e-9 (empty or non-norming face).
ClassicGamma gamma_classic(const NormedSpaceSpec& x, const CVec& u, const CVec& z);
/// Uses the distinguished element of the spec.
ClassicGamma gamma_classic(const NormedSpaceSpec& x, const CVec& z);

/// sup Re f(z) over the face at u, or over the whole dual ball when u is empty.
double face_support(const NormedSpaceSpec& x, const std::optional<CVec>& u, const CVec& z,
                    DualWitness* attaining = nullptr);

/// φ with φ(z) = ‖z‖ and ‖φ‖ ≤ 1.
DualWitness norming_functional(const NormedSpaceSpec& x, const CVec& z);

struct NClassicOptions {
  int restarts = 50;
  std::uint64_t seed = 0;
  int descent_steps = 60;
  double initial_step = 0.1;
  double min_step = 1e-8;
};

struct NClassicEstimate {
  double value = 0.0;
  CVec witness_x;  // unit vector attaining the smallest ratio found
  ClassicGamma at_witness;
  int evaluations = 0;
};

/// Heuristic inf of γ^u over the unit sphere: random starts, subgradient
/// descent on γ^u(x)/‖x‖, then a compass search.
NClassicEstimate n_classic(const NormedSpaceSpec& x, const NClassicOptions& opts = {});

// ---------------------------------------------------------------------------

/// X ⊕¹ Y with distinguished element (u, 0).
NormedSpaceSpec direct_sum_1(const NormedSpaceSpec& x, const NormedSpaceSpec& y);

struct NSumReport {
  double n_x = 0.0;
  double n_sum = 0.0;
  double identity_max_error = 0.0;  // max |γ^{(u,0)}(x,y) − γ^u(x) − ‖y‖|
  int pairs = 0;
  bool passed = false;
};

NSumReport check_n_sum(const NormedSpaceSpec& x, const NormedSpaceSpec& y, int pairs = 50,
                       const NClassicOptions& opts = {}, double n_tol = 2e-3, double identity_tol = 1e-6);

struct GuSumReport {
  double norm_u = 0.0;
  double norm_v = 0.0;
  bool degeneracy_expected = false;
  double min_gamma = 0.0;         // smallest γ over sampled unit (0,y) or (x,0)
  std::optional<CVec> witness;    // the attaining element of X ⊕^∞ Y
  int samples = 0;
  bool passed = false;
};

/// On X ⊕^∞ Y with distinguished (u, v): when one part has norm below 1,
/// exhibits a unit element supported on that part with γ ≤ 1e-6.
GuSumReport check_gu_sum(const NormedSpaceSpec& x, const NormedSpaceSpec& y, const CVec& u, const CVec& v,
                         int samples = 20, std::uint64_t seed = 0);

struct MinSample {
  double norm = 0.0;
  int omega = 0;
  CVec c;
  CVec d;
  double compressed_norm = 0.0;  // ‖sum c̄_i x_ij d_j‖_X
  double sup_sampled = 0.0;      // max over sampled f ∈ S(X;u) of ‖f_k(x)‖ / ‖x‖
};

struct MinComparisonReport {
  int k = 0;
  std::vector<MinSample> samples;
  double max_attainment_error = 0.0;
  double n_estimate = 0.0;
  double min_margin = 0.0;  // min over samples of sup_sampled − n_estimate
  bool passed = false;
};

/// x must be a sup_over_points spec with a distinguished element.
MinComparisonReport min_comparison(const NormedSpaceSpec& x, int k, int samples, std::uint64_t seed = 0,
                                   const NClassicOptions& opts = {});

}  // namespace ncb

#endif  // NCB_BANACH_HPP

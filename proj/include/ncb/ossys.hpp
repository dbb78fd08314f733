// SPDX-License-Identifier: Apache-2.0
//
// Matrix order: the cones K_u^n induced by S_k(V;u), the operator-system
// test, and the non-unital variant with user-declared cones M_m(V)_+ and the
// witness sets S_n^+ (completely contractive maps positive on the declared
// cones).

#ifndef NCB_OSSYS_HPP
#define NCB_OSSYS_HPP

#include <optional>
#include <string>
#include <vector>

#include "ncb/cbmap.hpp"
#include "ncb/gamma.hpp"
#include "ncb/opspace.hpp"

namespace ncb {

/// min(λ_min(H), −‖K‖) for A = H + iK; nonnegative iff A ⪰ 0.
double psd_margin(const CMat& a);

struct ConeVerdict {
  bool member = false;
  double margin = 0.0;
  bool exact = false;      // false: one-sided adversarial result
  int level_n = 0;         // witness size for sampled violations
  std::optional<ChoiMatrix> witness;
  int sdp_solves = 0;
};

/// x ∈ K_u^k iff (I_k ⊗ u*) x̂ ⪰ 0 (within −1e-8). Requires u to realize as a
/// unitary; throws ContractViolation pointing to the sampled test otherwise.
ConeVerdict cone_membership_exact(const OperatorSpaceSpec& v, const LevelElement& x);

struct ConeOptions {
  int n_max = 2;
  int restarts = 3;
  int max_rounds = 20;
  double stall_tol = 1e-9;
  std::uint64_t seed = 0;
  sdp::Settings sdp;
};

/// Adversarial search for φ in the family with φ_k(x) not PSD: seesaw on
/// min Re<ξ, φ_k(x) ξ> (and on the imaginary part) for n = 1..n_max. A margin
/// below −1e-6 certifies non-membership; otherwise the result is one-sided.
ConeVerdict adversarial_membership(const WitnessFamily& fam, const CMat& a, const ConeOptions& opts);
ConeVerdict cone_membership_sampled(const OperatorSpaceSpec& v, const LevelElement& x,
                                    const ConeOptions& opts = {});

struct OperatorSystemReport {
  NcbEstimate ncb;
  bool span_ok = false;
  int self_adjoint_dim = 0;        // dim_R of the self-adjoint part of L* V R
  std::vector<CVec> cone_basis;    // real basis of span_R K_u^1, as coefficients
  bool approximate = false;        // n_cb only estimated
  bool passed = false;
};

/// n_cb(V;u) = 1 and K_u^1 spans V. The cone is K_u^1 = {x : U_1* x̂ W_1 ⪰ 0};
/// since it contains I in the compressed picture, its real span is the whole
/// self-adjoint part, so the span check is dim_R = dim_C V.
OperatorSystemReport check_operator_system(const OperatorSpaceSpec& v, const NcbOptions& opts = {});

// ---------------------------------------------------------------------------

/// Declared cones M_m(V)_+ for m = 1..declared_levels.
///   psd: x ∈ M_m(V)_+ iff x̂ ⪰ 0. Only accepted for V = M_d, where positivity
///        at levels ≤ d is complete positivity.
///   generators: conic hulls of the listed elements, generators[m - 1] at level m.
struct ConeSpec {
  enum class Kind { psd, generators };
  std::string label;
  Kind kind = Kind::generators;
  int declared_levels = 0;
  std::vector<std::vector<LevelElement>> generators;
};

ConeSpec psd_cones(const OperatorSpaceSpec& v, int levels);
void validate(const OperatorSpaceSpec& v, const ConeSpec& cones);

/// Whether x̂ lies in the declared level-k cone: exact PSD test for psd cones,
/// non-negative least squares against the generators otherwise.
struct HullTest {
  bool inside = false;
  double residual = 0.0;  // Frobenius distance to the cone (0 for psd members)
};
HullTest declared_cone_contains(const OperatorSpaceSpec& v, const ConeSpec& cones, const LevelElement& x);

/// S_n^+: completely contractive maps M_d → M_n with φ_m(g) ⪰ 0 for every
/// declared generator (CP contractions for psd cones).
WitnessFamily splus_family(const OperatorSpaceSpec& v, const ConeSpec& cones);

/// Feasibility of G_t ↦ targets[t] within S_n^+.
SnWitness splus_membership(const OperatorSpaceSpec& v, const ConeSpec& cones, const std::vector<CMat>& targets,
                           const sdp::Settings& settings = {});

NcbEstimate ncb_plus_estimate(const OperatorSpaceSpec& v, const ConeSpec& cones, const NcbOptions& opts = {});

/// Adversarial test of x ∈ K_n (one-sided unless a violation is found).
ConeVerdict k_n_outer(const OperatorSpaceSpec& v, const ConeSpec& cones, const LevelElement& x,
                      const ConeOptions& opts = {});

struct NonunitalReport {
  NcbEstimate ncb_plus;
  bool generators_in_k = false;
  int generators_tested = 0;
  int candidates_tested = 0;
  std::optional<LevelElement> counterexample;  // in K_n, outside the declared cone
  double counterexample_distance = 0.0;
  double counterexample_margin = 0.0;
  bool one_sided = true;
  bool passed = false;
};

struct NonunitalOptions {
  NcbOptions ncb;
  ConeOptions cone;
  int candidates = 6;
  double ncb_threshold = 0.999;
};

/// n_cb^+(V) = 1 and M_n(V)_+ = K_n at the declared levels. Candidates for
/// K_n \ M_n(V)_+ are α* g α with g a level-1 generator and α a random row of
/// length m ≤ declared_levels; these are in K_m by construction.
NonunitalReport check_nonunital_ossys(const OperatorSpaceSpec& v, const ConeSpec& cones,
                                      const NonunitalOptions& opts = {});

}  // namespace ncb

#endif  // NCB_OSSYS_HPP

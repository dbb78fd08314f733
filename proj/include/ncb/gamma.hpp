// SPDX-License-Identifier: Apache-2.0
//
// Lower bounds for γ_k^u(x) = sup{‖φ_k(x)‖ : φ ∈ S_n(V;u), n ≥ 1} by seesaw,
// heuristic upper estimates of n_cb(V;u) by sphere search, and the quotient
// V_u = V / N_u.

#ifndef NCB_GAMMA_HPP
#define NCB_GAMMA_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ncb/cbmap.hpp"
#include "ncb/opspace.hpp"

namespace ncb {

enum class EstimateKind { exact, lower_bound, heuristic };
std::string to_string(EstimateKind k);

struct GammaOptions {
  int restarts = 20;
  std::uint64_t seed = 0;
  int max_rounds = 40;
  /// Seesaw stops once the best value improved by less than stall_tol over
  /// the last stall_rounds rounds.
  double stall_tol = 1e-9;
  int stall_rounds = 5;
  /// γ ≤ ‖x‖ always; a value within closure_tol of ‖x‖ ends the search.
  double closure_tol = 1e-7;
  sdp::Settings sdp;
};

struct GammaEstimate {
  double value = 0.0;
  EstimateKind kind = EstimateKind::lower_bound;
  int k = 1;
  int level_n = 0;  // n at which the value was attained
  double norm_bound = 0.0;  // level_norm(x)
  ChoiMatrix witness;
  CVec xi;
  CVec eta;
  std::vector<double> history;  // best value for n = 1, 2, ... (non-decreasing)
  int sdp_solves = 0;
  int failed_restarts = 0;
};

/// A family of witness sets indexed by n. `build` gives the SDP fragment for
/// maps ψ: M_r → M_n; the admissible maps on M_d are φ(x) = ψ(L* x R), or ψ
/// itself when `left` is empty (r = d). If `unit` is set, extracted ψ are
/// corrected so that ψ(unit) = I_n exactly.
struct WitnessFamily {
  int d = 0;
  std::function<MapProgram(int n)> build;
  std::optional<CMat> unit;
  CMat left;   // d × r
  CMat right;  // d × r
};

/// (I_k ⊗ L*) a (I_k ⊗ R), or a itself for an uncompressed family.
CMat compress_input(const WitnessFamily& fam, const CMat& a);
/// The map on M_d induced by a program solution ψ.
ChoiMatrix lift_witness(const WitnessFamily& fam, const ChoiMatrix& psi);

/// S_n(V;u): completely contractive maps with φ(u) = I_n. With U_1, W_1
/// spanning the singular subspaces of u for singular value 1, these are
/// exactly φ = ψ(U_1* · W_1) with ψ unital CP on M_r, which is the
/// parametrization used.
WitnessFamily sn_family(const OperatorSpaceSpec& v);

/// Seesaw lower bound for sup ‖φ_k(a)‖ over the level-n witness set.
GammaEstimate sup_norm_fixed_n(const WitnessFamily& fam, const CMat& a, int n, const GammaOptions& opts);
/// Sweep n = 1..n_max, stopping early once the value closes to ‖a‖.
GammaEstimate sup_norm(const WitnessFamily& fam, const CMat& a, int n_max, const GammaOptions& opts);

GammaEstimate gamma_fixed_n(const OperatorSpaceSpec& v, const LevelElement& x, int n,
                            const GammaOptions& opts = {});
/// n_max ≤ 0 selects the default d·k.
GammaEstimate gamma(const OperatorSpaceSpec& v, const LevelElement& x, int n_max = 0,
                    const GammaOptions& opts = {});

// ---------------------------------------------------------------------------

struct NcbOptions {
  int k_max = 2;
  int n_max = 0;  // 0: d·k at each level
  int sphere_restarts = 4;
  int descent_steps = 6;
  GammaOptions gamma;
};

struct NcbEstimate {
  double value = 0.0;
  EstimateKind kind = EstimateKind::heuristic;
  bool unitary_shortcut = false;
  std::optional<LevelElement> witness_x;
  std::optional<GammaEstimate> gamma_at_witness;
  int gamma_evaluations = 0;
};

/// Exact value 1 when u realizes as a unitary; otherwise the smallest γ̂
/// found by random sphere samples followed by subgradient descent.
NcbEstimate ncb_estimate(const OperatorSpaceSpec& v, const NcbOptions& opts = {});

/// The same search for an arbitrary witness family (used for n_cb^+).
NcbEstimate sphere_search(const OperatorSpaceSpec& v, const WitnessFamily& fam, const NcbOptions& opts);

// ---------------------------------------------------------------------------

struct SeminormEntry {
  int k = 1;
  LevelElement element;  // in V coordinates
  double value = 0.0;    // γ̂_k
};

struct QuotientData {
  std::vector<CVec> kernel;           // orthonormal basis of N_u in coefficient space
  std::vector<CVec> quotient_basis;   // orthonormal complement, representatives in V
  CMat q_map;                         // (m - r) × m, kills N_u, identity on the complement
  std::vector<double> kernel_gamma;   // γ̂_1 of each kernel vector
  std::vector<SeminormEntry> table;
  std::vector<std::string> warnings;  // guard-band hits
  bool ambiguous = false;
};

/// N_u is the common null space of S(V;u). It is located exactly as
/// {v : U_1* v W_1 = 0}, where U_1, W_1 span the top singular subspaces of u,
/// and every kernel direction is then measured with the seesaw.
QuotientData quotient_Vu(const OperatorSpaceSpec& v, int k_max = 2, double kernel_tol = 1e-6,
                         const GammaOptions& opts = {});

struct InducedMap {
  std::vector<CMat> images;  // Ψ_u on the quotient basis
  double residual = 0.0;     // max_t ‖Ψ(G_t) - Ψ_u(Q_u G_t)‖
};

/// Ψ_u with Ψ = Ψ_u ∘ Q_u; throws when Ψ does not vanish on N_u.
InducedMap factor_through_quotient(const OperatorSpaceSpec& v, const QuotientData& q, const ChoiMatrix& psi,
                                   double tol = 1e-6);

}  // namespace ncb

#endif  // NCB_GAMMA_HPP

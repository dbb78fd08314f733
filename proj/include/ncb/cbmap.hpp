// SPDX-License-Identifier: Apache-2.0
//
// Linear maps M_d → M_n through their Choi matrices C = sum_ij E_ij ⊗ φ(E_ij),
// complete positivity, cb norms, and the witness sets S_n(V;u).
//
// Complete contractivity is always encoded the same way: ‖φ‖_cb ≤ t iff there
// are Y_1, Y_2 with
//
//     [[Y_1, C], [C*, Y_2]] ⪰ 0,   Tr_1 Y_1 ⪯ t·I_n,   Tr_1 Y_2 ⪯ t·I_n,
//
// where Tr_1 traces out the domain factor, so Tr_1 Y = ψ(I) for the map ψ
// with Choi matrix Y.

#ifndef NCB_CBMAP_HPP
#define NCB_CBMAP_HPP

#include <functional>
#include <optional>
#include <vector>

#include "ncb/matcore.hpp"
#include "ncb/opspace.hpp"
#include "ncb/sdp.hpp"

namespace ncb {

struct ChoiMatrix {
  int d = 0;
  int n = 0;
  CMat c;  // dn × dn; block (i, j) is φ(E_ij)
  bool cp_checked = false;
  bool cb_checked = false;
  std::optional<CMat> slack1;  // Y_1
  std::optional<CMat> slack2;  // Y_2

  CMat image_of_unit(int i, int j) const { return c.block(i * n, j * n, n, n); }
};

ChoiMatrix choi_of(int d, int n, const std::function<CMat(const CMat&)>& phi);
ChoiMatrix identity_map(int d);
ChoiMatrix transpose_map(int d);
/// a ↦ Tr(a), as a map into M_1.
ChoiMatrix trace_map(int d);

/// φ_k(a) for a of size kd × kd, entrywise on the d × d blocks.
CMat apply(const ChoiMatrix& phi, const CMat& a);
/// φ_k on an element of M_k(V).
CMat apply(const ChoiMatrix& phi, const OperatorSpaceSpec& v, const LevelElement& x);

bool is_cp(const ChoiMatrix& phi, double tol = 1e-8);

struct CbNormResult {
  double value = 0.0;
  bool verified = false;  // false when the solver stopped on max-iterations
  ChoiMatrix witness;     // input map with the attaining corners attached
  sdp::Status status = sdp::Status::max_iterations;
};

/// min t subject to the corner conditions above.
CbNormResult cb_norm(const ChoiMatrix& phi, const sdp::Settings& settings = {});

// ---------------------------------------------------------------------------

/// SDP fragment describing the completely contractive maps M_d → M_n (or, in
/// CP form, the CP maps with φ(I) ⪯ I, or with `unital` the UCP maps), onto
/// which callers add linear constraints and objectives in the Choi entries.
class MapProgram {
 public:
  MapProgram(int d, int n, bool cp_form, bool unital = false);

  sdp::Problem& problem() { return problem_; }
  const sdp::Problem& problem() const { return problem_; }
  int d() const { return d_; }
  int n() const { return n_; }
  bool cp_form() const { return cp_form_; }
  bool unital() const { return unital_; }

  /// Appends terms for coef · C[r][c].
  void add_choi_term(std::vector<sdp::Term>& terms, int r, int c, cplx coef) const;
  /// Appends terms for coef · φ(a)[p][q].
  void add_image_terms(std::vector<sdp::Term>& terms, const CMat& a, int p, int q, cplx coef) const;
  /// Appends terms for coef · φ_k(a)[r][c] with a of size kd × kd.
  void add_amplified_terms(std::vector<sdp::Term>& terms, const CMat& a, int r, int c, cplx coef) const;
  /// Functional Re <xi, φ_k(a) eta> for a of size kd × kd.
  sdp::Functional pairing(const CMat& a, const CVec& xi, const CVec& eta) const;

  /// φ(a) = target.
  void require_image(const CMat& a, const CMat& target);

  ChoiMatrix extract(const sdp::Solution& sol) const;

 private:
  int d_;
  int n_;
  bool cp_form_;
  bool unital_;
  int main_block_ = 0;
  sdp::Problem problem_;
};

struct SnWitness {
  bool feasible = false;
  ChoiMatrix choi;  // extension to all of M_d
  double restriction_residual = 0.0;
  double unit_residual = 0.0;
  sdp::Status status = sdp::Status::max_iterations;
  std::optional<sdp::InfeasibilityCertificate> certificate;
};

/// Restriction and unit residuals of an extension against targets on V.
void measure_residuals(SnWitness& w, const OperatorSpaceSpec& v, const std::vector<CMat>& targets);

/// Decides whether the map G_t ↦ targets[t] lies in S_n(V;u).
SnWitness sn_membership(const OperatorSpaceSpec& v, const std::vector<CMat>& targets,
                        const sdp::Settings& settings = {});

/// x ↦ W* x W for an isometry W (d × n). Requires u realized as I_d.
SnWitness compression_element(const OperatorSpaceSpec& v, const CMat& w);

/// Adds a rank-one correction so that φ(u) = I_n holds to rounding.
void enforce_unit(ChoiMatrix& phi, const CMat& u);

}  // namespace ncb

#endif  // NCB_CBMAP_HPP

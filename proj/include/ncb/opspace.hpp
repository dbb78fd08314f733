// SPDX-License-Identifier: Apache-2.0
//
// Concrete operator spaces V ⊆ M_d, their matrix levels M_k(V), and the
// finite-dimensional normed spaces used at level 1.

#ifndef NCB_OPSPACE_HPP
#define NCB_OPSPACE_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ncb/matcore.hpp"

namespace ncb {

/// V = span{G_1, ..., G_m} ⊆ M_d with an optional distinguished element u,
/// stored as a coefficient vector.
struct OperatorSpaceSpec {
  std::string label;
  int d = 0;
  std::vector<CMat> basis;
  std::optional<CVec> u;

  int dim() const { return static_cast<int>(basis.size()); }
  CMat realize(const CVec& coeffs) const;
  CMat u_matrix() const;
};

/// Builds and validates a spec. Rejects bases whose Hilbert-Schmidt Gram
/// matrix has smallest eigenvalue below 1e-10 and distinguished elements
/// whose norm differs from 1 by more than 1e-9.
OperatorSpaceSpec make_space(std::string label, std::vector<CMat> basis,
                             std::optional<CVec> u = std::nullopt);
void validate(const OperatorSpaceSpec& v);

/// Element of M_k(V): coeffs[i * k + j] holds the m coefficients of entry (i, j).
struct LevelElement {
  int k = 1;
  std::vector<CVec> coeffs;

  static LevelElement zero(int k, int m);
  static LevelElement scalar(const CVec& c);  // level 1
  CVec& at(int i, int j) { return coeffs[static_cast<std::size_t>(i * k + j)]; }
  const CVec& at(int i, int j) const { return coeffs[static_cast<std::size_t>(i * k + j)]; }
};

/// sum_{i,j,t} coeffs[i][j][t] E_ij ⊗ G_t, a (kd)×(kd) matrix.
CMat realize(const OperatorSpaceSpec& v, const LevelElement& x);
double level_norm(const OperatorSpaceSpec& v, const LevelElement& x);

/// Coefficients of a matrix known to lie in V (least squares against the
/// basis); `residual` receives the Frobenius distance to V when non-null.
CVec coefficients_of(const OperatorSpaceSpec& v, const CMat& a, double* residual = nullptr);

/// Inverse of realize for matrices in M_k(V).
LevelElement level_element_of(const OperatorSpaceSpec& v, int k, const CMat& a,
                              double* residual = nullptr);

LevelElement direct_sum(const LevelElement& x, const LevelElement& y);
/// alpha x beta for scalar matrices alpha (p×k) and beta (k×q).
LevelElement scalar_sandwich(const CMat& alpha, const LevelElement& x, const CMat& beta);
/// Coefficient-space linear map applied entrywise: entry c ↦ a c.
LevelElement map_coeffs(const CMat& a, const LevelElement& x);
LevelElement scaled(const LevelElement& x, cplx s);
LevelElement add(const LevelElement& x, const LevelElement& y);

/// Gaussian coefficients, normalized to level norm 1.
LevelElement random_unit_element(const OperatorSpaceSpec& v, int k, Rng& rng);

// ---------------------------------------------------------------------------

enum class NormedKind { polytope, sup_over_points, matrix_realized, l1_sum, linf_sum };

/// A finite-dimensional normed space on coefficient vectors in C^m.
///   polytope, sup_over_points: ‖x‖ = max_f |f(x)| over the listed functionals
///     (for sup_over_points the functionals are point evaluations on Ω).
///   matrix_realized: ‖x‖ = spectral norm of the realization in `space`.
///   l1_sum / linf_sum: coefficients are (x, y) concatenated; ‖x‖_X + ‖y‖_Y
///     or max of the two.
struct NormedSpaceSpec {
  std::string label;
  NormedKind kind = NormedKind::polytope;
  int m = 0;
  std::vector<CVec> functionals;
  std::shared_ptr<const OperatorSpaceSpec> space;
  std::shared_ptr<const NormedSpaceSpec> left;
  std::shared_ptr<const NormedSpaceSpec> right;
  std::optional<CVec> u;
};

double norm(const NormedSpaceSpec& x, const CVec& c);

/// f(c) = sum_t f_t c_t (bilinear; no conjugation).
inline cplx apply_functional(const CVec& f, const CVec& c) { return f.cwiseProduct(c).sum(); }

NormedSpaceSpec make_polytope(std::string label, std::vector<CVec> functionals,
                              std::optional<CVec> u = std::nullopt);
/// X ⊆ C(Ω) for finite Ω; `points[w]` is the evaluation functional at ω_w.
NormedSpaceSpec make_sup_over_points(std::string label, std::vector<CVec> points,
                                     std::optional<CVec> u = std::nullopt);
NormedSpaceSpec make_matrix_realized(const OperatorSpaceSpec& v);
NormedSpaceSpec make_sum(NormedKind kind, const NormedSpaceSpec& x, const NormedSpaceSpec& y,
                         std::optional<CVec> u = std::nullopt);

/// ℓ∞^m: sup over the m coordinate evaluations.
NormedSpaceSpec linf(int m, std::optional<CVec> u = std::nullopt);

/// Diagonal realization of a sup_over_points space inside M_N, N = |Ω|.
OperatorSpaceSpec min_quantization(const NormedSpaceSpec& x);

/// Block-diagonal realization of V ⊕^∞ W in M_{d_V + d_W}. The distinguished
/// element is (u_V, u_W) when both are present.
OperatorSpaceSpec direct_sum_inf(const OperatorSpaceSpec& v, const OperatorSpaceSpec& w);

struct ConjugatedSpace {
  OperatorSpaceSpec space;  // u* V, same coefficients, u ↦ I_d
  CMat unitary;             // the realized u
};

/// Requires the realized u to be unitary within 1e-9; throws
/// ContractViolation("no exact unital realization available") otherwise.
ConjugatedSpace conjugate_embedding(const OperatorSpaceSpec& v);

bool has_unitary_realization(const OperatorSpaceSpec& v, double tol = 1e-9);

/// Compresses V to the smallest ambient C^r carrying every range and
/// co-range of the basis. The compression is a complete isometry.
OperatorSpaceSpec compress_to_support(const OperatorSpaceSpec& v, double tol = 1e-10);

}  // namespace ncb

#endif  // NCB_OPSPACE_HPP

// SPDX-License-Identifier: Apache-2.0
//
// Dense complex matrix kernel shared by every other module.

#ifndef NCB_MATCORE_HPP
#define NCB_MATCORE_HPP

#include <complex>
#include <initializer_list>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ncb {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

/// Raised when a caller breaks a documented precondition (wrong shape,
/// non-Hermitian input where Hermitian is required, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct HermEig {
  RVec values;   // descending
  CMat vectors;  // columns are the matching unit eigenvectors
};

struct PsdReport {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

/// Largest entrywise deviation from Hermitian symmetry.
double hermitian_defect(const CMat& a);
bool is_hermitian(const CMat& a, double rel_tol = 1e-12);

/// Eigendecomposition of a Hermitian matrix (tridiagonal reduction +
/// implicit QL). Throws ContractViolation on non-square/non-Hermitian input.
HermEig herm_eig(const CMat& a);

/// Eigenvalues only, descending.
RVec herm_eigenvalues(const CMat& a);

/// Largest singular value.
double spec_norm(const CMat& a);

/// Sum of singular values.
double trace_norm(const CMat& a);

struct SingularPair {
  double value = 0.0;
  CVec left;   // unit, a * right = value * left
  CVec right;  // unit
};

/// Top singular triple of `a`.
SingularPair top_singular_pair(const CMat& a);

CMat kron(const CMat& a, const CMat& b);

enum class TraceSide { first, second };

/// Partial trace of a (dims[0]*dims[1]) square matrix over one tensor
/// factor; `side` names the factor that is traced out.
CMat partial_trace(const CMat& a, int dim_first, int dim_second, TraceSide side);

/// PSD test on a Hermitian matrix: psd iff lambda_min >= -tol.
PsdReport psd_check(const CMat& a, double tol = 1e-8);

/// Hermitian and anti-Hermitian parts, a = herm_part(a) + i * skew_part(a).
CMat herm_part(const CMat& a);
CMat skew_part(const CMat& a);

/// Matrix unit E_ij of size n.
CMat matrix_unit(int n, int i, int j);

// Random generators used by tests, samplers and the seesaw restarts.
// Every sampler takes an explicit engine so results stay seed-determined.
using Rng = std::mt19937_64;

/// Engine seeded from a base seed and a list of salts (restart index, level, ...).
Rng seeded_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> salt);

CMat random_ginibre(int rows, int cols, Rng& rng);
CMat random_hermitian(int n, Rng& rng);
CMat random_unitary(int n, Rng& rng);
/// d x n matrix W with orthonormal columns (W* W = I_n), n <= d.
CMat random_isometry(int d, int n, Rng& rng);
CVec random_unit_vector(int n, Rng& rng);

}  // namespace ncb

#endif  // NCB_MATCORE_HPP

// SPDX-License-Identifier: Apache-2.0
//
// Small dense semidefinite programs over Hermitian (and real symmetric)
// blocks. Problems are stated in primal form
//
//     max / min   f_0(X)
//     s.t.        f_i(X) {=,<=,>=} b_i,     X_b >= 0 for every block b,
//
// where every f is a real-linear functional Re sum_k c_k X_{b_k}[r_k][c_k].
// Hermitian blocks are solved through the real symmetric embedding
// [[Re X, -Im X], [Im X, Re X]]; callers only ever see complex blocks.

#ifndef NCB_SDP_HPP
#define NCB_SDP_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ncb/matcore.hpp"

namespace ncb::sdp {

enum class Sense { maximize, minimize };
enum class BlockKind { hermitian, real_symmetric };
enum class Relation { equal, less_equal, greater_equal };
enum class Status { optimal, infeasible, max_iterations };

std::string to_string(Status s);

struct BlockSpec {
  std::string name;
  int dim = 0;
  BlockKind kind = BlockKind::hermitian;
};

/// One term Re(coef * X_block[row][col]).
struct Term {
  int block = 0;
  int row = 0;
  int col = 0;
  cplx coef{0.0, 0.0};
};

struct Functional {
  std::vector<Term> terms;

  void add(int block, int row, int col, cplx coef) {
    terms.push_back(Term{block, row, col, coef});
  }
  /// Value on explicit block matrices.
  double evaluate(const std::vector<CMat>& blocks) const;
};

struct ConstraintSpec {
  Functional lhs;
  Relation relation = Relation::equal;
  double rhs = 0.0;
};

class Problem {
 public:
  int add_block(std::string name, int dim, BlockKind kind = BlockKind::hermitian);
  void add_constraint(Functional lhs, Relation rel, double rhs);
  void add_equality(Functional lhs, double rhs) {
    add_constraint(std::move(lhs), Relation::equal, rhs);
  }
  void set_objective(Functional f, Sense sense);

  /// Adds two real equations forcing the complex linear combination
  /// sum_k coef_k X_{b_k}[r_k][c_k] to equal `target`.
  void add_complex_equality(const std::vector<Term>& terms, cplx target);

  const std::vector<BlockSpec>& blocks() const { return blocks_; }
  const std::vector<ConstraintSpec>& constraints() const { return constraints_; }
  const Functional& objective() const { return objective_; }
  Sense sense() const { return sense_; }

  /// Throws ContractViolation when a term references an unknown block or an
  /// out-of-range entry.
  void validate() const;

  /// Canonical text used for content hashing and debug dumps.
  std::string canonical_json() const;

 private:
  std::vector<BlockSpec> blocks_;
  std::vector<ConstraintSpec> constraints_;
  Functional objective_;
  Sense sense_ = Sense::maximize;
};

/// Farkas-type certificate of primal infeasibility: multipliers y over the
/// (internal, equality-form) constraints with b^T y = 1 and
/// sum_i y_i A_i <= 0. `max_violation` is lambda_max(sum_i y_i A_i).
struct InfeasibilityCertificate {
  std::vector<double> multipliers;
  double max_violation = 0.0;
};

struct Solution {
  Status status = Status::max_iterations;
  std::vector<CMat> blocks;  // Hermitian block values, one per user block
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;
  double primal_infeasibility = 0.0;  // max |f_i(X) - b_i| over user constraints
  double dual_infeasibility = 0.0;
  double min_block_eigenvalue = 0.0;
  int iterations = 0;
  std::vector<double> dual;  // one multiplier per internal equality row
  std::optional<InfeasibilityCertificate> certificate;
  bool from_cache = false;
};

class SolutionCache;

struct Settings {
  double gap_tol = 1e-8;
  double feas_tol = 1e-9;
  int max_iter = 120;
  /// Used by the parallel Schur assembly; 0 = OpenMP default.
  int threads = 0;
  /// Optional; not owned.
  SolutionCache* cache = nullptr;
};

Solution solve(const Problem& problem, const Settings& settings = {});

/// Solve with a zero objective. On success the returned blocks satisfy every
/// constraint within the feasibility slack; otherwise status is infeasible
/// with a certificate attached (or max_iterations).
Solution feasibility(const Problem& problem, const Settings& settings = {});

/// Residuals of explicit block values against the problem's constraints.
double constraint_residual(const Problem& problem, const std::vector<CMat>& blocks);

}  // namespace ncb::sdp

#endif  // NCB_SDP_HPP

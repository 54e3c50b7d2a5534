#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace sos {

// One nonzero of a symmetric coefficient matrix. (i, j) with i <= j; the value
// applies to both (i, j) and (j, i), so the inner product A . X picks up
// 2 * value * X_ij for off-diagonal entries.
struct SdpEntry {
  int block;
  int i;
  int j;
  double value;
};

// min sum_b C_b . X_b   s.t.  sum_b A_{k,b} . X_b = rhs_k,  X_b psd
struct SdpProblem {
  enum class Mode { kFeasibility, kMinimize };

  std::vector<int> block_dims;
  struct Constraint {
    std::vector<SdpEntry> entries;
    double rhs = 0.0;
  };
  std::vector<Constraint> constraints;
  std::vector<SdpEntry> objective;  // empty in feasibility mode
  Mode mode = Mode::kMinimize;

  void add_constraint(std::vector<SdpEntry> entries, double rhs);
};

struct SdpSettings {
  double tol = 1e-8;
  int max_iters = 200;
  // phase-I optimum above this value certifies infeasibility
  double infeasibility_certificate_threshold = 1e-6;
  // feasibility-mode acceptance: once phase-I certifies that a solution
  // exists, the returned point only needs equality residuals below this
  // (relative) bound. Thin feasible sets stall the ipm well before `tol`.
  double feasibility_residual_tol = 1e-6;
};

enum class SdpStatus { kOptimal, kInfeasible, kMaxIters };

struct SdpSolution {
  SdpStatus status = SdpStatus::kMaxIters;
  std::vector<Eigen::MatrixXd> primal;  // one psd matrix per block
  Eigen::VectorXd dual;                 // multiplier per constraint
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  // slack lambda found by phase-I; <= tol when the problem is feasible
  double phase1_optimum = 0.0;
  int iterations = 0;
};

SdpSolution solve(const SdpProblem& problem, const SdpSettings& settings = {});

// Minimizes the Frobenius norm of the primal matrix of `target_block` subject
// to the problem's constraints, via an epigraph scalar s and the psd block
// [[s I, v], [v^T, s]] with v the (scaled) half-vectorization of the target.
SdpSolution solve_min_frobenius(const SdpProblem& problem, int target_block,
                                const SdpSettings& settings = {});

// Sparse SDPA text format, for cross-checking against external solvers.
void write_sdpa(const SdpProblem& problem, std::ostream& out);
SdpProblem read_sdpa(std::istream& in);
void write_sdpa_file(const SdpProblem& problem, const std::string& path);
SdpProblem read_sdpa_file(const std::string& path);

}  // namespace sos

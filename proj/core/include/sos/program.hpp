#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "sos/poly.hpp"
#include "sos/sdp.hpp"
#include "sos/sos.hpp"

namespace sos {

// Polynomial system over indicator variables w_0..w_{n-1} and the mean
// variable mu_0..mu_{d-1} (plus auxiliary matrix-entry variables in the
// general variant): booleanness, subset size within tau slack of alpha*n,
// empirical-mean consistency, and bounded t-th moments in every direction.
struct StructuredSubsetProgram {
  enum class Variant { kGaussianWarmup, kGeneralExplicit };

  Eigen::MatrixXd samples;  // n x d
  double alpha = 1.0;
  int t = 4;
  double tau = 0.0;
  Variant variant = Variant::kGaussianWarmup;

  VariableSpacePtr space;          // w..., mu..., [aux...]
  std::vector<char> boolean_mask;  // true exactly on the w variables
  std::vector<Poly> equalities;            // p = 0
  std::vector<Poly> scalar_inequalities;   // p >= 0
  std::vector<PolyMatrix> matrix_inequalities;  // M psd

  // aux variable k represents the matrix entry for the (sorted) multi-index
  // pair aux_index[k]; symmetric duplicates share one variable
  std::vector<std::pair<std::vector<int>, std::vector<int>>> aux_index;

  int n() const { return static_cast<int>(samples.rows()); }
  int d() const { return static_cast<int>(samples.cols()); }
  int w_var(int i) const { return i; }
  int mu_var(int a) const { return n() + a; }
  int aux_var(int k) const { return n() + d() + k; }

  int max_constraint_degree() const;
};

// E_{X ~ N(0, Id)}[X^{t/2 tensor} (X^{t/2 tensor})^T] over the d^{t/2} tensor
// basis, computed in closed form via Wick pairings
Eigen::MatrixXd gaussian_moment_rhs(int d, int t);

// sorted index multisets of size len over [d], lexicographic, and the number
// of ordered tuples in each multiset's orbit. Matrix inequalities are built on
// this reduced basis (entry scaled by sqrt of the orbit sizes), which is
// psd-equivalent to the full tensor form but has no forced nullspace from
// duplicated ordered tuples.
std::vector<std::vector<int>> symmetric_index_basis(int d, int len);
double index_orbit_size(const std::vector<int>& sorted_tuple, int d);

StructuredSubsetProgram build_program(const Eigen::MatrixXd& samples,
                                      double alpha, int t, double tau,
                                      StructuredSubsetProgram::Variant variant);

// Which blocks/multipliers the truncated lowering includes. Level 0 is the
// cheapest profile that still covers every moment the constraints mention.
struct LoweringOptions {
  bool upper_indicator_blocks = false;  // localizers for 1 - w_i
  bool wwT_block = false;  // expose pE[w w^T] as its own block (for rounding)
};

struct SdpLowering {
  SdpProblem problem;
  int pe_degree = 0;
  // canonical monomial -> (block, i, j) holding its moment in the solution
  std::map<Monomial, std::array<int, 3>> where;
  int wwT_block = -1;  // block id of the pE[w w^T] matrix, when requested
  VariableSpacePtr space;
  std::vector<char> boolean_mask;
};

int default_pe_degree(const StructuredSubsetProgram& program);

SdpLowering build_sdp(const StructuredSubsetProgram& program, int pe_degree,
                      const LoweringOptions& options = {});

PseudoExpectation extract_pe(const SdpLowering& lowering,
                             const SdpSolution& solution);

// substitutes w = subset indicator, mu = subset empirical mean, and reports
// how far the genuine point is from satisfying every axiom
struct IndicatorReport {
  double max_equality_residual = 0.0;
  double size_lower_margin = 0.0;  // >= 0 when satisfied
  double size_upper_margin = 0.0;
  double matrix_slack_min_eig = 0.0;
  bool ok(double tol = 1e-9) const {
    return max_equality_residual <= tol && size_lower_margin >= -tol &&
           size_upper_margin >= -tol && matrix_slack_min_eig >= -tol;
  }
};

IndicatorReport verify_indicator_satisfiability(const Eigen::MatrixXd& samples,
                                                const std::vector<int>& subset,
                                                int t, double tau);

// diagnostic: equality residuals and minimum eigenvalues of every moment,
// localizing and matrix-localizing matrix the truncated lowering tracks;
// eigenvalues are relative to each block's largest entry so the tolerance
// scales with the block
struct SatisfactionReport {
  bool normalized = false;
  double normalization_residual = 0.0;
  double max_equality_residual = 0.0;
  double min_moment_eig = 0.0;
  double min_localizing_eig = 0.0;
  double min_matrix_eig = 0.0;
  bool ok(double tol) const {
    return normalized && max_equality_residual <= tol &&
           min_moment_eig >= -tol && min_localizing_eig >= -tol &&
           min_matrix_eig >= -tol;
  }
};

SatisfactionReport check_satisfies(const PseudoExpectation& pe,
                                   const StructuredSubsetProgram& program,
                                   double tol);

// JSON snapshot of constraint counts, degrees and the variable space
std::string program_summary_json(const StructuredSubsetProgram& program);

}  // namespace sos

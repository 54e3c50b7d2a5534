#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sos/datagen.hpp"
#include "sos/program.hpp"
#include "sos/sdp.hpp"

namespace sos {

// the tau slack leaves only a thin feasible slice, where the interior-point
// primal residual plateaus around 1e-5 even though feasibility is certified;
// accept that accuracy, since it sits far below the statistical error of any
// mean estimate at these sample sizes
inline SdpSettings robust_sdp_defaults() {
  SdpSettings s;
  s.feasibility_residual_tol = 1e-4;
  return s;
}

struct RobustSettings {
  int t = 4;
  double tau = 1e-3;
  double eps_max = 0.2;  // largest corruption fraction accepted
  SdpSettings sdp = robust_sdp_defaults();
};

struct RobustEstimate {
  Eigen::VectorXd mean;      // always finite; equals the pruned empirical
                             // mean when the SDP reports infeasibility
  std::vector<int> pruned;   // indices removed by the pruning step
  Eigen::VectorXd center;    // empirical mean of the kept points
  SdpStatus sdp_status = SdpStatus::kOptimal;
  SatisfactionReport satisfaction;  // positivity margins of the solved pE
  // pe_eval(||mu - center||^2) - ||pE[mu] - center||^2; pseudo-expectation
  // Cauchy-Schwarz makes this nonnegative up to solver tolerance
  double rounding_gap = 0.0;
  int sdp_iterations = 0;

  bool solved() const { return sdp_status == SdpStatus::kOptimal; }
};

// keeps the points within radius 10*sqrt(d)*s of the coordinate-wise median,
// where s is the scaled median of coordinate-wise absolute deviations; the
// radius is generous enough that inliers survive while distant outliers
// cannot
std::vector<int> naive_prune(const Eigen::MatrixXd& samples, double eps, int t);

// prune, center at the kept empirical mean, solve the structured-subset
// feasibility relaxation at alpha = 1 - eps, and read off pE[mu] + center
RobustEstimate estimate_mean(const Eigen::MatrixXd& samples, double eps,
                             const RobustSettings& settings = {});

// ground-truth diagnostics for the analysis conditions: prune success on the
// uncorrupted points, satisfiability of their indicator, closeness of their
// empirical mean to the true mean, and concentration of their empirical t-th
// moment tensor
struct ConditionsReport {
  bool prune_keeps_good = false;       // E1
  bool indicator_satisfiable = false;  // E2
  bool good_mean_close = false;        // E3
  bool moment_tensor_bounded = false;  // E4
  bool vacuous = false;                // no uncorrupted points at all

  double good_mean_error = 0.0;
  double good_mean_bound = 0.0;
  double moment_slack_min_eig = 0.0;  // of population + 0.1*I - empirical
  IndicatorReport indicator;

  bool all_pass() const {
    return prune_keeps_good && indicator_satisfiable && good_mean_close &&
           moment_tensor_bounded;
  }
};

ConditionsReport check_conditions_e(const DatasetWithTruth& data, int t);

}  // namespace sos

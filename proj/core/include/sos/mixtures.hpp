#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "sos/program.hpp"
#include "sos/robust.hpp"
#include "sos/sdp.hpp"
#include "sos/sos.hpp"

namespace sos {

struct ClusterAssignment {
  std::vector<int> labels;  // cluster id in [0, k) per sample
  int k = 0;
};

struct RoundingOutcome {
  ClusterAssignment assignment;
  std::vector<int> pivots;  // pivot row chosen in each round
  bool complete = true;     // false when rows ran out before m clusters
};

// connected components of the graph joining samples at distance <= radius
std::vector<std::vector<int>> single_linkage_precluster(
    const Eigen::MatrixXd& samples, double radius);

// picks a random unassigned row, claims every unassigned row within ball
// radius 2*sqrt(n/E) of it, m times; leftovers go to the nearest pivot.
// E controls the ball size: larger E = tighter balls. E must exceed 2m for
// the balls not to swallow neighboring clusters of a balanced partition.
RoundingOutcome round_second_moments(const Eigen::MatrixXd& M, int m, double E,
                                     std::mt19937_64& rng);

// the Frobenius-minimizing solve inherits the thin feasible slice of the
// structured-subset axioms; its primal residual plateaus around 2e-4 in
// normalized units at moderate separations and around 1e-2 when sample
// coordinates reach +-8 (fourth-power coefficients ~4e3 strain the Schur
// conditioning). Either is far below what the ball-rounding step
// (resolution ~0.1) can notice, so accept it; infeasibility detection is
// unaffected, it happens in phase one
inline SdpSettings mixture_sdp_defaults() {
  SdpSettings s;
  s.feasibility_residual_tol = 1e-2;
  return s;
}

struct MixtureSettings {
  int t = 4;
  double tau = 1e-3;
  double mean_step_eps = 0.05;  // robust mean step corruption allowance
  double rounding_moment_param = 0.0;  // E for rounding; 0 = 16*k
  double nonuniform_ball_constant = 4.0;  // c in the c*sqrt(d*xi) ball
  double precluster_radius = 0.0;         // 0 = no preclustering
  SdpSettings sdp = mixture_sdp_defaults();
};

struct MixtureDiagnostics {
  SdpStatus sdp_status = SdpStatus::kOptimal;
  double wwt_frobenius = 0.0;  // ||pE ww^T||_F of the solved relaxation
  std::vector<int> pivots;
  bool rounding_complete = true;
  bool degenerate = false;  // empty cluster or failed solve along the way
  std::vector<double> alpha_trace;  // nonuniform: alpha' at each extraction
};

struct MixtureEstimate {
  Eigen::MatrixXd means;  // k x d
  ClusterAssignment assignment;
  MixtureDiagnostics diagnostics;
  std::optional<PseudoExpectation> pe;  // from the last feasible solve
};

// relax over structured subsets at alpha = 1/k with minimum ||pE ww^T||_F,
// cluster by rounding k * pE[ww^T], then run the robust mean estimator on
// each cluster
MixtureEstimate learn_mixture_means(const Eigen::MatrixXd& samples, int k,
                                    std::uint64_t seed,
                                    const MixtureSettings& settings = {});

// Gram-factor pE[ww^T], pick a random column with squared norm >=
// alpha_prime / 100, return everything within c*sqrt(d*xi) of it; nullopt
// when no column clears the threshold
std::optional<std::vector<int>> round_second_moments_nonuniform(
    const Eigen::MatrixXd& pe_wwt, double alpha_prime, double xi, int d,
    std::mt19937_64& rng, double ball_constant = 4.0);

// sweeps alpha' from 1 down to eta in steps of xi, extracting one cluster
// per feasible solve and removing its points, until the data is exhausted
MixtureEstimate learn_nonuniform(const Eigen::MatrixXd& samples, double eta,
                                 double xi, std::uint64_t seed,
                                 const MixtureSettings& settings = {});

// brute-force identifiability oracle for tiny instances: enumerate every
// size-subset_size subset S, keep those whose empirical t-th directional
// moment about their own mean stays below 2*t^{t/2} on a unit-vector grid,
// and check ||mu_S - mu_star|| <= 4*sqrt(t)*(|T|/|S cap T|)^{1/t} where T is
// the flagged good set
struct IdentifiabilityReport {
  int subsets_total = 0;
  int qualifying = 0;
  int violations = 0;
  double worst_slack = 0.0;  // min over qualifying subsets of bound - error
};

IdentifiabilityReport check_identifiability(const Eigen::MatrixXd& samples,
                                            const std::vector<char>& good_mask,
                                            const Eigen::VectorXd& mu_star,
                                            int subset_size, int t,
                                            int grid_points);

}  // namespace sos

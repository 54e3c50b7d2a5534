#pragma once

#include <cstdint>

#include "sos/sdp.hpp"

namespace sos {

// Randomly generated strictly feasible SDP built from a known interior
// primal/dual pair, so the optimum is finite and attainable. Block dims stay
// <= max_dim and the constraint count <= max_constraints.
struct GeneratedSdp {
  SdpProblem problem;
  double interior_objective;  // objective value at the known interior point
};

GeneratedSdp make_random_feasible_sdp(std::uint64_t seed, int max_dim = 30,
                                      int max_constraints = 100);

// Small infeasible instances: either linearly inconsistent or psd-infeasible
// (entries pinned to a matrix with a negative eigenvalue).
SdpProblem make_infeasible_sdp(std::uint64_t seed);

struct SelftestReport {
  int feasible_total = 0;
  int feasible_solved = 0;  // gap <= gap_tol and residuals at tolerance
  int infeasible_total = 0;
  int infeasible_detected = 0;
  double worst_gap = 0.0;
};

SelftestReport run_sdp_selftest(int n_feasible, int n_infeasible,
                                std::uint64_t seed0, double gap_tol = 1e-7);

}  // namespace sos

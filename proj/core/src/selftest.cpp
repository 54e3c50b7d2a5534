#include "sos/selftest.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace sos {

GeneratedSdp make_random_feasible_sdp(std::uint64_t seed, int max_dim,
                                      int max_constraints) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nblocks_d(1, 3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  GeneratedSdp out;
  int nblocks = nblocks_d(rng);
  std::vector<Eigen::MatrixXd> X0, Z0;
  for (int b = 0; b < nblocks; ++b) {
    std::uniform_int_distribution<int> dim_d(2, std::max(2, max_dim / nblocks));
    int d = dim_d(rng);
    out.problem.block_dims.push_back(d);
    Eigen::MatrixXd L(d, d), L2(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        L(i, j) = u(rng) * 0.5;
        L2(i, j) = u(rng) * 0.5;
      }
    X0.push_back(L * L.transpose() +
                 0.5 * Eigen::MatrixXd::Identity(d, d));
    Z0.push_back(L2 * L2.transpose() +
                 0.5 * Eigen::MatrixXd::Identity(d, d));
  }

  int total = 0;
  for (int d : out.problem.block_dims) total += d;
  std::uniform_int_distribution<int> m_d(3, std::min(max_constraints, total * 2));
  int m = m_d(rng);
  std::uniform_int_distribution<int> blk_d(0, nblocks - 1);
  std::uniform_int_distribution<int> nnz_d(2, 6);

  std::vector<double> y0(m);
  for (int k = 0; k < m; ++k) {
    SdpProblem::Constraint c;
    int nnz = nnz_d(rng);
    std::set<std::tuple<int, int, int>> used;
    for (int e = 0; e < nnz; ++e) {
      int b = blk_d(rng);
      int d = out.problem.block_dims[b];
      std::uniform_int_distribution<int> idx(0, d - 1);
      int i = idx(rng), j = idx(rng);
      if (i > j) std::swap(i, j);
      if (!used.insert({b, i, j}).second) continue;
      c.entries.push_back({b, i, j, u(rng)});
    }
    if (c.entries.empty()) c.entries.push_back({0, 0, 0, 1.0});
    double rhs = 0.0;
    for (auto& e : c.entries) {
      double x = X0[e.block](e.i, e.j);
      rhs += (e.i == e.j) ? e.value * x : 2.0 * e.value * x;
    }
    c.rhs = rhs;
    out.problem.constraints.push_back(std::move(c));
    y0[k] = u(rng);
  }

  // C = A*(y0) + Z0 keeps the dual strictly feasible, so the optimum is
  // finite; record the interior objective as an upper bound witness
  std::vector<Eigen::MatrixXd> C = Z0;
  for (int k = 0; k < m; ++k)
    for (auto& e : out.problem.constraints[k].entries) {
      C[e.block](e.i, e.j) += y0[k] * e.value;
      if (e.i != e.j) C[e.block](e.j, e.i) += y0[k] * e.value;
    }
  for (int b = 0; b < nblocks; ++b)
    for (int i = 0; i < out.problem.block_dims[b]; ++i)
      for (int j = i; j < out.problem.block_dims[b]; ++j)
        if (C[b](i, j) != 0.0)
          out.problem.objective.push_back({b, i, j, C[b](i, j)});

  out.interior_objective = 0.0;
  for (int b = 0; b < nblocks; ++b)
    out.interior_objective += (C[b].array() * X0[b].array()).sum();
  out.problem.mode = SdpProblem::Mode::kMinimize;
  return out;
}

SdpProblem make_infeasible_sdp(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  SdpProblem p;
  p.mode = SdpProblem::Mode::kFeasibility;
  switch (seed % 3) {
    case 0:
      // x >= 0 with x pinned negative
      p.block_dims = {1};
      p.add_constraint({{0, 0, 0, 1.0}}, -u(rng));
      break;
    case 1: {
      // 2x2 correlation matrix with an off-diagonal entry beyond 1
      p.block_dims = {2};
      p.add_constraint({{0, 0, 0, 1.0}}, 1.0);
      p.add_constraint({{0, 1, 1, 1.0}}, 1.0);
      p.add_constraint({{0, 0, 1, 1.0}}, 2.0 * (1.0 + u(rng)));
      break;
    }
    default:
      // linearly inconsistent pair
      p.block_dims = {2};
      p.add_constraint({{0, 0, 0, 1.0}, {0, 1, 1, 1.0}}, 1.0);
      p.add_constraint({{0, 0, 0, 2.0}, {0, 1, 1, 2.0}}, 2.0 + u(rng));
      break;
  }
  return p;
}

SelftestReport run_sdp_selftest(int n_feasible, int n_infeasible,
                                std::uint64_t seed0, double gap_tol) {
  SelftestReport rep;
  for (int k = 0; k < n_feasible; ++k) {
    GeneratedSdp g = make_random_feasible_sdp(seed0 + k);
    SdpSolution sol = solve(g.problem);
    ++rep.feasible_total;
    double relgap = sol.gap / (1.0 + std::abs(sol.objective));
    rep.worst_gap = std::max(rep.worst_gap, relgap);
    bool ok = sol.status == SdpStatus::kOptimal && relgap <= gap_tol &&
              sol.objective <= g.interior_objective + 1e-6;
    if (ok) ++rep.feasible_solved;
  }
  for (int k = 0; k < n_infeasible; ++k) {
    SdpProblem p = make_infeasible_sdp(seed0 + 1000 + k);
    SdpSolution sol = solve(p);
    ++rep.infeasible_total;
    if (sol.status == SdpStatus::kInfeasible) ++rep.infeasible_detected;
  }
  return rep;
}

}  // namespace sos

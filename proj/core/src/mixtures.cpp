#include "sos/mixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sos {
namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& samples,
                          const std::vector<int>& rows) {
  Eigen::MatrixXd out(static_cast<int>(rows.size()), samples.cols());
  for (int r = 0; r < out.rows(); ++r) out.row(r) = samples.row(rows[r]);
  return out;
}

RobustSettings robust_settings_for(const MixtureSettings& settings) {
  RobustSettings rs;
  rs.t = settings.t;
  rs.tau = settings.tau;
  rs.eps_max = std::max(0.2, 2.0 * settings.mean_step_eps);
  rs.sdp = settings.sdp;
  return rs;
}

MixtureEstimate learn_uniform_core(const Eigen::MatrixXd& samples, int k,
                                   std::mt19937_64& rng,
                                   const MixtureSettings& settings) {
  const int n = static_cast<int>(samples.rows());
  const int d = static_cast<int>(samples.cols());
  if (k < 1 || n < k) throw std::invalid_argument("need at least k samples");

  MixtureEstimate out;
  Eigen::VectorXd center = samples.colwise().mean().transpose();
  out.means = center.transpose().replicate(k, 1);
  out.assignment.k = k;
  out.assignment.labels.assign(static_cast<size_t>(n), 0);

  Eigen::MatrixXd centered = samples.rowwise() - center.transpose();
  StructuredSubsetProgram prog =
      build_program(centered, 1.0 / k, settings.t, settings.tau,
                    StructuredSubsetProgram::Variant::kGaussianWarmup);
  LoweringOptions options;
  options.wwT_block = true;
  SdpLowering lowering = build_sdp(prog, default_pe_degree(prog), options);
  SdpSolution sol =
      solve_min_frobenius(lowering.problem, lowering.wwT_block, settings.sdp);
  out.diagnostics.sdp_status = sol.status;
  if (sol.status != SdpStatus::kOptimal) {
    out.diagnostics.degenerate = true;
    return out;
  }
  out.pe = extract_pe(lowering, sol);
  const Eigen::MatrixXd& wwt = sol.primal[lowering.wwT_block];
  out.diagnostics.wwt_frobenius = wwt.norm();

  double E = settings.rounding_moment_param > 0.0
                 ? settings.rounding_moment_param
                 : 16.0 * k;
  RoundingOutcome rounded = round_second_moments(k * wwt, k, E, rng);
  out.assignment = rounded.assignment;
  out.diagnostics.pivots = rounded.pivots;
  out.diagnostics.rounding_complete = rounded.complete;
  if (!rounded.complete) out.diagnostics.degenerate = true;

  RobustSettings rs = robust_settings_for(settings);
  for (int c = 0; c < k; ++c) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (out.assignment.labels[static_cast<size_t>(i)] == c)
        members.push_back(i);
    if (members.empty()) {
      out.diagnostics.degenerate = true;
      out.means.row(c) = center.transpose();
      continue;
    }
    Eigen::MatrixXd cluster = take_rows(samples, members);
    if (static_cast<int>(members.size()) <= d + 1) {
      // too small for the moment relaxation; fall back to the plain mean
      out.means.row(c) = cluster.colwise().mean();
      continue;
    }
    out.means.row(c) =
        estimate_mean(cluster, settings.mean_step_eps, rs).mean.transpose();
  }
  return out;
}

}  // namespace

std::vector<std::vector<int>> single_linkage_precluster(
    const Eigen::MatrixXd& samples, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("radius must be positive");
  const int n = static_cast<int>(samples.rows());
  std::vector<int> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[static_cast<size_t>(a)] != a) {
      parent[static_cast<size_t>(a)] =
          parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
      a = parent[static_cast<size_t>(a)];
    }
    return a;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((samples.row(i) - samples.row(j)).norm() <= radius)
        parent[static_cast<size_t>(find(i))] = find(j);

  std::vector<std::vector<int>> components;
  std::vector<int> slot(static_cast<size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    int root = find(i);
    if (slot[static_cast<size_t>(root)] < 0) {
      slot[static_cast<size_t>(root)] = static_cast<int>(components.size());
      components.emplace_back();
    }
    components[static_cast<size_t>(slot[static_cast<size_t>(root)])]
        .push_back(i);
  }
  return components;
}

RoundingOutcome round_second_moments(const Eigen::MatrixXd& M, int m, double E,
                                     std::mt19937_64& rng) {
  if (M.rows() != M.cols()) throw std::invalid_argument("M must be square");
  if (m < 1 || E <= 0.0) throw std::invalid_argument("need m >= 1 and E > 0");
  const int n = static_cast<int>(M.rows());
  const double radius = 2.0 * std::sqrt(n / E);

  RoundingOutcome out;
  out.assignment.k = m;
  out.assignment.labels.assign(static_cast<size_t>(n), -1);
  std::vector<int> unassigned(static_cast<size_t>(n));
  std::iota(unassigned.begin(), unassigned.end(), 0);

  for (int c = 0; c < m; ++c) {
    if (unassigned.empty()) {
      out.complete = false;
      break;
    }
    std::uniform_int_distribution<size_t> pick(0, unassigned.size() - 1);
    int pivot = unassigned[pick(rng)];
    out.pivots.push_back(pivot);
    std::vector<int> rest;
    for (int i : unassigned) {
      if ((M.row(pivot) - M.row(i)).norm() <= radius)
        out.assignment.labels[static_cast<size_t>(i)] = c;
      else
        rest.push_back(i);
    }
    unassigned.swap(rest);
  }

  // leftovers go with the pivot whose row is closest
  for (int i : unassigned) {
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < out.pivots.size(); ++c) {
      double dist = (M.row(out.pivots[c]) - M.row(i)).norm();
      if (dist < best_dist) {
        best_dist = dist;
        best = static_cast<int>(c);
      }
    }
    out.assignment.labels[static_cast<size_t>(i)] = best;
  }
  return out;
}

MixtureEstimate learn_mixture_means(const Eigen::MatrixXd& samples, int k,
                                    std::uint64_t seed,
                                    const MixtureSettings& settings) {
  std::mt19937_64 rng(seed);
  const int n = static_cast<int>(samples.rows());
  if (settings.precluster_radius <= 0.0)
    return learn_uniform_core(samples, k, rng, settings);

  auto components =
      single_linkage_precluster(samples, settings.precluster_radius);
  if (components.size() == 1)
    return learn_uniform_core(samples, k, rng, settings);

  // split k across the preclusters in proportion to their size
  MixtureEstimate out;
  out.means.resize(0, samples.cols());
  out.assignment.labels.assign(static_cast<size_t>(n), 0);
  int used = 0;
  for (size_t c = 0; c < components.size(); ++c) {
    const auto& comp = components[c];
    int kc = std::max(
        1, static_cast<int>(std::lround(
               static_cast<double>(k) * static_cast<double>(comp.size()) / n)));
    if (c + 1 == components.size()) kc = std::max(1, k - used);
    MixtureEstimate part =
        learn_uniform_core(take_rows(samples, comp), kc, rng, settings);
    Eigen::MatrixXd merged(used + part.means.rows(), samples.cols());
    merged << out.means, part.means;
    out.means = std::move(merged);
    for (size_t r = 0; r < comp.size(); ++r)
      out.assignment.labels[static_cast<size_t>(comp[r])] =
          used + part.assignment.labels[r];
    used += part.assignment.k;
    out.diagnostics.degenerate |= part.diagnostics.degenerate;
    out.diagnostics.rounding_complete &= part.diagnostics.rounding_complete;
    if (part.pe) out.pe = std::move(part.pe);
  }
  out.assignment.k = used;
  return out;
}

std::optional<std::vector<int>> round_second_moments_nonuniform(
    const Eigen::MatrixXd& pe_wwt, double alpha_prime, double xi, int d,
    std::mt19937_64& rng, double ball_constant) {
  if (pe_wwt.rows() != pe_wwt.cols())
    throw std::invalid_argument("pE ww^T must be square");
  const int n = static_cast<int>(pe_wwt.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (pe_wwt + pe_wwt.transpose()));
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  // columns of V are the Gram vectors: V^T V = pE ww^T (after clipping)
  Eigen::MatrixXd V =
      lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();

  std::vector<int> candidates;
  for (int i = 0; i < n; ++i)
    if (V.col(i).squaredNorm() >= alpha_prime / 100.0) candidates.push_back(i);
  if (candidates.empty()) return std::nullopt;

  std::uniform_int_distribution<size_t> pick(0, candidates.size() - 1);
  int pivot = candidates[pick(rng)];
  const double radius = ball_constant * std::sqrt(d * xi);
  std::vector<int> cluster;
  for (int i = 0; i < n; ++i)
    if ((V.col(pivot) - V.col(i)).norm() <= radius) cluster.push_back(i);
  return cluster;
}

MixtureEstimate learn_nonuniform(const Eigen::MatrixXd& samples, double eta,
                                 double xi, std::uint64_t seed,
                                 const MixtureSettings& settings) {
  if (eta <= 0.0 || eta > 1.0) throw std::invalid_argument("eta in (0, 1]");
  if (xi <= 0.0) throw std::invalid_argument("xi must be positive");
  const int n = static_cast<int>(samples.rows());
  const int d = static_cast<int>(samples.cols());
  std::mt19937_64 rng(seed);

  MixtureEstimate out;
  std::vector<int> remaining(static_cast<size_t>(n));
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<std::vector<int>> clusters;

  for (double alpha = 1.0; alpha >= eta - 0.5 * xi && !remaining.empty();
       alpha -= xi) {
    for (;;) {
      if (remaining.empty()) break;
      Eigen::MatrixXd cur = take_rows(samples, remaining);
      Eigen::VectorXd center = cur.colwise().mean().transpose();
      Eigen::MatrixXd centered = cur.rowwise() - center.transpose();
      StructuredSubsetProgram prog =
          build_program(centered, std::min(alpha, 1.0), settings.t,
                        settings.tau,
                        StructuredSubsetProgram::Variant::kGaussianWarmup);
      // cheap feasibility probe first: most sweep steps are infeasible and
      // do not deserve the much heavier Frobenius-minimizing solve
      {
        SdpLowering probe = build_sdp(prog, default_pe_degree(prog));
        SdpSolution gate = solve(probe.problem, settings.sdp);
        out.diagnostics.sdp_status = gate.status;
        if (gate.status != SdpStatus::kOptimal) break;
      }
      LoweringOptions options;
      options.wwT_block = true;
      SdpLowering lowering =
          build_sdp(prog, default_pe_degree(prog), options);
      // minimizing ||pE ww^T||_F spreads the pseudoexpectation evenly over
      // the valid subsets, which keeps the Gram vectors of one component in
      // a tight ball; a bare feasible point has no such symmetry
      SdpSolution sol = solve_min_frobenius(lowering.problem,
                                            lowering.wwT_block, settings.sdp);
      out.diagnostics.sdp_status = sol.status;
      if (sol.status != SdpStatus::kOptimal) break;
      PseudoExpectation pe = extract_pe(lowering, sol);
      const Eigen::MatrixXd& wwt = sol.primal[lowering.wwT_block];
      auto local = round_second_moments_nonuniform(
          wwt, alpha, xi, d, rng, settings.nonuniform_ball_constant);
      if (!local || local->empty()) break;
      out.pe = std::move(pe);
      std::vector<int> cluster;
      std::vector<char> taken(remaining.size(), 0);
      for (int idx : *local) {
        cluster.push_back(remaining[static_cast<size_t>(idx)]);
        taken[static_cast<size_t>(idx)] = 1;
      }
      clusters.push_back(cluster);
      out.diagnostics.alpha_trace.push_back(alpha);
      std::vector<int> rest;
      for (size_t r = 0; r < remaining.size(); ++r)
        if (!taken[r]) rest.push_back(remaining[r]);
      remaining.swap(rest);
    }
  }

  const int k = std::max<size_t>(1, clusters.size());
  out.assignment.k = static_cast<int>(k);
  out.assignment.labels.assign(static_cast<size_t>(n), 0);
  out.means = Eigen::MatrixXd::Zero(k, d);
  if (clusters.empty()) {
    out.diagnostics.degenerate = true;
    out.means.row(0) = samples.colwise().mean();
    return out;
  }
  for (size_t c = 0; c < clusters.size(); ++c) {
    out.means.row(static_cast<int>(c)) =
        take_rows(samples, clusters[c]).colwise().mean();
    for (int i : clusters[c])
      out.assignment.labels[static_cast<size_t>(i)] = static_cast<int>(c);
  }
  // points the sweep never claimed join the nearest recovered mean
  for (int i : remaining) {
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int c = 0; c < static_cast<int>(clusters.size()); ++c) {
      double dist = (samples.row(i) - out.means.row(c)).norm();
      if (dist < best_dist) {
        best_dist = dist;
        best = c;
      }
    }
    out.assignment.labels[static_cast<size_t>(i)] = best;
    out.diagnostics.degenerate = true;  // sweep left data behind
  }
  return out;
}

IdentifiabilityReport check_identifiability(const Eigen::MatrixXd& samples,
                                            const std::vector<char>& good_mask,
                                            const Eigen::VectorXd& mu_star,
                                            int subset_size, int t,
                                            int grid_points) {
  const int n = static_cast<int>(samples.rows());
  const int d = static_cast<int>(samples.cols());
  if (static_cast<int>(good_mask.size()) != n)
    throw std::invalid_argument("good_mask size mismatch");
  if (subset_size < 1 || subset_size > n)
    throw std::invalid_argument("bad subset size");
  if (t % 2 != 0 || t < 2) throw std::invalid_argument("t must be even");

  // sample projections onto every grid direction, computed once
  Eigen::MatrixXd dirs(grid_points, d);
  if (d == 2) {
    for (int g = 0; g < grid_points; ++g) {
      double theta = 2.0 * M_PI * g / grid_points;
      dirs(g, 0) = std::cos(theta);
      dirs(g, 1) = std::sin(theta);
    }
  } else {
    std::mt19937_64 dir_rng(12345);
    std::normal_distribution<double> gauss;
    for (int g = 0; g < grid_points; ++g) {
      Eigen::VectorXd u(d);
      for (int a = 0; a < d; ++a) u(a) = gauss(dir_rng);
      dirs.row(g) = u.normalized().transpose();
    }
  }
  Eigen::MatrixXd proj = samples * dirs.transpose();  // n x grid_points

  const double moment_cap = 2.0 * std::pow(static_cast<double>(t), t / 2.0);
  double total_good = 0;
  for (char g : good_mask) total_good += g ? 1 : 0;

  IdentifiabilityReport rep;
  rep.worst_slack = std::numeric_limits<double>::infinity();

  std::vector<int> comb(static_cast<size_t>(subset_size));
  std::iota(comb.begin(), comb.end(), 0);
  for (;;) {
    ++rep.subsets_total;

    double in_good = 0;
    for (int i : comb) in_good += good_mask[static_cast<size_t>(i)] ? 1 : 0;
    bool qualifies = true;
    for (int g = 0; g < grid_points && qualifies; ++g) {
      double mean = 0.0;
      for (int i : comb) mean += proj(i, g);
      mean /= subset_size;
      double moment = 0.0;
      for (int i : comb) moment += std::pow(proj(i, g) - mean, t);
      if (moment / subset_size > moment_cap) qualifies = false;
    }
    if (qualifies && in_good > 0) {
      ++rep.qualifying;
      Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
      for (int i : comb) mu += samples.row(i).transpose();
      mu /= subset_size;
      double bound = 4.0 * std::sqrt(static_cast<double>(t)) *
                     std::pow(total_good / in_good, 1.0 / t);
      double slack = bound - (mu - mu_star).norm();
      rep.worst_slack = std::min(rep.worst_slack, slack);
      if (slack < 0.0) ++rep.violations;
    }

    // next combination in lexicographic order
    int pos = subset_size - 1;
    while (pos >= 0 && comb[static_cast<size_t>(pos)] ==
                           n - subset_size + pos)
      --pos;
    if (pos < 0) break;
    ++comb[static_cast<size_t>(pos)];
    for (int q = pos + 1; q < subset_size; ++q)
      comb[static_cast<size_t>(q)] = comb[static_cast<size_t>(q - 1)] + 1;
  }
  return rep;
}

}  // namespace sos

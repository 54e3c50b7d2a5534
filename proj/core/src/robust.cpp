#include "sos/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace sos {
namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty range");
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

// consistency factor matching the normal distribution's median absolute
// deviation to its standard deviation
constexpr double kMadScale = 1.4826;

}  // namespace

std::vector<int> naive_prune(const Eigen::MatrixXd& samples, double eps,
                             int /*t*/) {
  if (eps < 0.0 || eps >= 0.5)
    throw std::invalid_argument("corruption fraction must lie in [0, 1/2)");
  const int n = static_cast<int>(samples.rows());
  const int d = static_cast<int>(samples.cols());
  if (n == 0) return {};

  Eigen::VectorXd med(d);
  std::vector<double> col(static_cast<size_t>(n));
  std::vector<double> mads(static_cast<size_t>(d));
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < n; ++i) col[static_cast<size_t>(i)] = samples(i, j);
    med(j) = median_of(col);
    for (int i = 0; i < n; ++i)
      col[static_cast<size_t>(i)] = std::abs(samples(i, j) - med(j));
    mads[static_cast<size_t>(j)] = median_of(col);
  }
  const double scale = kMadScale * median_of(mads);
  const double radius = 10.0 * std::sqrt(static_cast<double>(d)) * scale;

  std::vector<int> kept;
  for (int i = 0; i < n; ++i)
    if ((samples.row(i).transpose() - med).norm() <= radius) kept.push_back(i);
  return kept;
}

RobustEstimate estimate_mean(const Eigen::MatrixXd& samples, double eps,
                             const RobustSettings& settings) {
  if (eps < 0.0 || eps >= settings.eps_max)
    throw std::invalid_argument(
        "corruption fraction out of the configured range");
  const int n = static_cast<int>(samples.rows());
  const int d = static_cast<int>(samples.cols());
  if (n == 0 || d == 0) throw std::invalid_argument("empty sample matrix");

  RobustEstimate out;
  std::vector<int> kept = naive_prune(samples, eps, settings.t);
  if (kept.empty()) kept.push_back(0);  // degenerate; never drop everything
  {
    std::vector<char> is_kept(static_cast<size_t>(n), 0);
    for (int i : kept) is_kept[static_cast<size_t>(i)] = 1;
    for (int i = 0; i < n; ++i)
      if (!is_kept[static_cast<size_t>(i)]) out.pruned.push_back(i);
  }

  Eigen::MatrixXd x(static_cast<int>(kept.size()), d);
  for (int r = 0; r < x.rows(); ++r) x.row(r) = samples.row(kept[r]);
  out.center = x.colwise().mean().transpose();
  Eigen::MatrixXd centered = x.rowwise() - out.center.transpose();

  // the good fraction is (1 - eps) of the original sample, so after pruning
  // it makes up at least this share of what is left
  const double alpha =
      std::min(1.0, (1.0 - eps) * n / static_cast<double>(kept.size()));
  StructuredSubsetProgram prog =
      build_program(centered, alpha, settings.t, settings.tau,
                    StructuredSubsetProgram::Variant::kGaussianWarmup);
  SdpLowering lowering = build_sdp(prog, default_pe_degree(prog));
  SdpSolution sol = solve(lowering.problem, settings.sdp);

  out.sdp_status = sol.status;
  out.sdp_iterations = sol.iterations;
  out.mean = out.center;  // fallback when no pseudoexpectation is available
  if (sol.status != SdpStatus::kOptimal) return out;

  PseudoExpectation pe = extract_pe(lowering, sol);
  Eigen::VectorXd pe_mu(d);
  Poly mu_sq(0.0, prog.space);
  for (int a = 0; a < d; ++a) {
    pe_mu(a) = pe.moment(Monomial::var(prog.mu_var(a))).value_or(0.0);
    mu_sq = mu_sq + Poly(Monomial::var(prog.mu_var(a), 2), 1.0, prog.space);
  }
  out.mean = pe_mu + out.center;
  out.rounding_gap = pe_eval(pe, mu_sq) - pe_mu.squaredNorm();
  out.satisfaction = check_satisfies(pe, prog, 1e-4);
  return out;
}

namespace {

// flatten (Y - mu)^{tensor t/2} over the ordered d^{t/2} tensor basis
Eigen::VectorXd tensor_power(const Eigen::VectorXd& v, int half) {
  Eigen::VectorXd z = Eigen::VectorXd::Ones(1);
  for (int k = 0; k < half; ++k) {
    Eigen::VectorXd next(z.size() * v.size());
    for (int i = 0; i < z.size(); ++i)
      next.segment(i * v.size(), v.size()) = z(i) * v;
    z = std::move(next);
  }
  return z;
}

// the generating mixture, recovered from the dataset's provenance record;
// corruption nests the original description under "base"
std::optional<MixtureSpec> mixture_from_provenance(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  const nlohmann::json* node = &j;
  while (node->is_object() && !node->contains("mixture") &&
         node->contains("base"))
    node = &node->at("base");
  if (!node->is_object() || !node->contains("mixture")) return std::nullopt;
  return mixture_spec_from_json(node->at("mixture").dump());
}

}  // namespace

ConditionsReport check_conditions_e(const DatasetWithTruth& data, int t) {
  ConditionsReport rep;
  const int n = data.n();
  const int d = data.d();

  std::vector<int> good;
  for (int i = 0; i < n; ++i)
    if (data.labels[static_cast<size_t>(i)] >= 0) good.push_back(i);
  if (good.empty()) {
    rep.vacuous = true;
    rep.prune_keeps_good = true;  // nothing to keep
    return rep;
  }
  const int m = static_cast<int>(good.size());

  // E1: pruning never removes an uncorrupted point
  std::vector<int> kept = naive_prune(data.samples, data.eps, t);
  std::vector<char> is_kept(static_cast<size_t>(n), 0);
  for (int i : kept) is_kept[static_cast<size_t>(i)] = 1;
  rep.prune_keeps_good = std::all_of(good.begin(), good.end(), [&](int i) {
    return is_kept[static_cast<size_t>(i)] != 0;
  });

  // E2: the good points' own indicator satisfies the structured-subset axioms
  rep.indicator = verify_indicator_satisfiability(data.samples, good, t, 1e-3);
  rep.indicator_satisfiable = rep.indicator.ok(1e-7);

  // E3: their empirical mean is close to the true mean; the bound combines
  // the corruption term sqrt(t) * eps^{1 - 1/t} with a sampling-noise floor
  Eigen::VectorXd good_mean = Eigen::VectorXd::Zero(d);
  for (int i : good) good_mean += data.samples.row(i).transpose();
  good_mean /= static_cast<double>(m);
  rep.good_mean_error = (good_mean - data.mixture_mean()).norm();
  rep.good_mean_bound =
      std::sqrt(static_cast<double>(t)) *
          std::pow(data.eps, 1.0 - 1.0 / static_cast<double>(t)) +
      4.0 * std::sqrt(static_cast<double>(d) / static_cast<double>(m));
  rep.good_mean_close = rep.good_mean_error <= rep.good_mean_bound;

  // E4: per component, the empirical t-th moment tensor of its good points
  // stays below the population tensor plus a 0.1 margin
  std::optional<MixtureSpec> mix = mixture_from_provenance(data.provenance);
  const int half = t / 2;
  const int td = static_cast<int>(std::round(std::pow(d, half)));
  double min_eig = std::numeric_limits<double>::infinity();
  const int k = static_cast<int>(data.true_means.rows());
  for (int c = 0; c < k; ++c) {
    Eigen::MatrixXd emp = Eigen::MatrixXd::Zero(td, td);
    int count = 0;
    for (int i : good) {
      if (data.labels[static_cast<size_t>(i)] != c) continue;
      Eigen::VectorXd z = tensor_power(
          data.samples.row(i).transpose() - data.true_means.row(c).transpose(),
          half);
      emp.noalias() += z * z.transpose();
      ++count;
    }
    if (count == 0) continue;
    emp /= static_cast<double>(count);
    Eigen::MatrixXd pop;
    if (mix && c < static_cast<int>(mix->components.size())) {
      pop = population_moment_tensor(mix->components[static_cast<size_t>(c)], t);
    } else {
      DistributionSpec gauss;
      gauss.mean = Eigen::VectorXd::Zero(d);
      pop = population_moment_tensor(gauss, t);
    }
    Eigen::MatrixXd slack =
        pop + 0.1 * Eigen::MatrixXd::Identity(td, td) - emp;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(slack);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  }
  rep.moment_slack_min_eig = min_eig;
  rep.moment_tensor_bounded = min_eig >= -1e-9;
  return rep;
}

}  // namespace sos

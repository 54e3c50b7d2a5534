#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sos/datagen.hpp"
#include "sos/robust.hpp"

using namespace sos;

namespace {

MixtureSpec single_gaussian(Eigen::VectorXd mean) {
  MixtureSpec spec;
  DistributionSpec c;
  c.kind = DistributionSpec::Kind::kGaussian;
  c.mean = std::move(mean);
  spec.components.push_back(std::move(c));
  spec.weights = Eigen::VectorXd::Ones(1);
  return spec;
}

double median(std::vector<double> v) {
  REQUIRE(!v.empty());
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

const Eigen::Vector2d kTrueMean(1.0, -2.0);

DatasetWithTruth shifted_dataset(double eps, unsigned seed, int n = 60,
                                 double distance = 10.0) {
  auto clean = sample_mixture(single_gaussian(kTrueMean), n, seed);
  if (eps == 0.0) return clean;
  Eigen::VectorXd v = Eigen::Vector2d(distance, 0.0);
  return corrupt(clean, eps, Adversary::mean_shift(v), seed + 100);
}

}  // namespace

TEST_CASE("pruning keeps inliers and removes far outliers") {
  for (unsigned seed = 1; seed <= 10; ++seed) {
    auto data = sample_mixture(single_gaussian(kTrueMean), 60, seed);
    CHECK(naive_prune(data.samples, 0.0, 4).size() == 60);
  }

  auto data = sample_mixture(single_gaussian(kTrueMean), 60, 5);
  Eigen::MatrixXd with_outlier(61, 2);
  with_outlier.topRows(60) = data.samples;
  with_outlier.row(60) = Eigen::RowVector2d(1e6, 1e6);
  auto kept = naive_prune(with_outlier, 0.1, 4);
  CHECK(kept.size() == 60);
  CHECK(std::find(kept.begin(), kept.end(), 60) == kept.end());

  Eigen::MatrixXd one(1, 2);
  one << 7.0, -3.0;
  CHECK(naive_prune(one, 0.1, 4) == std::vector<int>{0});

  CHECK_THROWS_AS(naive_prune(one, 0.5, 4), std::invalid_argument);
  CHECK_THROWS_AS(naive_prune(one, -0.1, 4), std::invalid_argument);
}

TEST_CASE("estimate with no corruption tracks the empirical mean") {
  auto data = sample_mixture(single_gaussian(kTrueMean), 40, 7);
  RobustEstimate est = estimate_mean(data.samples, 0.0);
  REQUIRE(est.solved());
  Eigen::VectorXd empirical = data.samples.colwise().mean().transpose();
  CHECK((est.mean - empirical).norm() <= 0.05);
  CHECK(est.pruned.empty());
  CHECK(est.rounding_gap >= -1e-6);
}

TEST_CASE("recovery and error trend under mean-shift corruption") {
  // eps = 0.1: beats the raw mean by at least 2x on nearly every seed
  std::vector<double> errs_mid;
  int good_seeds = 0;
  for (unsigned seed = 1; seed <= 10; ++seed) {
    auto bad = shifted_dataset(0.1, seed);
    RobustEstimate est = estimate_mean(bad.samples, 0.1);
    REQUIRE(std::isfinite(est.mean.norm()));
    double err = (est.mean - kTrueMean).norm();
    double raw =
        (bad.samples.colwise().mean().transpose() - kTrueMean).norm();
    if (est.solved()) {
      // pseudoexpectation Cauchy-Schwarz backs the linear rounding
      CHECK(est.rounding_gap >= -1e-6);
      CHECK(est.satisfaction.normalized);
      CHECK(est.satisfaction.normalization_residual <= 1e-6);
      CHECK(est.satisfaction.min_moment_eig >= -1e-3);
      CHECK(est.satisfaction.max_equality_residual <= 1e-2);
    }
    if (err <= 1.0 && err <= 0.5 * raw) ++good_seeds;
    if (seed <= 9) errs_mid.push_back(err);
  }
  CHECK(good_seeds >= 8);

  // matched seeds across corruption levels: the median error does not get
  // better when the corruption gets worse
  auto median_at = [&](double eps) {
    RobustSettings rs;
    rs.eps_max = 0.25;
    std::vector<double> errs;
    for (unsigned seed = 1; seed <= 9; ++seed) {
      auto bad = shifted_dataset(eps, seed);
      errs.push_back(
          (estimate_mean(bad.samples, eps, rs).mean - kTrueMean).norm());
    }
    return median(errs);
  };
  double med_high = median_at(0.2);
  double med_mid = median(errs_mid);
  double med_low = median_at(0.05);
  CHECK(med_high >= med_mid);
  CHECK(med_mid >= med_low);
}

TEST_CASE("moment-stealth corruption is harder than a prunable shift") {
  std::vector<double> shift_errs, stealth_errs;
  for (unsigned seed = 1; seed <= 5; ++seed) {
    auto clean = sample_mixture(single_gaussian(kTrueMean), 60, seed);
    auto shifted = corrupt(clean, 0.1,
                           Adversary::mean_shift(Eigen::Vector2d(100.0, 0.0)),
                           seed + 100);
    auto stealthy =
        corrupt(clean, 0.1, Adversary::moment_stealth(4), seed + 100);
    shift_errs.push_back(
        (estimate_mean(shifted.samples, 0.1).mean - kTrueMean).norm());
    stealth_errs.push_back(
        (estimate_mean(stealthy.samples, 0.1).mean - kTrueMean).norm());
  }
  CHECK(median(stealth_errs) > median(shift_errs));
}

TEST_CASE("estimates are translation and rotation equivariant") {
  auto bad = shifted_dataset(0.1, 3, 40);
  RobustEstimate base = estimate_mean(bad.samples, 0.1);
  REQUIRE(base.solved());

  Eigen::VectorXd c = Eigen::Vector2d(5.0, -3.0);
  Eigen::MatrixXd translated = bad.samples.rowwise() + c.transpose();
  RobustEstimate shifted = estimate_mean(translated, 0.1);
  CHECK((shifted.mean - base.mean - c).norm() <= 1e-2);

  double theta = 0.7;
  Eigen::Matrix2d q;
  q << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  Eigen::MatrixXd rotated = bad.samples * q.transpose();
  RobustEstimate turned = estimate_mean(rotated, 0.1);
  CHECK((turned.mean - q * base.mean).norm() <= 2e-2);
}

TEST_CASE("beyond-guarantee corruption terminates cleanly") {
  auto bad = shifted_dataset(0.4, 11, 30);
  RobustSettings rs;
  rs.eps_max = 0.5;
  RobustEstimate est = estimate_mean(bad.samples, 0.4, rs);
  CHECK(std::isfinite(est.mean.norm()));  // answer or explicit fallback

  CHECK_THROWS_AS(estimate_mean(bad.samples, 0.4), std::invalid_argument);
  CHECK_THROWS_AS(estimate_mean(bad.samples, -0.01), std::invalid_argument);
}

TEST_CASE("analysis conditions hold on clean data") {
  int all_pass = 0;
  for (unsigned seed = 1; seed <= 10; ++seed) {
    auto data = sample_mixture(single_gaussian(kTrueMean), 100000, seed);
    ConditionsReport rep = check_conditions_e(data, 4);
    CHECK(!rep.vacuous);
    if (rep.all_pass()) ++all_pass;
  }
  CHECK(all_pass >= 9);
}

TEST_CASE("a planted heavy tail breaks the moment condition") {
  auto data = sample_mixture(single_gaussian(kTrueMean), 1000, 3);
  data.samples.row(0) = Eigen::RowVector2d(50.0, 0.0);
  data.clean_copies.row(0) = data.samples.row(0);
  ConditionsReport rep = check_conditions_e(data, 4);
  CHECK(!rep.moment_tensor_bounded);
  CHECK(rep.moment_slack_min_eig < -1.0);
}

TEST_CASE("all-corrupted data is flagged vacuous") {
  auto data = sample_mixture(single_gaussian(kTrueMean), 20, 4);
  std::fill(data.labels.begin(), data.labels.end(), -1);
  ConditionsReport rep = check_conditions_e(data, 4);
  CHECK(rep.vacuous);
  CHECK(!rep.all_pass());
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "sos/datagen.hpp"
#include "sos/mixtures.hpp"

using namespace sos;

namespace {

MixtureSpec two_gaussians(double separation, double w0 = 0.5) {
  MixtureSpec spec;
  DistributionSpec a, b;
  a.mean = Eigen::Vector2d(-separation / 2.0, 0.0);
  b.mean = Eigen::Vector2d(separation / 2.0, 0.0);
  spec.components = {a, b};
  spec.weights = Eigen::Vector2d(w0, 1.0 - w0);
  return spec;
}

double median(std::vector<double> v) {
  REQUIRE(!v.empty());
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// best-permutation mean error against the generating means
double mean_error(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth) {
  REQUIRE(est.rows() == truth.rows());
  std::vector<int> perm(static_cast<size_t>(truth.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (int c = 0; c < truth.rows(); ++c)
      worst = std::max(
          worst, (est.row(perm[static_cast<size_t>(c)]) - truth.row(c)).norm());
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// misassigned rows under the best label permutation
int label_mismatches(const std::vector<int>& est, const std::vector<int>& truth,
                     int k) {
  std::vector<int> perm(static_cast<size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  int best = static_cast<int>(est.size());
  do {
    int bad = 0;
    for (size_t i = 0; i < est.size(); ++i)
      if (perm[static_cast<size_t>(est[i])] != truth[i]) ++bad;
    best = std::min(best, bad);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// ideal rounding input for a balanced partition: k * pE[w w^T] with perfectly
// uniform moments is the 0/1 block indicator matrix of the partition
Eigen::MatrixXd block_indicator(const std::vector<int>& labels, int k) {
  const int n = static_cast<int>(labels.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (labels[static_cast<size_t>(i)] == labels[static_cast<size_t>(j)])
        M(i, j) = 1.0;
  (void)k;
  return M;
}

}  // namespace

TEST_CASE("single-linkage preclustering finds connected components") {
  Eigen::MatrixXd two_clouds(6, 2);
  two_clouds << 0, 0, 1, 0, 0, 1, 100, 100, 101, 100, 100, 101;
  auto comps = single_linkage_precluster(two_clouds, 10.0);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].size() == 3);
  CHECK(comps[1].size() == 3);

  Eigen::MatrixXd same = Eigen::MatrixXd::Zero(4, 3);
  CHECK(single_linkage_precluster(same, 0.5).size() == 1);

  // a chain with every hop under the radius is one component even though the
  // endpoints are far apart
  Eigen::MatrixXd chain(10, 1);
  for (int i = 0; i < 10; ++i) chain(i, 0) = 0.9 * i;
  CHECK(single_linkage_precluster(chain, 1.0).size() == 1);
  CHECK(single_linkage_precluster(chain, 0.5).size() == 10);

  CHECK_THROWS_AS(single_linkage_precluster(chain, 0.0), std::invalid_argument);
}

TEST_CASE("second-moment rounding recovers a planted block partition") {
  const int n = 200;
  const int m = 4;
  std::vector<int> truth(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) truth[static_cast<size_t>(i)] = i % m;
  Eigen::MatrixXd M = block_indicator(truth, m);

  std::mt19937_64 rng(11);
  RoundingOutcome clean = round_second_moments(M, m, 16.0 * m, rng);
  CHECK(clean.complete);
  CHECK(label_mismatches(clean.assignment.labels, truth, m) == 0);
  CHECK(clean.pivots.size() == static_cast<size_t>(m));

  // entrywise noise well under the ball radius must not move any label
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double eps : {0.01, 0.05}) {
    int bad_trials = 0;
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::MatrixXd noisy = M;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) noisy(i, j) += eps * u(rng);
      RoundingOutcome r = round_second_moments(noisy, m, 16.0 * m, rng);
      int bad = label_mismatches(r.assignment.labels, truth, m);
      if (bad > static_cast<int>(eps * eps * m * m * n)) ++bad_trials;
    }
    CHECK(bad_trials <= 1);
  }

  // deterministic given the generator state
  std::mt19937_64 rng_a(99), rng_b(99);
  RoundingOutcome a = round_second_moments(M, m, 16.0 * m, rng_a);
  RoundingOutcome b = round_second_moments(M, m, 16.0 * m, rng_b);
  CHECK(a.pivots == b.pivots);
  CHECK(a.assignment.labels == b.assignment.labels);

  // more rounds than distinguishable rows: everything lands in round one and
  // the outcome is flagged incomplete
  Eigen::MatrixXd flat = Eigen::MatrixXd::Ones(6, 6);
  RoundingOutcome f = round_second_moments(flat, 2, 32.0, rng);
  CHECK(!f.complete);
  CHECK(std::all_of(f.assignment.labels.begin(), f.assignment.labels.end(),
                    [](int l) { return l == 0; }));

  CHECK_THROWS_AS(round_second_moments(Eigen::MatrixXd::Zero(2, 3), 1, 1.0, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(round_second_moments(flat, 0, 1.0, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(round_second_moments(flat, 1, 0.0, rng),
                  std::invalid_argument);
}

TEST_CASE("well-separated balanced mixture is clustered and estimated") {
  const double kFroTarget = 24.0 / (2.0 * std::sqrt(2.0));
  for (unsigned seed : {1u, 2u, 3u}) {
    auto data = sample_mixture(two_gaussians(8.0), 24, seed);
    MixtureEstimate est = learn_mixture_means(data.samples, 2, seed);
    REQUIRE(est.diagnostics.sdp_status == SdpStatus::kOptimal);
    CHECK(est.diagnostics.rounding_complete);
    CHECK(!est.diagnostics.degenerate);
    CHECK(label_mismatches(est.assignment.labels, data.labels, 2) <= 2);
    CHECK(mean_error(est.means, data.true_means) <= 1.0);

    // the minimum-Frobenius solution spreads evenly across the k clusters
    CHECK(est.diagnostics.wwt_frobenius <= kFroTarget + 0.5);

    // indicators of samples from different clusters should be nearly
    // uncorrelated under the relaxation, unlike same-cluster pairs
    REQUIRE(est.pe.has_value());
    auto prog_w = [&](int i) { return Poly(Monomial::var(i), 1.0); };
    double cross = 0.0, within = 0.0;
    int n_cross = 0, n_within = 0;
    for (int i = 0; i < 24; ++i)
      for (int j = i + 1; j < 24; ++j) {
        double v = pe_eval(*est.pe, prog_w(i) * prog_w(j));
        if (data.labels[static_cast<size_t>(i)] ==
            data.labels[static_cast<size_t>(j)]) {
          within += v;
          ++n_within;
        } else {
          cross += v;
          ++n_cross;
        }
      }
    cross /= n_cross;
    within /= n_within;
    CHECK(cross <= 0.2 * within);
    CHECK(within >= 0.1);
  }
}

TEST_CASE("mean error improves as the separation grows") {
  std::vector<double> medians;
  for (double sep : {4.0, 16.0}) {
    std::vector<double> errs;
    for (unsigned seed = 1; seed <= 5; ++seed) {
      auto data = sample_mixture(two_gaussians(sep), 24, seed);
      MixtureEstimate est = learn_mixture_means(data.samples, 2, seed);
      errs.push_back(mean_error(est.means, data.true_means));
    }
    medians.push_back(median(errs));
  }
  CHECK(medians[1] < medians[0]);
}

TEST_CASE("single-component fit reduces to a robust mean") {
  MixtureSpec one;
  DistributionSpec c;
  c.mean = Eigen::Vector2d(2.0, -1.0);
  one.components = {c};
  one.weights = Eigen::VectorXd::Ones(1);
  auto data = sample_mixture(one, 24, 4);
  MixtureEstimate est = learn_mixture_means(data.samples, 1, 4);
  REQUIRE(est.assignment.k == 1);
  CHECK(std::all_of(est.assignment.labels.begin(), est.assignment.labels.end(),
                    [](int l) { return l == 0; }));
  CHECK((est.means.row(0).transpose() - c.mean).norm() <= 1.0);
}

TEST_CASE("coincident components terminate without crashing") {
  auto data = sample_mixture(two_gaussians(0.0), 16, 6);
  MixtureEstimate est = learn_mixture_means(data.samples, 2, 6);
  CHECK(est.assignment.k == 2);
  CHECK(est.means.rows() == 2);
  CHECK(est.assignment.labels.size() == 16);
  CHECK_THROWS_AS(learn_mixture_means(data.samples, 0, 6),
                  std::invalid_argument);
  CHECK_THROWS_AS(learn_mixture_means(data.samples, 17, 6),
                  std::invalid_argument);
}

TEST_CASE("nonuniform gram rounding isolates a heavy support") {
  std::mt19937_64 rng(5);
  const int n = 8;

  // point mass on a subset: w w^T is rank one and exactly the support
  // comes back
  Eigen::VectorXd ind = Eigen::VectorXd::Zero(n);
  for (int i : {1, 3, 4}) ind(i) = 1.0;
  Eigen::MatrixXd rank1 = ind * ind.transpose();
  auto cluster = round_second_moments_nonuniform(rank1, 0.375, 0.02, 2, rng);
  REQUIRE(cluster.has_value());
  CHECK(*cluster == std::vector<int>({1, 3, 4}));

  // two orthogonal blocks: one block comes back intact
  Eigen::VectorXd other = Eigen::VectorXd::Zero(n);
  for (int i : {0, 2, 5, 6, 7}) other(i) = 1.0;
  Eigen::MatrixXd blocks =
      0.4 * ind * ind.transpose() + 0.4 * other * other.transpose();
  for (int trial = 0; trial < 10; ++trial) {
    auto c = round_second_moments_nonuniform(blocks, 0.4, 0.02, 2, rng);
    REQUIRE(c.has_value());
    bool is_first = *c == std::vector<int>({1, 3, 4});
    bool is_second = *c == std::vector<int>({0, 2, 5, 6, 7});
    CHECK((is_first || is_second));
  }

  // nothing above the pivot-norm floor
  CHECK(!round_second_moments_nonuniform(Eigen::MatrixXd::Zero(n, n), 0.5,
                                         0.02, 2, rng)
             .has_value());
  CHECK_THROWS_AS(round_second_moments_nonuniform(Eigen::MatrixXd::Zero(2, 3),
                                                  0.5, 0.02, 2, rng),
                  std::invalid_argument);
}

TEST_CASE("unbalanced mixture is recovered by the weight sweep") {
  auto data = sample_mixture(two_gaussians(10.0, 0.7), 30, 1);
  MixtureEstimate est = learn_nonuniform(data.samples, 0.25, 0.02, 1);
  REQUIRE(est.assignment.k == 2);
  CHECK(!est.diagnostics.degenerate);
  std::vector<int> sizes(2, 0);
  for (int l : est.assignment.labels) ++sizes[static_cast<size_t>(l)];
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes[0] >= 7);
  CHECK(sizes[0] <= 13);
  CHECK(mean_error(est.means, data.true_means) <= 1.5);
  for (double a : est.diagnostics.alpha_trace) {
    CHECK(a <= 1.0);
    CHECK(a >= 0.25 - 0.011);
  }

  CHECK_THROWS_AS(learn_nonuniform(data.samples, 0.0, 0.02, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(learn_nonuniform(data.samples, 0.25, 0.0, 1),
                  std::invalid_argument);
}

TEST_CASE("every bounded-moment subset pins down the mean on tiny data") {
  for (unsigned seed : {1u, 2u, 3u}) {
    auto data = sample_mixture(two_gaussians(10.0), 12, seed);
    std::vector<char> good(12, 0);
    Eigen::VectorXd mu_star = Eigen::VectorXd::Zero(2);
    int n_good = 0;
    for (int i = 0; i < 12; ++i)
      if (data.labels[static_cast<size_t>(i)] == 0) {
        good[static_cast<size_t>(i)] = 1;
        mu_star += data.samples.row(i).transpose();
        ++n_good;
      }
    REQUIRE(n_good > 0);
    mu_star /= n_good;

    // only subsets drawn entirely from the good cluster can pass the
    // directional moment cap at this separation, so match their size
    IdentifiabilityReport rep =
        check_identifiability(data.samples, good, mu_star, n_good, 4, 200);
    double expected = 1.0;
    for (int i = 0; i < n_good; ++i)
      expected = expected * (12 - i) / (i + 1);
    CHECK(rep.subsets_total == static_cast<int>(std::lround(expected)));
    CHECK(rep.qualifying > 0);
    CHECK(rep.violations == 0);
    CHECK(rep.worst_slack >= 0.0);
  }

  Eigen::MatrixXd tiny = Eigen::MatrixXd::Zero(3, 2);
  std::vector<char> mask(3, 1);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(check_identifiability(tiny, mask, z, 4, 4, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_identifiability(tiny, mask, z, 2, 3, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_identifiability(tiny, {1, 0}, z, 2, 4, 10),
                  std::invalid_argument);
}

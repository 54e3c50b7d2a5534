#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "sos/datagen.hpp"
#include "sos/sos.hpp"

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

Eigen::MatrixXd rotation2d(double theta) {
  Eigen::MatrixXd R(2, 2);
  R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return R;
}

std::vector<Eigen::VectorXd> sorted_rows(const Eigen::MatrixXd& M) {
  std::vector<Eigen::VectorXd> rows;
  for (int i = 0; i < M.rows(); ++i) rows.push_back(M.row(i).transpose());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    for (int k = 0; k < a.size(); ++k)
      if (a(k) != b(k)) return a(k) < b(k);
    return false;
  });
  return rows;
}

// moment oracle backed by the closed-form population tensors
MomentOracle oracle_for(const DistributionSpec& spec) {
  int d = spec.dim();
  auto T2 = population_moment_tensor(spec, 2);
  auto T4 = population_moment_tensor(spec, 4);
  return [d, T2, T4](const std::vector<int>& theta) -> double {
    std::vector<int> tuple;
    for (int a = 0; a < d; ++a)
      for (int e = 0; e < theta[a]; ++e) tuple.push_back(a);
    if (tuple.empty()) return 1.0;
    if (tuple.size() == 1 || tuple.size() == 3) return 0.0;
    if (tuple.size() == 2) return T2(tuple[0], tuple[1]);
    if (tuple.size() == 4)
      return T4(tuple[0] * d + tuple[1], tuple[2] * d + tuple[3]);
    throw std::invalid_argument("oracle: unsupported order");
  };
}

DistributionSpec make_spec(DistributionSpec::Kind kind, int d) {
  DistributionSpec s;
  s.kind = kind;
  s.mean = Eigen::VectorXd::Zero(d);
  if (kind == DistributionSpec::Kind::kRotatedProduct) {
    if (d == 2) {
      s.rotation = rotation2d(0.61);
    } else {
      Eigen::MatrixXd A(d, d);
      std::mt19937_64 rng(5);
      std::normal_distribution<double> N(0.0, 1.0);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = N(rng);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
      s.rotation = Eigen::MatrixXd(qr.householderQ());
    }
  }
  return s;
}

}  // namespace

TEST_CASE("sample_mixture statistics and labeling") {
  SUBCASE("empirical mean concentrates at CLT scale") {
    Eigen::VectorXd mu(3);
    mu << 1.0, -2.0, 0.5;
    auto data = sample_mixture(single_gaussian(mu), 10000, 77);
    Eigen::VectorXd emp = data.samples.colwise().mean().transpose();
    CHECK((emp - mu).norm() <= 4.0 * std::sqrt(3.0) / std::sqrt(10000.0));
  }
  SUBCASE("zero-weight components never fire") {
    MixtureSpec spec = single_gaussian(Eigen::VectorXd::Zero(2));
    DistributionSpec c2;
    c2.kind = DistributionSpec::Kind::kGaussian;
    c2.mean = Eigen::VectorXd::Ones(2) * 5.0;
    spec.components.push_back(c2);
    spec.weights = Eigen::VectorXd(2);
    spec.weights << 1.0, 0.0;
    auto data = sample_mixture(spec, 200, 3);
    for (int l : data.labels) CHECK(l == 0);
  }
  SUBCASE("fixed seed reproduces the dataset bit for bit") {
    auto a = sample_mixture(single_gaussian(Eigen::VectorXd::Zero(2)), 50, 9);
    auto b = sample_mixture(single_gaussian(Eigen::VectorXd::Zero(2)), 50, 9);
    CHECK(a.samples == b.samples);
    CHECK(a.labels == b.labels);
  }
}

TEST_CASE("spec validation") {
  MixtureSpec bad = single_gaussian(Eigen::VectorXd::Zero(2));
  bad.weights(0) = 0.5;
  CHECK_THROWS(bad.validate());

  DistributionSpec rp;
  rp.kind = DistributionSpec::Kind::kRotatedProduct;
  rp.mean = Eigen::VectorXd::Zero(2);
  CHECK_THROWS(rp.validate());
  rp.rotation = Eigen::MatrixXd::Ones(2, 2);
  CHECK_THROWS(rp.validate());
  rp.rotation = rotation2d(0.3);
  CHECK_NOTHROW(rp.validate());
}

TEST_CASE("corruption replaces exactly the prescribed number of rows") {
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(2);
  auto clean = sample_mixture(single_gaussian(mu), 60, 21);

  SUBCASE("eps = 0 only shuffles") {
    auto out = corrupt(clean, 0.0, Adversary::far_outliers(50.0), 4);
    CHECK(sorted_rows(out.samples) == sorted_rows(clean.samples));
    for (int l : out.labels) CHECK(l >= 0);
  }
  SUBCASE("mean shift places floor(eps n) rows at the shifted mean") {
    Eigen::VectorXd v(2);
    v << 10.0, 0.0;
    auto out = corrupt(clean, 0.1, Adversary::mean_shift(v), 4);
    int shifted = 0, corrupted_labels = 0;
    for (int i = 0; i < out.n(); ++i) {
      if ((out.samples.row(i).transpose() - (mu + v)).norm() < 1e-12) ++shifted;
      if (out.labels[i] == -1) ++corrupted_labels;
    }
    CHECK(shifted == 6);
    CHECK(corrupted_labels == 6);
  }
  SUBCASE("clean rows survive with their exact values") {
    auto out = corrupt(clean, 0.25, Adversary::far_outliers(100.0), 11);
    std::vector<Eigen::VectorXd> survivors;
    for (int i = 0; i < out.n(); ++i)
      if (out.labels[i] >= 0) survivors.push_back(out.samples.row(i).transpose());
    CHECK(survivors.size() == 45);
    auto original = sorted_rows(clean.samples);
    std::sort(survivors.begin(), survivors.end(),
              [](const auto& a, const auto& b) {
                for (int k = 0; k < a.size(); ++k)
                  if (a(k) != b(k)) return a(k) < b(k);
                return false;
              });
    for (auto& row : survivors)
      CHECK(std::binary_search(
          original.begin(), original.end(), row,
          [](const auto& a, const auto& b) {
            for (int k = 0; k < a.size(); ++k)
              if (a(k) != b(k)) return a(k) < b(k);
            return false;
          }));
    // clean copies hold the pre-corruption data
    CHECK(sorted_rows(out.clean_copies) == sorted_rows(clean.samples));
  }
}

TEST_CASE("population moment tensors in closed form") {
  SUBCASE("standard Gaussian") {
    DistributionSpec g = make_spec(DistributionSpec::Kind::kGaussian, 1);
    auto T = population_moment_tensor(g, 4);
    REQUIRE(T.rows() == 1);
    CHECK(T(0, 0) == doctest::Approx(3.0));
  }
  SUBCASE("Rademacher product coordinates have variance 1/2") {
    DistributionSpec r =
        make_spec(DistributionSpec::Kind::kProductRademacher, 2);
    auto T = population_moment_tensor(r, 4);
    REQUIRE(T.rows() == 4);
    CHECK(T(0, 0) == doctest::Approx(0.25));  // E y1^4
    CHECK(T(0, 3) == doctest::Approx(0.25));  // E y1^2 y2^2
    CHECK(T(1, 1) == doctest::Approx(0.25));
    CHECK(T(0, 1) == doctest::Approx(0.0));   // odd moment
    auto C = population_moment_tensor(r, 2);
    CHECK(C(0, 0) == doctest::Approx(0.5));
    CHECK(C(0, 1) == doctest::Approx(0.0));
  }
  SUBCASE("all kinds match Monte Carlo within 3 standard errors") {
    for (auto kind : {DistributionSpec::Kind::kGaussian,
                      DistributionSpec::Kind::kProductRademacher,
                      DistributionSpec::Kind::kProductUniform,
                      DistributionSpec::Kind::kRotatedProduct}) {
      DistributionSpec spec = make_spec(kind, 2);
      MixtureSpec mix;
      mix.components.push_back(spec);
      mix.weights = Eigen::VectorXd::Ones(1);
      auto data = sample_mixture(mix, 1000000, 13);
      Eigen::MatrixXd exact = population_moment_tensor(spec, 4);
      Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(4, 4);
      Eigen::MatrixXd sumsq = Eigen::MatrixXd::Zero(4, 4);
      for (int s = 0; s < data.n(); ++s) {
        Eigen::Vector2d x = data.samples.row(s).transpose();
        Eigen::Vector4d v(x(0) * x(0), x(0) * x(1), x(1) * x(0), x(1) * x(1));
        Eigen::Matrix4d outer = v * v.transpose();
        sum += outer;
        sumsq += outer.cwiseProduct(outer);
      }
      Eigen::MatrixXd mean = sum / data.n();
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double var = sumsq(i, j) / data.n() - mean(i, j) * mean(i, j);
          double se = std::sqrt(std::max(var, 0.0) / data.n());
          CHECK(std::abs(mean(i, j) - exact(i, j)) <= 3.0 * se + 1e-10);
        }
    }
  }
}

TEST_CASE("every component kind is explicitly bounded at order 4") {
  for (auto kind : {DistributionSpec::Kind::kGaussian,
                    DistributionSpec::Kind::kProductRademacher,
                    DistributionSpec::Kind::kProductUniform,
                    DistributionSpec::Kind::kRotatedProduct}) {
    for (int d : {2, 3}) {
      DistributionSpec spec = make_spec(kind, d);
      auto report = certify_explicit_boundedness(oracle_for(spec), d, 4, 1.0);
      CHECK(report.all_sos);
    }
  }
}

TEST_CASE("spec JSON round trips") {
  DistributionSpec spec = make_spec(DistributionSpec::Kind::kRotatedProduct, 2);
  spec.mean << 1.5, -0.25;
  DistributionSpec back =
      distribution_spec_from_json(distribution_spec_to_json(spec));
  CHECK(back.kind == spec.kind);
  CHECK(back.mean == spec.mean);
  CHECK(back.rotation->isApprox(*spec.rotation, 1e-15));

  MixtureSpec mix;
  mix.components.push_back(make_spec(DistributionSpec::Kind::kGaussian, 2));
  mix.components.push_back(make_spec(DistributionSpec::Kind::kProductUniform, 2));
  mix.components[1].mean << 8.0, 0.0;
  mix.weights = Eigen::VectorXd(2);
  mix.weights << 0.4, 0.6;
  MixtureSpec mback = mixture_spec_from_json(mixture_spec_to_json(mix));
  CHECK(mback.components.size() == 2);
  CHECK(mback.weights == mix.weights);
  CHECK(mback.separation() == doctest::Approx(8.0));
}

TEST_CASE("dataset files round trip") {
  auto data = sample_mixture(single_gaussian(Eigen::VectorXd::Zero(2)), 30, 5);
  auto bad = corrupt(data, 0.2, Adversary::far_outliers(40.0), 6);
  std::string csv = "/tmp/sosmix_test_data.csv";
  std::string side = "/tmp/sosmix_test_data.json";
  write_dataset(bad, csv, side);
  auto back = read_dataset(csv, side);
  CHECK(back.samples.isApprox(bad.samples, 1e-15));
  CHECK(back.labels == bad.labels);
  CHECK(back.clean_copies.isApprox(bad.clean_copies, 1e-15));
  CHECK(back.true_means.isApprox(bad.true_means, 1e-15));
  CHECK(back.eps == bad.eps);
  CHECK(back.seed == bad.seed);
  std::remove(csv.c_str());
  std::remove(side.c_str());
}

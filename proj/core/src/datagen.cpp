#include "sos/datagen.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sos/program.hpp"  // gaussian_moment_rhs

namespace sos {
namespace {

using nlohmann::json;

// half-width of the uniform coordinate distribution with variance 1/2
const double kUniformHalfWidth = std::sqrt(1.5);

// central moment of one (unscaled) product coordinate
double coordinate_moment(DistributionSpec::Kind kind, int order) {
  if (order % 2 != 0) return 0.0;
  switch (kind) {
    case DistributionSpec::Kind::kProductRademacher:
      // +-1/sqrt(2), so |y|^k = 2^{-k/2}
      return std::pow(0.5, order / 2.0);
    case DistributionSpec::Kind::kProductUniform:
    case DistributionSpec::Kind::kRotatedProduct:
      // uniform on [-a, a]: E y^k = a^k / (k+1)
      return std::pow(kUniformHalfWidth, order) / (order + 1);
    default:
      throw std::logic_error("coordinate_moment: not a product kind");
  }
}

std::string kind_name(DistributionSpec::Kind k) {
  switch (k) {
    case DistributionSpec::Kind::kGaussian:
      return "gaussian";
    case DistributionSpec::Kind::kProductRademacher:
      return "product_rademacher";
    case DistributionSpec::Kind::kProductUniform:
      return "product_uniform";
    case DistributionSpec::Kind::kRotatedProduct:
      return "rotated_product";
  }
  return "unknown";
}

DistributionSpec::Kind kind_from_name(const std::string& s) {
  if (s == "gaussian") return DistributionSpec::Kind::kGaussian;
  if (s == "product_rademacher")
    return DistributionSpec::Kind::kProductRademacher;
  if (s == "product_uniform") return DistributionSpec::Kind::kProductUniform;
  if (s == "rotated_product") return DistributionSpec::Kind::kRotatedProduct;
  throw std::invalid_argument("unknown distribution kind: " + s);
}

json matrix_to_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  int rows = static_cast<int>(j.size());
  int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
  Eigen::MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < cols; ++c) M(i, c) = j[i][c].get<double>();
  return M;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

json spec_to_json_obj(const DistributionSpec& s) {
  json j;
  j["kind"] = kind_name(s.kind);
  j["mean"] = vector_to_json(s.mean);
  j["variance_proxy"] = s.variance_proxy;
  if (s.rotation) j["rotation"] = matrix_to_json(*s.rotation);
  return j;
}

DistributionSpec spec_from_json_obj(const json& j) {
  DistributionSpec s;
  s.kind = kind_from_name(j.at("kind").get<std::string>());
  s.mean = vector_from_json(j.at("mean"));
  if (j.contains("variance_proxy"))
    s.variance_proxy = j.at("variance_proxy").get<double>();
  if (j.contains("rotation")) s.rotation = matrix_from_json(j.at("rotation"));
  s.validate();
  return s;
}

// one centered draw from the component (mean added by the caller)
Eigen::VectorXd draw_centered(const DistributionSpec& s, std::mt19937_64& rng) {
  const int d = s.dim();
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Eigen::VectorXd x(d);
  switch (s.kind) {
    case DistributionSpec::Kind::kGaussian:
      for (int a = 0; a < d; ++a) x(a) = N(rng);
      break;
    case DistributionSpec::Kind::kProductRademacher:
      for (int a = 0; a < d; ++a)
        x(a) = (U(rng) < 0.5 ? -1.0 : 1.0) / std::sqrt(2.0);
      break;
    case DistributionSpec::Kind::kProductUniform:
      for (int a = 0; a < d; ++a)
        x(a) = (2.0 * U(rng) - 1.0) * kUniformHalfWidth;
      break;
    case DistributionSpec::Kind::kRotatedProduct: {
      for (int a = 0; a < d; ++a)
        x(a) = (2.0 * U(rng) - 1.0) * kUniformHalfWidth;
      x = *s.rotation * x;
      break;
    }
  }
  return std::sqrt(s.variance_proxy) * x;
}

}  // namespace

void DistributionSpec::validate() const {
  if (mean.size() == 0)
    throw std::invalid_argument("distribution: empty mean vector");
  if (variance_proxy <= 0.0)
    throw std::invalid_argument("distribution: variance proxy must be > 0");
  if (kind == Kind::kRotatedProduct && !rotation)
    throw std::invalid_argument("rotated_product: rotation matrix required");
  if (rotation) {
    if (rotation->rows() != dim() || rotation->cols() != dim())
      throw std::invalid_argument("rotation: wrong shape");
    Eigen::MatrixXd err =
        *rotation * rotation->transpose() -
        Eigen::MatrixXd::Identity(dim(), dim());
    if (err.cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("rotation: not orthogonal");
  }
}

int MixtureSpec::dim() const {
  return components.empty() ? 0 : components[0].dim();
}

double MixtureSpec::separation() const {
  double sep = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < components.size(); ++i)
    for (size_t j = i + 1; j < components.size(); ++j)
      sep = std::min(sep,
                     (components[i].mean - components[j].mean).norm());
  return sep;
}

void MixtureSpec::validate() const {
  if (components.empty())
    throw std::invalid_argument("mixture: no components");
  if (weights.size() != static_cast<int>(components.size()))
    throw std::invalid_argument("mixture: weight/component count mismatch");
  double sum = 0.0;
  for (int i = 0; i < weights.size(); ++i) {
    if (weights(i) < 0.0)
      throw std::invalid_argument("mixture: negative weight");
    sum += weights(i);
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("mixture: weights must sum to 1");
  for (auto& c : components) {
    c.validate();
    if (c.dim() != dim())
      throw std::invalid_argument("mixture: inconsistent dimensions");
  }
}

Eigen::VectorXd DatasetWithTruth::mixture_mean() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d());
  for (int k = 0; k < true_means.rows(); ++k)
    out += true_weights(k) * true_means.row(k).transpose();
  return out;
}

DatasetWithTruth sample_mixture(const MixtureSpec& spec, int n,
                                std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("sample_mixture: n must be >= 1");
  const int d = spec.dim();
  const int k = static_cast<int>(spec.components.size());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  DatasetWithTruth out;
  out.samples.resize(n, d);
  out.labels.resize(n);
  out.seed = seed;
  out.true_means.resize(k, d);
  for (int c = 0; c < k; ++c)
    out.true_means.row(c) = spec.components[c].mean.transpose();
  out.true_weights = spec.weights;

  for (int i = 0; i < n; ++i) {
    double u = U(rng), acc = 0.0;
    int c = k - 1;
    for (int q = 0; q < k; ++q) {
      acc += spec.weights(q);
      if (u < acc) {
        c = q;
        break;
      }
    }
    out.labels[i] = c;
    out.samples.row(i) =
        (spec.components[c].mean + draw_centered(spec.components[c], rng))
            .transpose();
  }
  out.clean_copies = out.samples;

  json prov;
  prov["op"] = "sample_mixture";
  prov["n"] = n;
  prov["seed"] = seed;
  prov["mixture"] = json::parse(mixture_spec_to_json(spec));
  out.provenance = prov.dump();
  return out;
}

Adversary Adversary::mean_shift(Eigen::VectorXd v) {
  Adversary a;
  a.kind = Kind::kMeanShift;
  a.shift = std::move(v);
  return a;
}

Adversary Adversary::far_outliers(double R) {
  Adversary a;
  a.kind = Kind::kFarOutliers;
  a.radius = R;
  return a;
}

Adversary Adversary::moment_stealth(int t) {
  Adversary a;
  a.kind = Kind::kMomentStealth;
  a.t = t;
  return a;
}

DatasetWithTruth corrupt(const DatasetWithTruth& dataset, double eps,
                         const Adversary& adversary, std::uint64_t seed) {
  if (eps < 0.0 || eps >= 1.0)
    throw std::invalid_argument("corrupt: eps must be in [0, 1)");
  const int n = dataset.n();
  const int d = dataset.d();
  const int m = static_cast<int>(std::floor(eps * n));

  DatasetWithTruth out = dataset;
  out.eps = eps;
  out.seed = seed;
  out.clean_copies = dataset.samples;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);

  // m distinct victim rows via a partial shuffle
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (int i = 0; i < m; ++i) {
    int j = i + static_cast<int>(rng() % static_cast<std::uint64_t>(n - i));
    std::swap(order[i], order[j]);
  }

  Eigen::VectorXd center = dataset.mixture_mean();
  Eigen::VectorXd stealth_dir(d);
  double stealth_dist = 0.0;
  if (adversary.kind == Adversary::Kind::kMomentStealth && m > 0) {
    for (int a = 0; a < d; ++a) stealth_dir(a) = N(rng);
    stealth_dir.normalize();
    // heuristic placement near the t-th moment constraint boundary: eps
    // points at distance D contribute eps D^t <= 2 t^{t/2} per direction
    double t = adversary.t;
    stealth_dist = std::sqrt(t) * std::pow(1.0 - eps, -1.0 / t) *
                   std::pow(2.0 / eps, 1.0 / t);
  }

  for (int v = 0; v < m; ++v) {
    int row = order[v];
    Eigen::VectorXd val(d);
    switch (adversary.kind) {
      case Adversary::Kind::kMeanShift:
        val = center + adversary.shift;
        break;
      case Adversary::Kind::kFarOutliers: {
        Eigen::VectorXd g(d);
        for (int a = 0; a < d; ++a) g(a) = N(rng);
        val = center + adversary.radius * g.normalized();
        break;
      }
      case Adversary::Kind::kMomentStealth:
        val = center + stealth_dist * stealth_dir;
        break;
    }
    out.samples.row(row) = val.transpose();
    out.labels[row] = -1;
  }

  // present rows in an arbitrary order
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[i], perm[j]);
  }
  DatasetWithTruth shuffled = out;
  for (int i = 0; i < n; ++i) {
    shuffled.samples.row(i) = out.samples.row(perm[i]);
    shuffled.clean_copies.row(i) = out.clean_copies.row(perm[i]);
    shuffled.labels[i] = out.labels[perm[i]];
  }

  json prov;
  prov["op"] = "corrupt";
  prov["eps"] = eps;
  prov["seed"] = seed;
  switch (adversary.kind) {
    case Adversary::Kind::kMeanShift:
      prov["adversary"] = "mean_shift";
      prov["shift"] = vector_to_json(adversary.shift);
      break;
    case Adversary::Kind::kFarOutliers:
      prov["adversary"] = "far_outliers";
      prov["radius"] = adversary.radius;
      break;
    case Adversary::Kind::kMomentStealth:
      prov["adversary"] = "moment_stealth";
      prov["t"] = adversary.t;
      break;
  }
  prov["base"] = json::parse(dataset.provenance, nullptr, false);
  shuffled.provenance = prov.dump();
  return shuffled;
}

Eigen::MatrixXd population_moment_tensor(const DistributionSpec& spec, int t) {
  spec.validate();
  if (t % 2 != 0 || t < 2 || t > 8)
    throw std::invalid_argument("population_moment_tensor: t must be even, <= 8");
  const int d = spec.dim();
  const double sigma = spec.variance_proxy;

  if (spec.kind == DistributionSpec::Kind::kGaussian)
    return std::pow(sigma, t / 2.0) * gaussian_moment_rhs(d, t);

  // full centered t-th moment tensor of the product base, as a flat array
  // indexed by ordered t-tuples
  int full = 1;
  for (int i = 0; i < t; ++i) full *= d;
  std::vector<double> T(full);
  std::vector<int> tup(t);
  for (int flat = 0; flat < full; ++flat) {
    int rem = flat;
    for (int p = t - 1; p >= 0; --p) {
      tup[p] = rem % d;
      rem /= d;
    }
    std::vector<int> counts(d, 0);
    for (int v : tup) ++counts[v];
    double val = 1.0;
    for (int a = 0; a < d; ++a)
      if (counts[a] > 0) val *= coordinate_moment(spec.kind, counts[a]);
    T[flat] = val;
  }

  if (spec.kind == DistributionSpec::Kind::kRotatedProduct) {
    const Eigen::MatrixXd& R = *spec.rotation;
    // contract the rotation into each tensor mode in turn
    std::vector<double> cur = T, next(full);
    int stride = full / d;  // stride of mode 0 in the flat layout
    for (int mode = 0; mode < t; ++mode) {
      std::fill(next.begin(), next.end(), 0.0);
      for (int flat = 0; flat < full; ++flat) {
        int idx = (flat / stride) % d;
        int base = flat - idx * stride;
        double acc = 0.0;
        for (int src = 0; src < d; ++src)
          acc += R(idx, src) * cur[base + src * stride];
        next[flat] = acc;
      }
      std::swap(cur, next);
      stride /= d;
    }
    T = cur;
  }

  int half = 1;
  for (int i = 0; i < t / 2; ++i) half *= d;
  Eigen::MatrixXd out(half, half);
  for (int a = 0; a < half; ++a)
    for (int b = 0; b < half; ++b)
      out(a, b) = std::pow(sigma, t / 2.0) * T[a * half + b];
  return out;
}

std::string distribution_spec_to_json(const DistributionSpec& spec) {
  return spec_to_json_obj(spec).dump();
}

DistributionSpec distribution_spec_from_json(const std::string& text) {
  return spec_from_json_obj(json::parse(text));
}

std::string mixture_spec_to_json(const MixtureSpec& spec) {
  json j;
  j["components"] = json::array();
  for (auto& c : spec.components) j["components"].push_back(spec_to_json_obj(c));
  j["weights"] = vector_to_json(spec.weights);
  j["separation"] = spec.separation();
  return j.dump();
}

MixtureSpec mixture_spec_from_json(const std::string& text) {
  json j = json::parse(text);
  MixtureSpec spec;
  for (auto& c : j.at("components"))
    spec.components.push_back(spec_from_json_obj(c));
  spec.weights = vector_from_json(j.at("weights"));
  spec.validate();
  return spec;
}

void write_dataset(const DatasetWithTruth& dataset, const std::string& csv_path,
                   const std::string& sidecar_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write " + csv_path);
  csv.precision(17);
  for (int i = 0; i < dataset.n(); ++i) {
    for (int j = 0; j < dataset.d(); ++j) {
      if (j) csv << ',';
      csv << dataset.samples(i, j);
    }
    csv << '\n';
  }

  json j;
  j["labels"] = dataset.labels;
  j["clean_copies"] = matrix_to_json(dataset.clean_copies);
  j["true_means"] = matrix_to_json(dataset.true_means);
  j["true_weights"] = vector_to_json(dataset.true_weights);
  j["provenance"] = json::parse(dataset.provenance, nullptr, false);
  j["seed"] = dataset.seed;
  j["eps"] = dataset.eps;
  std::ofstream side(sidecar_path);
  if (!side) throw std::runtime_error("cannot write " + sidecar_path);
  side << j.dump(2) << '\n';
}

DatasetWithTruth read_dataset(const std::string& csv_path,
                              const std::string& sidecar_path) {
  std::ifstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot read " + csv_path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }

  DatasetWithTruth out;
  out.samples.resize(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) out.samples(i, j) = rows[i][j];

  std::ifstream side(sidecar_path);
  if (!side) throw std::runtime_error("cannot read " + sidecar_path);
  json j = json::parse(side);
  out.labels = j.at("labels").get<std::vector<int>>();
  out.clean_copies = matrix_from_json(j.at("clean_copies"));
  out.true_means = matrix_from_json(j.at("true_means"));
  out.true_weights = vector_from_json(j.at("true_weights"));
  out.provenance = j.at("provenance").dump();
  out.seed = j.at("seed").get<std::uint64_t>();
  out.eps = j.at("eps").get<double>();
  return out;
}

}  // namespace sos

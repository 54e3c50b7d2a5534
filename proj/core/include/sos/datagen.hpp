#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sos {

// One mixture component. Product kinds draw i.i.d. coordinates with variance
// 1/2 (scaled by the variance proxy), so every kind is explicitly bounded
// with overall proxy sigma.
struct DistributionSpec {
  enum class Kind {
    kGaussian,
    kProductRademacher,
    kProductUniform,
    kRotatedProduct
  };

  Kind kind = Kind::kGaussian;
  Eigen::VectorXd mean;
  std::optional<Eigen::MatrixXd> rotation;  // orthogonal, rotated_product only
  double variance_proxy = 1.0;

  int dim() const { return static_cast<int>(mean.size()); }
  void validate() const;  // throws on non-orthogonal rotation etc.
};

struct MixtureSpec {
  std::vector<DistributionSpec> components;
  Eigen::VectorXd weights;

  int dim() const;
  double separation() const;  // min pairwise mean distance; inf for k = 1
  void validate() const;
};

struct DatasetWithTruth {
  Eigen::MatrixXd samples;    // n x d
  std::vector<int> labels;    // component id per row, -1 for corrupted
  Eigen::MatrixXd clean_copies;  // pre-corruption values, row-aligned
  Eigen::MatrixXd true_means;    // k x d, from the generating spec
  Eigen::VectorXd true_weights;
  std::string provenance;  // JSON description of how the data was made
  std::uint64_t seed = 0;
  double eps = 0.0;

  int n() const { return static_cast<int>(samples.rows()); }
  int d() const { return static_cast<int>(samples.cols()); }
  Eigen::VectorXd mixture_mean() const;  // weighted average of true means
};

DatasetWithTruth sample_mixture(const MixtureSpec& spec, int n,
                                std::uint64_t seed);

struct Adversary {
  enum class Kind { kMeanShift, kFarOutliers, kMomentStealth };

  Kind kind = Kind::kMeanShift;
  Eigen::VectorXd shift;  // mean_shift displacement v
  double radius = 0.0;    // far_outliers sphere radius R
  int t = 4;              // moment_stealth target moment order

  static Adversary mean_shift(Eigen::VectorXd v);
  static Adversary far_outliers(double R);
  static Adversary moment_stealth(int t);
};

// replaces exactly floor(eps * n) rows per the adversary, then shuffles;
// clean copies and labels stay row-aligned
DatasetWithTruth corrupt(const DatasetWithTruth& dataset, double eps,
                         const Adversary& adversary, std::uint64_t seed);

// exact centered moment matrix E[(Y-mu)^{t/2 tensor}][(Y-mu)^{t/2 tensor}]^T
// over the d^{t/2} ordered tensor basis
Eigen::MatrixXd population_moment_tensor(const DistributionSpec& spec, int t);

// JSON (de)serialization of specs, for configs and dataset sidecars
std::string distribution_spec_to_json(const DistributionSpec& spec);
DistributionSpec distribution_spec_from_json(const std::string& text);
std::string mixture_spec_to_json(const MixtureSpec& spec);
MixtureSpec mixture_spec_from_json(const std::string& text);

// CSV of samples plus a JSON sidecar with labels, clean copies and provenance
void write_dataset(const DatasetWithTruth& dataset, const std::string& csv_path,
                   const std::string& sidecar_path);
DatasetWithTruth read_dataset(const std::string& csv_path,
                              const std::string& sidecar_path);

}  // namespace sos

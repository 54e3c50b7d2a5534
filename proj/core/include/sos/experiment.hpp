#pragma once

#include <string>
#include <vector>

#include "sos/datagen.hpp"
#include "sos/mixtures.hpp"
#include "sos/robust.hpp"

namespace sos {

// One experiment file: a task, a data generator, algorithm parameters and the
// axes to sweep. Parsed from versioned JSON; every field has an explicit
// default and the fully resolved form is embedded in the result file, so a
// run is reproducible from its results alone.
struct ExperimentConfig {
  enum class Task { kMixture, kRobust, kCertify, kSdpSelftest };

  int version = 1;
  Task task = Task::kRobust;

  // generator: mixture tasks use `mixture` as the component layout; robust
  // and certify tasks use its first component. The separation sweep rescales
  // the mixture means around their centroid to hit each target separation.
  MixtureSpec mixture;
  Adversary adversary;            // robust only
  std::vector<double> eps;        // robust sweep axis (may be {0})
  std::vector<double> separation; // mixture sweep axis (empty = as configured)
  std::vector<int> n;             // sample-size axis

  // algorithm parameters
  int t = 4;
  double tau = 1e-3;
  int k = 0;  // mixture components to recover; 0 = size of the layout
  double rounding_moment_param = 0.0;  // 0 = default 16k
  double eta = 0.0;   // > 0 switches the mixture task to the nonuniform sweep
  double xi = 0.02;

  // selftest task
  int selftest_feasible = 50;
  int selftest_infeasible = 10;

  std::vector<std::uint64_t> seeds;
  std::string output;  // result path; overridable on the command line

  void validate() const;  // throws std::invalid_argument naming the field
};

ExperimentConfig experiment_config_from_json(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& config);

// One (cell, seed) outcome. `metrics_json` holds only deterministic metrics
// (error after permutation matching, misassignment count, SDP iterations,
// status); wall time lives outside it so reruns match byte for byte.
struct ResultRow {
  std::string task;
  std::uint64_t seed = 0;
  std::string cell_json;     // parameter snapshot for this cell
  std::string metrics_json;
  double wall_time_s = 0.0;
  bool ok = false;
};

struct RunOutcome {
  std::vector<ResultRow> rows;  // cell-major, seed-minor: deterministic order
  int cells_failed = 0;
  int cells_total = 0;
  bool all_failed() const { return cells_total > 0 && cells_failed == cells_total; }
};

// executes every cell x seed on at most `workers` threads; failures are
// recorded as rows with ok=false, never thrown
RunOutcome run_experiment(const ExperimentConfig& config, int workers);

// result file: line 1 is {"resolved_config": ...}, then one JSON object per
// row, append-only
void write_results(const RunOutcome& outcome, const ExperimentConfig& config,
                   const std::string& path);

struct SummaryRow {
  std::string cell_json;
  int rows = 0;
  int failures = 0;
  double median_error = 0.0;
  double q25_error = 0.0;
  double q75_error = 0.0;
  double median_wall_time_s = 0.0;
  bool monotonicity_violated = false;  // median error rose vs previous cell
};

struct ReportOutcome {
  std::vector<SummaryRow> cells;
  int malformed_rows = 0;
};

// per-cell medians/quartiles in the order cells appear in the file; adjacent
// cells along the declared sweep axis are flagged when the median error fails
// to decrease
ReportOutcome report_results(const std::string& results_path);
std::string summary_to_csv(const ReportOutcome& report);

}  // namespace sos

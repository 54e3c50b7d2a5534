#include "sos/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "sos/selftest.hpp"
#include "sos/sos.hpp"

namespace sos {

using nlohmann::json;

namespace {

std::string task_name(ExperimentConfig::Task task) {
  switch (task) {
    case ExperimentConfig::Task::kMixture: return "mixture";
    case ExperimentConfig::Task::kRobust: return "robust";
    case ExperimentConfig::Task::kCertify: return "certify";
    case ExperimentConfig::Task::kSdpSelftest: return "sdp_selftest";
  }
  throw std::logic_error("unknown task");
}

ExperimentConfig::Task task_from_name(const std::string& name) {
  if (name == "mixture") return ExperimentConfig::Task::kMixture;
  if (name == "robust") return ExperimentConfig::Task::kRobust;
  if (name == "certify") return ExperimentConfig::Task::kCertify;
  if (name == "sdp_selftest") return ExperimentConfig::Task::kSdpSelftest;
  throw std::invalid_argument("config field 'task': unknown value " + name);
}

json adversary_to_json(const Adversary& adv) {
  json j;
  switch (adv.kind) {
    case Adversary::Kind::kMeanShift: {
      j["kind"] = "mean_shift";
      std::vector<double> v(adv.shift.data(), adv.shift.data() + adv.shift.size());
      j["shift"] = v;
      break;
    }
    case Adversary::Kind::kFarOutliers:
      j["kind"] = "far_outliers";
      j["radius"] = adv.radius;
      break;
    case Adversary::Kind::kMomentStealth:
      j["kind"] = "moment_stealth";
      j["t"] = adv.t;
      break;
  }
  return j;
}

Adversary adversary_from_json(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "mean_shift") {
    auto v = j.at("shift").get<std::vector<double>>();
    Eigen::VectorXd shift(static_cast<int>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) shift(static_cast<int>(i)) = v[i];
    return Adversary::mean_shift(shift);
  }
  if (kind == "far_outliers")
    return Adversary::far_outliers(j.at("radius").get<double>());
  if (kind == "moment_stealth")
    return Adversary::moment_stealth(j.value("t", 4));
  throw std::invalid_argument("config field 'adversary.kind': unknown value " +
                              kind);
}

// one sweep cell: the parameter combination shared by every seed in it
struct Cell {
  int n = 0;
  double eps = 0.0;
  double separation = 0.0;  // <= 0 means "as configured"
  json snapshot;            // serialized form for rows/reports
};

std::vector<Cell> enumerate_cells(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  std::string task = task_name(config.task);
  if (config.task == ExperimentConfig::Task::kCertify ||
      config.task == ExperimentConfig::Task::kSdpSelftest) {
    Cell c;
    c.snapshot = json{{"task", task}};
    cells.push_back(std::move(c));
    return cells;
  }
  std::vector<double> eps =
      config.task == ExperimentConfig::Task::kRobust && !config.eps.empty()
          ? config.eps
          : std::vector<double>{0.0};
  std::vector<double> sep =
      config.task == ExperimentConfig::Task::kMixture &&
              !config.separation.empty()
          ? config.separation
          : std::vector<double>{0.0};
  for (int n : config.n)
    for (double s : sep)
      for (double e : eps) {
        Cell c;
        c.n = n;
        c.eps = e;
        c.separation = s;
        c.snapshot = json{{"task", task}, {"n", n}, {"t", config.t}};
        if (config.task == ExperimentConfig::Task::kRobust)
          c.snapshot["eps"] = e;
        if (config.task == ExperimentConfig::Task::kMixture && s > 0.0)
          c.snapshot["separation"] = s;
        cells.push_back(std::move(c));
      }
  return cells;
}

// rescale the configured layout around its centroid to the target separation
MixtureSpec scaled_mixture(const MixtureSpec& base, double target) {
  if (target <= 0.0) return base;
  double current = base.separation();
  if (!std::isfinite(current) || current <= 0.0)
    throw std::invalid_argument(
        "config field 'separation': layout has no positive separation to "
        "rescale");
  int d = base.dim();
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
  for (const auto& comp : base.components) centroid += comp.mean;
  centroid /= static_cast<double>(base.components.size());
  MixtureSpec out = base;
  for (auto& comp : out.components)
    comp.mean = centroid + (target / current) * (comp.mean - centroid);
  return out;
}

double best_permutation_error(const Eigen::MatrixXd& est,
                              const Eigen::MatrixXd& truth) {
  std::vector<int> perm(static_cast<size_t>(truth.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (int c = 0; c < truth.rows(); ++c)
      worst = std::max(worst, (est.row(perm[static_cast<size_t>(c)]) -
                               truth.row(c))
                                  .norm());
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

int best_permutation_mismatches(const std::vector<int>& est,
                                const std::vector<int>& truth, int k) {
  std::vector<int> perm(static_cast<size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  int best = static_cast<int>(est.size());
  do {
    int bad = 0;
    for (size_t i = 0; i < est.size(); ++i) {
      int e = est[i] >= 0 && est[i] < k ? perm[static_cast<size_t>(est[i])]
                                        : -1;
      if (e != truth[i]) ++bad;
    }
    best = std::min(best, bad);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// population moments of a centered symmetric component, for the certifier
MomentOracle oracle_for(const DistributionSpec& spec, int t) {
  int d = spec.dim();
  std::vector<Eigen::MatrixXd> tensors;  // tensors[s/2 - 1]
  for (int s = 2; s <= t; s += 2)
    tensors.push_back(population_moment_tensor(spec, s));
  return [d, tensors](const std::vector<int>& theta) -> double {
    std::vector<int> tuple;
    for (size_t a = 0; a < theta.size(); ++a)
      for (int e = 0; e < theta[a]; ++e) tuple.push_back(static_cast<int>(a));
    if (tuple.empty()) return 1.0;
    if (tuple.size() % 2 == 1) return 0.0;  // symmetric about the mean
    size_t half = tuple.size() / 2;
    if (half > tensors.size())
      throw std::invalid_argument("moment order above configured t");
    long row = 0, col = 0;
    for (size_t q = 0; q < half; ++q) row = row * d + tuple[q];
    for (size_t q = half; q < tuple.size(); ++q) col = col * d + tuple[q];
    return tensors[half - 1](row, col);
  };
}

json run_mixture_cell(const ExperimentConfig& config, const Cell& cell,
                      std::uint64_t seed) {
  MixtureSpec spec = scaled_mixture(config.mixture, cell.separation);
  DatasetWithTruth data = sample_mixture(spec, cell.n, seed);
  int k = config.k > 0 ? config.k
                       : static_cast<int>(spec.components.size());
  MixtureSettings ms;
  ms.t = config.t;
  ms.tau = config.tau;
  ms.rounding_moment_param = config.rounding_moment_param;
  json m;
  if (config.eta > 0.0) {
    MixtureEstimate est =
        learn_nonuniform(data.samples, config.eta, config.xi, seed, ms);
    m["k_recovered"] = est.assignment.k;
    m["error"] = est.assignment.k == static_cast<int>(spec.components.size())
                     ? best_permutation_error(est.means, data.true_means)
                     : std::numeric_limits<double>::infinity();
    m["degenerate"] = est.diagnostics.degenerate;
  } else {
    MixtureEstimate est = learn_mixture_means(data.samples, k, seed, ms);
    m["error"] = best_permutation_error(est.means, data.true_means);
    m["misassigned"] =
        best_permutation_mismatches(est.assignment.labels, data.labels, k);
    m["degenerate"] = est.diagnostics.degenerate;
    m["rounding_complete"] = est.diagnostics.rounding_complete;
  }
  return m;
}

json run_robust_cell(const ExperimentConfig& config, const Cell& cell,
                     std::uint64_t seed) {
  MixtureSpec gen;
  gen.components = {config.mixture.components.at(0)};
  gen.weights = Eigen::VectorXd::Ones(1);
  DatasetWithTruth data = sample_mixture(gen, cell.n, seed);
  if (cell.eps > 0.0)
    data = corrupt(data, cell.eps, config.adversary, seed + 1);
  RobustSettings rs;
  rs.t = config.t;
  rs.tau = config.tau;
  rs.eps_max = std::max(rs.eps_max, 2.0 * cell.eps);
  RobustEstimate est = estimate_mean(data.samples, cell.eps, rs);
  const Eigen::VectorXd truth = gen.components[0].mean;
  json m;
  m["error"] = (est.mean - truth).norm();
  m["raw_error"] =
      (data.samples.colwise().mean().transpose() - truth).norm();
  m["pruned"] = est.pruned.size();
  m["sdp_iterations"] = est.sdp_iterations;
  m["solved"] = est.solved();
  return m;
}

json run_certify_cell(const ExperimentConfig& config) {
  json m;
  double worst = 0.0;
  bool all = true;
  json per_component = json::array();
  for (const auto& comp : config.mixture.components) {
    BoundednessReport rep = certify_explicit_boundedness(
        oracle_for(comp, config.t), comp.dim(), config.t,
        comp.variance_proxy);
    json pc;
    pc["all_sos"] = rep.all_sos;
    for (const auto& s : rep.per_s) {
      pc["s" + std::to_string(s.s)] = s.is_sos;
      worst = std::max(worst, s.residual);
    }
    all = all && rep.all_sos;
    per_component.push_back(pc);
  }
  m["all_sos"] = all;
  m["worst_residual"] = worst;
  m["components"] = per_component;
  m["error"] = all ? 0.0 : 1.0;
  return m;
}

json run_selftest_cell(const ExperimentConfig& config, std::uint64_t seed) {
  SelftestReport rep = run_sdp_selftest(config.selftest_feasible,
                                        config.selftest_infeasible, seed);
  json m;
  m["feasible_solved"] = rep.feasible_solved;
  m["feasible_total"] = rep.feasible_total;
  m["infeasible_detected"] = rep.infeasible_detected;
  m["infeasible_total"] = rep.infeasible_total;
  m["worst_gap"] = rep.worst_gap;
  bool ok = rep.feasible_solved == rep.feasible_total &&
            rep.infeasible_detected == rep.infeasible_total;
  m["error"] = ok ? 0.0 : 1.0;
  if (!ok) throw std::runtime_error("selftest missed instances");
  return m;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  size_t idx = static_cast<size_t>(q * (v.size() - 1) + 0.5);
  return v[std::min(idx, v.size() - 1)];
}

}  // namespace

void ExperimentConfig::validate() const {
  if (version != 1)
    throw std::invalid_argument("config field 'version': expected 1");
  if (task == Task::kMixture || task == Task::kRobust) {
    if (mixture.components.empty())
      throw std::invalid_argument("config field 'mixture': needs components");
    mixture.validate();
    if (n.empty())
      throw std::invalid_argument("config field 'n': needs at least one size");
    for (int v : n)
      if (v < 1) throw std::invalid_argument("config field 'n': sizes >= 1");
  }
  for (double e : eps)
    if (e < 0.0 || e >= 1.0)
      throw std::invalid_argument("config field 'eps': values in [0, 1)");
  for (double s : separation)
    if (s <= 0.0)
      throw std::invalid_argument("config field 'separation': values > 0");
  if (t < 2 || t % 2 != 0)
    throw std::invalid_argument("config field 't': even and >= 2");
  if (tau < 0.0) throw std::invalid_argument("config field 'tau': >= 0");
  if (eta < 0.0 || eta > 1.0)
    throw std::invalid_argument("config field 'eta': in [0, 1]");
  if (xi <= 0.0) throw std::invalid_argument("config field 'xi': > 0");
  if (selftest_feasible < 0 || selftest_infeasible < 0)
    throw std::invalid_argument("config field 'selftest counts': >= 0");
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") +
                                e.what());
  }
  ExperimentConfig c;
  try {
    c.version = j.value("version", 1);
    c.task = task_from_name(j.value("task", "robust"));
    if (j.contains("mixture"))
      c.mixture = mixture_spec_from_json(j.at("mixture").dump());
    if (j.contains("adversary"))
      c.adversary = adversary_from_json(j.at("adversary"));
    c.eps = j.value("eps", std::vector<double>{});
    c.separation = j.value("separation", std::vector<double>{});
    c.n = j.value("n", std::vector<int>{});
    c.t = j.value("t", 4);
    c.tau = j.value("tau", 1e-3);
    c.k = j.value("k", 0);
    c.rounding_moment_param = j.value("rounding_moment_param", 0.0);
    c.eta = j.value("eta", 0.0);
    c.xi = j.value("xi", 0.02);
    c.selftest_feasible = j.value("selftest_feasible", 50);
    c.selftest_infeasible = j.value("selftest_infeasible", 10);
    c.seeds = j.value("seeds", std::vector<std::uint64_t>{});
    c.output = j.value("output", std::string{});
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") +
                                e.what());
  }
  c.validate();
  return c;
}

std::string experiment_config_to_json(const ExperimentConfig& config) {
  json j;
  j["version"] = config.version;
  j["task"] = task_name(config.task);
  if (!config.mixture.components.empty())
    j["mixture"] = json::parse(mixture_spec_to_json(config.mixture));
  j["adversary"] = adversary_to_json(config.adversary);
  j["eps"] = config.eps;
  j["separation"] = config.separation;
  j["n"] = config.n;
  j["t"] = config.t;
  j["tau"] = config.tau;
  j["k"] = config.k;
  j["rounding_moment_param"] = config.rounding_moment_param;
  j["eta"] = config.eta;
  j["xi"] = config.xi;
  j["selftest_feasible"] = config.selftest_feasible;
  j["selftest_infeasible"] = config.selftest_infeasible;
  j["seeds"] = config.seeds;
  j["output"] = config.output;
  return j.dump();
}

RunOutcome run_experiment(const ExperimentConfig& config, int workers) {
  config.validate();
  std::vector<Cell> cells = enumerate_cells(config);

  struct Job {
    size_t cell;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (size_t c = 0; c < cells.size(); ++c)
    for (std::uint64_t s : config.seeds) jobs.push_back({c, s});

  RunOutcome outcome;
  outcome.rows.resize(jobs.size());
  std::vector<char> job_ok(jobs.size(), 0);

  auto work = [&](size_t idx) {
    const Job& job = jobs[idx];
    const Cell& cell = cells[job.cell];
    ResultRow row;
    row.task = task_name(config.task);
    row.seed = job.seed;
    row.cell_json = cell.snapshot.dump();
    auto t0 = std::chrono::steady_clock::now();
    try {
      json m;
      switch (config.task) {
        case ExperimentConfig::Task::kMixture:
          m = run_mixture_cell(config, cell, job.seed);
          break;
        case ExperimentConfig::Task::kRobust:
          m = run_robust_cell(config, cell, job.seed);
          break;
        case ExperimentConfig::Task::kCertify:
          m = run_certify_cell(config);
          break;
        case ExperimentConfig::Task::kSdpSelftest:
          m = run_selftest_cell(config, job.seed);
          break;
      }
      row.metrics_json = m.dump();
      row.ok = true;
    } catch (const std::exception& e) {
      row.metrics_json = json{{"failure", e.what()}}.dump();
      row.ok = false;
    }
    row.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    job_ok[idx] = row.ok ? 1 : 0;
    outcome.rows[idx] = std::move(row);
  };

  int pool = std::max(1, workers);
  if (pool == 1 || jobs.size() <= 1) {
    for (size_t i = 0; i < jobs.size(); ++i) work(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> threads;
    int spawn = std::min<size_t>(pool, jobs.size());
    for (int w = 0; w < spawn; ++w)
      threads.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < jobs.size();
             i = next.fetch_add(1))
          work(i);
      });
    for (auto& th : threads) th.join();
  }

  outcome.cells_total = static_cast<int>(cells.size());
  for (size_t c = 0; c < cells.size(); ++c) {
    bool any_ok = false, any_row = false;
    for (size_t i = 0; i < jobs.size(); ++i)
      if (jobs[i].cell == c) {
        any_row = true;
        any_ok = any_ok || job_ok[i];
      }
    if (any_row && !any_ok) ++outcome.cells_failed;
  }
  if (jobs.empty()) outcome.cells_total = 0;
  return outcome;
}

void write_results(const RunOutcome& outcome, const ExperimentConfig& config,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open result file " + path);
  out << json{{"resolved_config",
               json::parse(experiment_config_to_json(config))}}
             .dump()
      << "\n";
  for (const ResultRow& row : outcome.rows) {
    json j;
    j["task"] = row.task;
    j["seed"] = row.seed;
    j["cell"] = json::parse(row.cell_json);
    j["metrics"] = json::parse(row.metrics_json);
    j["wall_time_s"] = row.wall_time_s;
    j["ok"] = row.ok;
    out << j.dump() << "\n";
  }
}

ReportOutcome report_results(const std::string& results_path) {
  std::ifstream in(results_path);
  if (!in) throw std::runtime_error("cannot open result file " + results_path);

  ReportOutcome report;
  struct CellAgg {
    std::string cell_json;
    std::vector<double> errors;
    std::vector<double> times;
    int rows = 0;
    int failures = 0;
  };
  std::vector<CellAgg> aggs;
  auto agg_for = [&](const std::string& cell) -> CellAgg& {
    for (auto& a : aggs)
      if (a.cell_json == cell) return a;
    aggs.emplace_back();
    aggs.back().cell_json = cell;
    return aggs.back();
  };

  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      ++report.malformed_rows;
      std::cerr << "report: skipping malformed line\n";
      continue;
    }
    if (first && j.contains("resolved_config")) {
      first = false;
      continue;
    }
    first = false;
    if (!j.contains("cell") || !j.contains("metrics") || !j.contains("ok")) {
      ++report.malformed_rows;
      std::cerr << "report: skipping row without cell/metrics/ok\n";
      continue;
    }
    CellAgg& agg = agg_for(j["cell"].dump());
    ++agg.rows;
    if (!j["ok"].get<bool>()) {
      ++agg.failures;
    } else if (j["metrics"].contains("error") &&
               j["metrics"]["error"].is_number()) {
      agg.errors.push_back(j["metrics"]["error"].get<double>());
    }
    if (j.contains("wall_time_s") && j["wall_time_s"].is_number())
      agg.times.push_back(j["wall_time_s"].get<double>());
  }

  double prev_median = std::numeric_limits<double>::quiet_NaN();
  for (const CellAgg& agg : aggs) {
    SummaryRow row;
    row.cell_json = agg.cell_json;
    row.rows = agg.rows;
    row.failures = agg.failures;
    row.median_error = quantile(agg.errors, 0.5);
    row.q25_error = quantile(agg.errors, 0.25);
    row.q75_error = quantile(agg.errors, 0.75);
    row.median_wall_time_s = quantile(agg.times, 0.5);
    // cells appear in declared sweep order; flag any step where the median
    // error stops decreasing
    if (!agg.errors.empty() && !std::isnan(prev_median))
      row.monotonicity_violated = row.median_error > prev_median;
    if (!agg.errors.empty()) prev_median = row.median_error;
    report.cells.push_back(std::move(row));
  }
  return report;
}

std::string summary_to_csv(const ReportOutcome& report) {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
      out += ch;
      if (ch == '"') out += '"';
    }
    out += '"';
    return out;
  };
  std::ostringstream out;
  out << "cell,rows,failures,median_error,q25_error,q75_error,"
         "median_wall_time_s,monotonicity_violated\n";
  for (const SummaryRow& row : report.cells) {
    out << quote(row.cell_json) << ',' << row.rows << ',' << row.failures
        << ',' << row.median_error << ',' << row.q25_error << ','
        << row.q75_error << ',' << row.median_wall_time_s << ','
        << (row.monotonicity_violated ? 1 : 0) << "\n";
  }
  return out.str();
}

}  // namespace sos

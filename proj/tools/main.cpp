// Experiment harness for the mixture / robust-mean estimators: generates
// datasets, runs seeded sweeps from a JSON config on a bounded worker pool,
// and summarizes result files as CSV tables.
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sos/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeFailure = 2;

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* c = cmd->add_option("--config", args.config_path,
                            "experiment config (JSON)");
  if (config_required) c->required();
  cmd->add_option("--out", args.out_path, "output path");
  cmd->add_option("--seed", args.seed, "override the config seed list")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--workers", args.workers, "worker pool size")
      ->check(CLI::PositiveNumber);
}

sos::ExperimentConfig load_config(const CommonArgs& args) {
  std::ifstream in(args.config_path);
  if (!in)
    throw std::invalid_argument("cannot read config file " + args.config_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return sos::experiment_config_from_json(buf.str());
}

int run_harness(const CommonArgs& args, sos::ExperimentConfig::Task expected) {
  sos::ExperimentConfig config = load_config(args);
  if (config.task != expected)
    throw std::invalid_argument(
        "config field 'task': does not match the subcommand");
  if (args.seed_set) config.seeds = {args.seed};
  std::string out = !args.out_path.empty() ? args.out_path
                    : !config.output.empty() ? config.output
                                             : std::string("results.jsonl");
  sos::RunOutcome outcome = sos::run_experiment(config, args.workers);
  sos::write_results(outcome, config, out);

  int ok_rows = 0;
  for (const auto& row : outcome.rows) ok_rows += row.ok ? 1 : 0;
  std::cout << "cells: " << outcome.cells_total
            << "  rows: " << outcome.rows.size() << "  ok: " << ok_rows
            << "  results: " << out << "\n";
  for (const auto& row : outcome.rows)
    if (!row.ok)
      std::cout << "  failed seed " << row.seed << " cell " << row.cell_json
                << ": " << row.metrics_json << "\n";
  return outcome.all_failed() ? kExitRuntimeFailure : kExitOk;
}

Eigen::MatrixXd read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read sample file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("ragged row in sample file " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw std::invalid_argument("sample file " + path + " is empty");
  Eigen::MatrixXd M(static_cast<int>(rows.size()),
                    static_cast<int>(rows.front().size()));
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j)
      M(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  return M;
}

// single-dataset mode: estimate from a plain CSV instead of running a sweep
int run_mixture_on_csv(const CommonArgs& args, const std::string& data_path) {
  sos::ExperimentConfig config = load_config(args);
  Eigen::MatrixXd samples = read_sample_csv(data_path);
  std::uint64_t seed = args.seed_set ? args.seed
                       : !config.seeds.empty() ? config.seeds.front()
                                               : 1;
  sos::MixtureSettings ms;
  ms.t = config.t;
  ms.tau = config.tau;
  ms.rounding_moment_param = config.rounding_moment_param;
  int k = config.k > 0 ? config.k
                       : static_cast<int>(config.mixture.components.size());
  sos::MixtureEstimate est =
      config.eta > 0.0
          ? sos::learn_nonuniform(samples, config.eta, config.xi, seed, ms)
          : sos::learn_mixture_means(samples, k, seed, ms);

  std::ostringstream out;
  out << "{\"means\":[";
  for (int c = 0; c < est.means.rows(); ++c) {
    out << (c ? "," : "") << "[";
    for (int j = 0; j < est.means.cols(); ++j)
      out << (j ? "," : "") << est.means(c, j);
    out << "]";
  }
  out << "],\"labels\":[";
  for (size_t i = 0; i < est.assignment.labels.size(); ++i)
    out << (i ? "," : "") << est.assignment.labels[i];
  out << "],\"diagnostics\":{\"degenerate\":"
      << (est.diagnostics.degenerate ? "true" : "false")
      << ",\"rounding_complete\":"
      << (est.diagnostics.rounding_complete ? "true" : "false")
      << ",\"wwt_frobenius\":" << est.diagnostics.wwt_frobenius << "}}";
  std::string text = out.str();
  if (!args.out_path.empty()) {
    std::ofstream f(args.out_path);
    f << text << "\n";
  }
  std::cout << text << "\n";
  return kExitOk;
}

int run_robust_on_csv(const CommonArgs& args, const std::string& data_path) {
  sos::ExperimentConfig config = load_config(args);
  Eigen::MatrixXd samples = read_sample_csv(data_path);
  double eps = config.eps.empty() ? 0.0 : config.eps.front();
  sos::RobustSettings rs;
  rs.t = config.t;
  rs.tau = config.tau;
  rs.eps_max = std::max(rs.eps_max, 2.0 * eps);
  sos::RobustEstimate est = sos::estimate_mean(samples, eps, rs);

  std::ostringstream out;
  out << "{\"mean\":[";
  for (int j = 0; j < est.mean.size(); ++j)
    out << (j ? "," : "") << est.mean(j);
  out << "],\"solved\":" << (est.solved() ? "true" : "false")
      << ",\"sdp_iterations\":" << est.sdp_iterations
      << ",\"rounding_gap\":" << est.rounding_gap << "}";
  std::string text = out.str();
  if (!args.out_path.empty()) {
    std::ofstream f(args.out_path);
    f << text << "\n";
    // rows discarded by pruning, one index per line, for diagnostics
    std::ofstream mask(args.out_path + ".pruned");
    for (int idx : est.pruned) mask << idx << "\n";
  }
  std::cout << text << "\n";
  return est.solved() ? kExitOk : kExitRuntimeFailure;
}

int run_gen(const CommonArgs& args) {
  sos::ExperimentConfig config = load_config(args);
  if (config.mixture.components.empty() || config.n.empty())
    throw std::invalid_argument(
        "config field 'mixture'/'n': gen needs a generator and a sample size");
  std::uint64_t seed = args.seed_set ? args.seed
                       : !config.seeds.empty() ? config.seeds.front()
                                               : 1;
  sos::DatasetWithTruth data =
      sos::sample_mixture(config.mixture, config.n.front(), seed);
  if (config.task == sos::ExperimentConfig::Task::kRobust &&
      !config.eps.empty() && config.eps.front() > 0.0)
    data = sos::corrupt(data, config.eps.front(), config.adversary, seed + 1);
  std::string base = !args.out_path.empty() ? args.out_path : "dataset";
  sos::write_dataset(data, base + ".csv", base + ".json");
  std::cout << "wrote " << base << ".csv and " << base << ".json (n=" << data.n()
            << ", d=" << data.d() << ", seed=" << seed << ")\n";
  return kExitOk;
}

int run_selftest(const CommonArgs& args) {
  sos::ExperimentConfig config;
  if (!args.config_path.empty()) {
    config = load_config(args);
    if (config.task != sos::ExperimentConfig::Task::kSdpSelftest)
      throw std::invalid_argument(
          "config field 'task': does not match the subcommand");
  } else {
    config.task = sos::ExperimentConfig::Task::kSdpSelftest;
  }
  if (args.seed_set) config.seeds = {args.seed};
  if (config.seeds.empty()) config.seeds = {1};
  sos::RunOutcome outcome = sos::run_experiment(config, args.workers);
  if (!args.out_path.empty()) sos::write_results(outcome, config, args.out_path);
  for (const auto& row : outcome.rows)
    std::cout << (row.ok ? "ok   " : "FAIL ") << "seed " << row.seed << " "
              << row.metrics_json << "\n";
  return outcome.all_failed() ? kExitRuntimeFailure : kExitOk;
}

int run_report(const std::string& results_path, const std::string& out_path) {
  sos::ReportOutcome report = sos::report_results(results_path);
  std::string csv = sos::summary_to_csv(report);
  std::cout << csv;
  if (report.malformed_rows > 0)
    std::cerr << "warning: skipped " << report.malformed_rows
              << " malformed rows\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out)
      throw std::runtime_error("cannot open summary file " + out_path);
    out << csv;
    std::cout << "summary written to " << out_path << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sum-of-squares mixture and robust-mean estimation harness"};
  app.require_subcommand(1);

  CommonArgs gen_args, mix_args, rob_args, cert_args, self_args;
  std::string report_results_path, report_out_path;

  auto* gen = app.add_subcommand("gen", "generate a dataset from a config");
  add_common(gen, gen_args, true);
  std::string mix_data, rob_data;
  auto* mix = app.add_subcommand("mixture", "run a mixture-learning sweep");
  add_common(mix, mix_args, true);
  mix->add_option("--data", mix_data,
                  "estimate a single CSV sample matrix instead of sweeping");
  auto* rob = app.add_subcommand("robust", "run a robust-mean sweep");
  add_common(rob, rob_args, true);
  rob->add_option("--data", rob_data,
                  "estimate a single CSV sample matrix instead of sweeping");
  auto* cert =
      app.add_subcommand("certify", "certify explicit moment boundedness");
  add_common(cert, cert_args, true);
  auto* self = app.add_subcommand("sdp-selftest", "run the SDP solver selftest");
  add_common(self, self_args, false);
  auto* rep = app.add_subcommand("report", "summarize a result file as CSV");
  rep->add_option("results", report_results_path, "result file (JSON lines)")
      ->required();
  rep->add_option("--out", report_out_path, "summary CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_gen(gen_args);
    if (mix->parsed())
      return mix_data.empty()
                 ? run_harness(mix_args, sos::ExperimentConfig::Task::kMixture)
                 : run_mixture_on_csv(mix_args, mix_data);
    if (rob->parsed())
      return rob_data.empty()
                 ? run_harness(rob_args, sos::ExperimentConfig::Task::kRobust)
                 : run_robust_on_csv(rob_args, rob_data);
    if (cert->parsed())
      return run_harness(cert_args, sos::ExperimentConfig::Task::kCertify);
    if (self->parsed()) return run_selftest(self_args);
    if (rep->parsed()) return run_report(report_results_path, report_out_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeFailure;
  }
  return kExitOk;
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sparsid {

enum class LambdaRule { empirical, theory, fixed };

// CLI/config tokens: "paper" (empirical sqrt(0.03 ln(n+m)/T) rule),
// "theorem1" (theory-derived rate), "fixed".
LambdaRule parse_lambda_rule(const std::string& token);
std::string lambda_rule_token(LambdaRule rule);

struct SweepConfig {
  std::vector<long> generator_counts;
  std::vector<long> T_grid;
  long trials = 10;
  LambdaRule lambda_rule = LambdaRule::empirical;
  double fixed_lambda = 0.0;   // used only by LambdaRule::fixed
  double delta = 0.05;         // failure probability for the theory rule
  std::uint64_t seed_base = 0;
  long jobs = 1;
  std::string out_dir;         // empty disables file output
  double lasso_tol = 1e-8;
  long max_sweeps = 100000;
  long instances = 200;        // batch size for the gamma histogram
  long bins = 50;
  long max_degree = 10;
};

// Reads the fields above from a JSON object; unknown keys are rejected so
// config typos fail loudly. Missing keys keep their defaults.
SweepConfig load_sweep_config(const std::string& path);

struct SweepRow {
  long N_g = 0;
  long n = 0;
  long m = 0;
  long T = 0;
  double RLT = 0.0;  // T / (n + m)
  long trial = 0;
  std::string estimator;  // lasso | lasso_ls | ls
  long mismatch = -1;     // -1 renders as an empty CSV cell
  double RME = -1.0;      // mismatch / ((n+m) n); negative renders empty
  double linf_error = -1.0;
  double l2_error_normalized = -1.0;
  int recovery_success = -1;  // -1 renders empty
  std::string status = "ok";  // ok | nonconverged | underdetermined | error: ...
  double seconds = 0.0;       // wall time; excluded from determinism checks
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool any_hard_failure = false;  // true only for unexpected per-cell errors
};

// One lasso row per (N_g, trial, T). Trajectories are simulated once per
// trial at max(T_grid) and sliced, so cells of the same trial share their
// noise prefix. Streams results.csv (and meta.json) into cfg.out_dir when
// set; rows are emitted in deterministic (N_g, trial, T) order regardless of
// worker count.
SweepResult run_recovery_sweep(const SweepConfig& cfg);

// Same cells, three rows each: lasso, lasso with restricted least-squares
// debiasing, and plain least squares. The ls row carries the underdetermined
// status when T < n + m.
SweepResult run_estimator_comparison(const SweepConfig& cfg);

struct GammaHistogram {
  std::vector<std::uint64_t> seeds;  // per instance
  std::vector<double> values;        // incoherence gamma per instance
  std::vector<double> bin_edges;     // bins + 1 edges over the observed range
  std::vector<long> counts;          // per bin
  double violation_fraction = 0.0;   // share of instances with gamma <= 0
};

// Samples cfg.instances grid instances at N_g = generator_counts.front() and
// histograms their incoherence parameter. Writes gamma.csv, histogram.csv,
// meta.json into cfg.out_dir when set.
GammaHistogram run_gamma_histogram(const SweepConfig& cfg);

// CSV header shared by the sweep commands.
std::string sweep_csv_header();
std::string sweep_csv_line(const SweepRow& row);

}  // namespace sparsid

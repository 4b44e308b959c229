#include "sparsid/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "sparsid/assumptions.hpp"
#include "sparsid/lasso.hpp"
#include "sparsid/metrics.hpp"
#include "sparsid/post_estimation.hpp"
#include "sparsid/powergrid.hpp"
#include "sparsid/stationary.hpp"
#include "sparsid/theory.hpp"
#include "sparsid/trajectory.hpp"

namespace sparsid {

namespace {

using json = nlohmann::json;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string cell_long(long v) { return v < 0 ? "" : std::to_string(v); }
std::string cell_double(double v) { return v < 0.0 ? "" : fmt(v); }
std::string cell_flag(int v) { return v < 0 ? "" : std::to_string(v); }

void validate_trajectory_config(const SweepConfig& cfg) {
  if (cfg.generator_counts.empty() || cfg.T_grid.empty()) {
    throw std::invalid_argument("sweep config: empty grid");
  }
  if (cfg.trials < 1) throw std::invalid_argument("sweep config: trials < 1");
  for (long N_g : cfg.generator_counts) {
    if (N_g < 2) throw std::invalid_argument("sweep config: N_g must be >= 2");
  }
  for (long T : cfg.T_grid) {
    if (T < 1) throw std::invalid_argument("sweep config: T must be >= 1");
  }
  if (cfg.lambda_rule == LambdaRule::fixed && cfg.fixed_lambda <= 0.0) {
    throw std::invalid_argument("sweep config: fixed rule needs fixed_lambda > 0");
  }
}

json config_json(const SweepConfig& cfg) {
  return json{{"generator_counts", cfg.generator_counts},
              {"T_grid", cfg.T_grid},
              {"trials", cfg.trials},
              {"lambda_rule", lambda_rule_token(cfg.lambda_rule)},
              {"fixed_lambda", cfg.fixed_lambda},
              {"delta", cfg.delta},
              {"seed_base", cfg.seed_base},
              {"jobs", cfg.jobs},
              {"lasso_tol", cfg.lasso_tol},
              {"max_sweeps", cfg.max_sweeps},
              {"instances", cfg.instances},
              {"bins", cfg.bins},
              {"max_degree", cfg.max_degree}};
}

void write_meta(const SweepConfig& cfg, const std::string& command,
                json extra) {
  if (cfg.out_dir.empty()) return;
  json meta{{"command", command},
            {"config", config_json(cfg)},
            {"tree_sampler", "degree_capped_uniform_attachment"},
            {"noise",
             {{"w", {{"family", "gaussian"}, {"scale", 0.1}}},
              {"v", {{"family", "gaussian"}, {"scale", std::sqrt(0.05)}}}}},
            {"version", "0.1.0"}};
  meta.update(extra);
  std::ofstream out(std::filesystem::path(cfg.out_dir) / "meta.json");
  if (!out) throw std::runtime_error("cannot write meta.json in " + cfg.out_dir);
  out << meta.dump(2) << "\n";
}

struct TrialJob {
  long N_g = 0;
  long trial = 0;
};

// Shared state for one trial: the sampled instance plus its full-length
// trajectory in regression form, sliced per T by the caller.
struct TrialContext {
  GridInstance instance;
  RegressionData full;
  std::vector<std::vector<Eigen::Index>> truth;
  TheoryParams theory;  // populated only for LambdaRule::theory
};

TrialContext prepare_trial(const SweepConfig& cfg, const TrialJob& job) {
  const std::uint64_t trial_seed = hash_combine(
      cfg.seed_base, hash_combine(std::uint64_t(job.N_g), std::uint64_t(job.trial)));
  TrialContext ctx{sample_grid_instance(job.N_g, hash_combine(trial_seed, 1),
                                        cfg.max_degree),
                   {}, {}, {}};
  const auto [w, v] = default_noise();
  const long T_max = *std::max_element(cfg.T_grid.begin(), cfg.T_grid.end());
  const TrajectoryData traj = simulate_closed_loop(
      ctx.instance.system, w, v, T_max, hash_combine(trial_seed, 2));
  ctx.full = assemble_regression(ctx.instance.system, traj);
  ctx.truth = support_sets(ctx.instance.system.psi_star()).supports;

  if (cfg.lambda_rule == LambdaRule::theory) {
    const SystemModel& sys = ctx.instance.system;
    const StationaryStats stats =
        compute_stationary_stats(sys, w.scale, v.scale);
    const AssumptionReport report =
        build_assumption_report(sys.psi_star(), stats.M_star);
    ctx.theory.C = stats.C;
    ctx.theory.rho = stats.rho;
    ctx.theory.eta = eta_bound(w, v);
    ctx.theory.gamma = report.incoherence.gamma;
    ctx.theory.C_min = report.min_eigenvalue.C_min;
    ctx.theory.D_max = report.inf_norm.D_max;
    ctx.theory.Psi_min = report.min_gap.min_variant;
    ctx.theory.k = report.sparsity.k;
    ctx.theory.n = sys.n();
    ctx.theory.m = sys.m();
    ctx.theory.delta = cfg.delta;
  }
  return ctx;
}

double pick_lambda(const SweepConfig& cfg, const TrialContext& ctx, long n,
                   long m, long T) {
  switch (cfg.lambda_rule) {
    case LambdaRule::empirical:
      return empirical_lambda(n, m, T);
    case LambdaRule::theory:
      return theorem1_lambda(ctx.theory, T);
    case LambdaRule::fixed:
      return cfg.fixed_lambda;
  }
  throw std::logic_error("unreachable lambda rule");
}

SweepRow base_row(const TrialJob& job, long n, long m, long T) {
  SweepRow row;
  row.N_g = job.N_g;
  row.n = n;
  row.m = m;
  row.T = T;
  row.RLT = double(T) / double(n + m);
  row.trial = job.trial;
  return row;
}

void score_estimate(SweepRow& row, const Eigen::MatrixXd& Psi_hat,
                    const Eigen::MatrixXd& Psi_star,
                    const std::vector<std::vector<Eigen::Index>>& truth) {
  row.mismatch = mismatch_error(support_sets(Psi_hat).supports, truth);
  row.RME = double(row.mismatch) / double(Psi_star.rows() * Psi_star.cols());
  row.linf_error = linf_error(Psi_hat, Psi_star);
  row.l2_error_normalized = normalized_l2_error(Psi_hat, Psi_star);
  row.recovery_success = row.mismatch == 0 && row.status == "ok" ? 1 : 0;
}

std::vector<SweepRow> run_trial(const SweepConfig& cfg, const TrialJob& job,
                                bool compare, bool& hard_failure) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<SweepRow> rows;
  try {
    const TrialContext ctx = prepare_trial(cfg, job);
    const SystemModel& sys = ctx.instance.system;
    const Eigen::MatrixXd Psi_star = sys.psi_star();
    const long n = sys.n();
    const long m = sys.m();
    double setup_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    for (long T : cfg.T_grid) {
      const auto t1 = std::chrono::steady_clock::now();
      RegressionData data;
      data.X = ctx.full.X.topRows(T);
      data.Y = ctx.full.Y.topRows(T);

      LassoOptions opts;
      opts.lambda = pick_lambda(cfg, ctx, n, m, T);
      opts.tol = cfg.lasso_tol;
      opts.max_sweeps = cfg.max_sweeps;
      const EstimateResult est = estimate_lasso(data, opts);

      SweepRow lasso_row = base_row(job, n, m, T);
      lasso_row.estimator = "lasso";
      if (!est.converged) lasso_row.status = "nonconverged";
      score_estimate(lasso_row, est.Psi_hat, Psi_star, ctx.truth);
      lasso_row.seconds =
          setup_seconds +
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t1)
              .count();
      setup_seconds = 0.0;  // attribute instance setup to the first row only
      rows.push_back(lasso_row);

      if (!compare) continue;

      SweepRow ls_refined_row = base_row(job, n, m, T);
      ls_refined_row.estimator = "lasso_ls";
      const auto t2 = std::chrono::steady_clock::now();
      const RefinedEstimate refined =
          restricted_least_squares(data, est.support);
      if (!est.converged) ls_refined_row.status = "nonconverged";
      if (!refined.all_ok) ls_refined_row.status = "rank_deficient";
      score_estimate(ls_refined_row, refined.Psi_hat, Psi_star, ctx.truth);
      ls_refined_row.seconds = lasso_row.seconds +
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t2)
              .count();
      rows.push_back(ls_refined_row);

      SweepRow ls_row = base_row(job, n, m, T);
      ls_row.estimator = "ls";
      const auto t3 = std::chrono::steady_clock::now();
      try {
        const Eigen::MatrixXd Psi_ls = full_least_squares(data);
        score_estimate(ls_row, Psi_ls, Psi_star, ctx.truth);
      } catch (const underdetermined_error&) {
        ls_row.status = "underdetermined";
      }
      ls_row.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t3)
              .count();
      rows.push_back(ls_row);
    }
  } catch (const std::exception& e) {
    SweepRow row;
    row.N_g = job.N_g;
    row.trial = job.trial;
    row.status = std::string("error: ") + e.what();
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    rows.assign(1, row);
    hard_failure = true;
  }
  return rows;
}

// Runs the job list with cfg.jobs workers and hands completed blocks to sink
// in job order, so output is deterministic for any worker count.
void dispatch_jobs(
    const SweepConfig& cfg, size_t total,
    const std::function<std::vector<SweepRow>(size_t)>& work,
    const std::function<void(std::vector<SweepRow>&&)>& sink) {
  const size_t workers =
      size_t(std::max(1l, std::min(cfg.jobs, long(total))));
  if (workers == 1) {
    for (size_t j = 0; j < total; ++j) sink(work(j));
    return;
  }

  std::vector<std::vector<SweepRow>> blocks(total);
  std::vector<char> ready(total, 0);
  std::atomic<size_t> next{0};
  std::mutex mu;
  std::condition_variable cv;

  auto worker = [&] {
    while (true) {
      const size_t j = next.fetch_add(1);
      if (j >= total) break;
      auto block = work(j);
      {
        std::lock_guard<std::mutex> lock(mu);
        blocks[j] = std::move(block);
        ready[j] = 1;
      }
      cv.notify_all();
    }
  };
  std::vector<std::thread> pool;
  for (size_t i = 0; i < workers; ++i) pool.emplace_back(worker);

  for (size_t j = 0; j < total; ++j) {
    std::unique_lock<std::mutex> lock(mu);
    cv.wait(lock, [&] { return ready[j] != 0; });
    auto block = std::move(blocks[j]);
    lock.unlock();
    sink(std::move(block));
  }
  for (auto& t : pool) t.join();
}

SweepResult run_trajectory_sweep(const SweepConfig& cfg, bool compare,
                                 const std::string& command) {
  validate_trajectory_config(cfg);
  std::vector<TrialJob> jobs;
  for (long N_g : cfg.generator_counts) {
    for (long trial = 0; trial < cfg.trials; ++trial) {
      jobs.push_back({N_g, trial});
    }
  }

  std::ofstream csv;
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    csv.open(std::filesystem::path(cfg.out_dir) / "results.csv");
    if (!csv) throw std::runtime_error("cannot write results.csv in " + cfg.out_dir);
    csv << sweep_csv_header() << "\n" << std::flush;
  }

  SweepResult result;
  std::atomic<bool> hard_failure{false};
  dispatch_jobs(
      cfg, jobs.size(),
      [&](size_t j) {
        bool failed = false;
        auto rows = run_trial(cfg, jobs[j], compare, failed);
        if (failed) hard_failure = true;
        return rows;
      },
      [&](std::vector<SweepRow>&& block) {
        for (auto& row : block) {
          if (csv.is_open()) csv << sweep_csv_line(row) << "\n";
          result.rows.push_back(std::move(row));
        }
        if (csv.is_open()) csv.flush();
      });
  result.any_hard_failure = hard_failure.load();

  write_meta(cfg, command,
             json{{"rows", result.rows.size()},
                  {"any_hard_failure", result.any_hard_failure}});
  return result;
}

}  // namespace

LambdaRule parse_lambda_rule(const std::string& token) {
  if (token == "paper") return LambdaRule::empirical;
  if (token == "theorem1") return LambdaRule::theory;
  if (token == "fixed") return LambdaRule::fixed;
  throw std::invalid_argument("unknown lambda rule: " + token);
}

std::string lambda_rule_token(LambdaRule rule) {
  switch (rule) {
    case LambdaRule::empirical: return "paper";
    case LambdaRule::theory: return "theorem1";
    case LambdaRule::fixed: return "fixed";
  }
  throw std::logic_error("unreachable lambda rule");
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j;
  in >> j;
  if (!j.is_object()) throw std::runtime_error("config must be a JSON object");

  SweepConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "generator_counts") {
      cfg.generator_counts = value.get<std::vector<long>>();
    } else if (key == "T_grid") {
      cfg.T_grid = value.get<std::vector<long>>();
    } else if (key == "trials") {
      cfg.trials = value.get<long>();
    } else if (key == "lambda_rule") {
      cfg.lambda_rule = parse_lambda_rule(value.get<std::string>());
    } else if (key == "fixed_lambda") {
      cfg.fixed_lambda = value.get<double>();
    } else if (key == "delta") {
      cfg.delta = value.get<double>();
    } else if (key == "seed_base") {
      cfg.seed_base = value.get<std::uint64_t>();
    } else if (key == "jobs") {
      cfg.jobs = value.get<long>();
    } else if (key == "out_dir") {
      cfg.out_dir = value.get<std::string>();
    } else if (key == "lasso_tol") {
      cfg.lasso_tol = value.get<double>();
    } else if (key == "max_sweeps") {
      cfg.max_sweeps = value.get<long>();
    } else if (key == "instances") {
      cfg.instances = value.get<long>();
    } else if (key == "bins") {
      cfg.bins = value.get<long>();
    } else if (key == "max_degree") {
      cfg.max_degree = value.get<long>();
    } else {
      throw std::runtime_error("unknown config key: " + key);
    }
  }
  return cfg;
}

std::string sweep_csv_header() {
  return "N_g,n,m,T,RLT,trial,estimator,mismatch,RME,linf_error,"
         "l2_error_normalized,recovery_success,status,seconds";
}

std::string sweep_csv_line(const SweepRow& row) {
  std::string line;
  line += std::to_string(row.N_g);
  line += ',' + cell_long(row.n);
  line += ',' + cell_long(row.m);
  line += ',' + cell_long(row.T);
  line += ',' + (row.n + row.m > 0 ? fmt(row.RLT) : std::string());
  line += ',' + std::to_string(row.trial);
  line += ',' + row.estimator;
  line += ',' + cell_long(row.mismatch);
  line += ',' + cell_double(row.RME);
  line += ',' + cell_double(row.linf_error);
  line += ',' + cell_double(row.l2_error_normalized);
  line += ',' + cell_flag(row.recovery_success);
  line += ',' + row.status;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", row.seconds);
  line += ',';
  line += buf;
  return line;
}

SweepResult run_recovery_sweep(const SweepConfig& cfg) {
  return run_trajectory_sweep(cfg, false, "sweep recovery");
}

SweepResult run_estimator_comparison(const SweepConfig& cfg) {
  return run_trajectory_sweep(cfg, true, "sweep compare");
}

GammaHistogram run_gamma_histogram(const SweepConfig& cfg) {
  if (cfg.generator_counts.empty()) {
    throw std::invalid_argument("gamma histogram: generator_counts empty");
  }
  if (cfg.instances < 1) {
    throw std::invalid_argument("gamma histogram: instances must be >= 1");
  }
  if (cfg.bins < 1) {
    throw std::invalid_argument("gamma histogram: bins must be >= 1");
  }
  const long N_g = cfg.generator_counts.front();
  const auto [w, v] = default_noise();

  GammaHistogram hist;
  hist.seeds.resize(size_t(cfg.instances));
  hist.values.resize(size_t(cfg.instances));

  const size_t total = size_t(cfg.instances);
  const size_t workers = size_t(std::max(1l, std::min(cfg.jobs, long(total))));
  std::atomic<size_t> next{0};
  auto worker = [&] {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= total) break;
      const std::uint64_t seed = hash_combine(cfg.seed_base, std::uint64_t(i));
      const GridInstance inst =
          sample_grid_instance(N_g, seed, cfg.max_degree);
      const SystemModel& sys = inst.system;
      const Eigen::MatrixXd rhs =
          w.variance() * Eigen::MatrixXd::Identity(sys.n(), sys.n()) +
          v.variance() * sys.B() * sys.B().transpose();
      const Eigen::MatrixXd Q = solve_discrete_lyapunov(sys.closed_loop(), rhs);
      const Eigen::MatrixXd M = build_joint_covariance(Q, sys.K0(), v.scale);
      const SparsityStats stats = support_sets(sys.psi_star());
      hist.seeds[i] = seed;
      hist.values[i] = check_mutual_incoherence(M, stats.supports).gamma;
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  double lo = hist.values[0];
  double hi = hist.values[0];
  long violations = 0;
  for (double g : hist.values) {
    lo = std::min(lo, g);
    hi = std::max(hi, g);
    if (g <= 0.0) ++violations;
  }
  if (lo == hi) {  // degenerate range: a single point still needs a bin
    lo -= 0.5;
    hi += 0.5;
  }
  hist.bin_edges.resize(size_t(cfg.bins) + 1);
  for (long b = 0; b <= cfg.bins; ++b) {
    hist.bin_edges[size_t(b)] = lo + (hi - lo) * double(b) / double(cfg.bins);
  }
  hist.counts.assign(size_t(cfg.bins), 0);
  for (double g : hist.values) {
    long b = long((g - lo) / (hi - lo) * double(cfg.bins));
    b = std::max(0l, std::min(cfg.bins - 1, b));
    ++hist.counts[size_t(b)];
  }
  hist.violation_fraction = double(violations) / double(cfg.instances);

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream values(std::filesystem::path(cfg.out_dir) / "gamma.csv");
    if (!values) throw std::runtime_error("cannot write gamma.csv");
    values << "instance,seed,gamma\n";
    for (size_t i = 0; i < total; ++i) {
      values << i << ',' << hist.seeds[i] << ',' << fmt(hist.values[i]) << "\n";
    }
    std::ofstream bins(std::filesystem::path(cfg.out_dir) / "histogram.csv");
    if (!bins) throw std::runtime_error("cannot write histogram.csv");
    bins << "bin_lo,bin_hi,count\n";
    for (long b = 0; b < cfg.bins; ++b) {
      bins << fmt(hist.bin_edges[size_t(b)]) << ','
           << fmt(hist.bin_edges[size_t(b) + 1]) << ','
           << hist.counts[size_t(b)] << "\n";
    }
    write_meta(cfg, "sweep gamma",
               json{{"violation_fraction", hist.violation_fraction},
                    {"instances", cfg.instances}});
  }
  return hist;
}

}  // namespace sparsid

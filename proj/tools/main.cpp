#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparsid/assumptions.hpp"
#include "sparsid/lasso.hpp"
#include "sparsid/metrics.hpp"
#include "sparsid/noise.hpp"
#include "sparsid/post_estimation.hpp"
#include "sparsid/powergrid.hpp"
#include "sparsid/stationary.hpp"
#include "sparsid/sweep.hpp"
#include "sparsid/system.hpp"
#include "sparsid/theory.hpp"
#include "sparsid/trajectory.hpp"

namespace {

using json = nlohmann::json;
using namespace sparsid;

json matrix_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json supports_json(const std::vector<std::vector<Eigen::Index>>& supports) {
  json out = json::array();
  for (const auto& sup : supports) {
    json col = json::array();
    for (Eigen::Index i : sup) col.push_back(i);
    out.push_back(std::move(col));
  }
  return out;
}

NoiseFamily parse_family(const std::string& token) {
  if (token == "gaussian") return NoiseFamily::gaussian;
  if (token == "uniform") return NoiseFamily::uniform_bounded;
  if (token == "rademacher") return NoiseFamily::rademacher;
  throw CLI::ValidationError("noise family must be gaussian|uniform|rademacher");
}

// n and m from a trajectory CSV header of the form t,x_0..x_{n-1},u_0..u_{m-1}.
std::pair<Eigen::Index, Eigen::Index> trajectory_dims(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory: " + path);
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("empty trajectory file: " + path);
  }
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  std::stringstream ss(header);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.rfind("x_", 0) == 0) ++n;
    if (token.rfind("u_", 0) == 0) ++m;
  }
  if (n == 0) throw std::runtime_error("no state columns in header of " + path);
  return {n, m};
}

void emit(const json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << doc.dump(2) << "\n";
}

struct GenerateArgs {
  long generators = 0;
  std::uint64_t seed = 0;
  long max_degree = 10;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  const GridInstance inst =
      sample_grid_instance(a.generators, a.seed, a.max_degree);
  json edges = json::array();
  for (const auto& [i, j] : inst.topology.edges) {
    edges.push_back(json::array({i, j}));
  }
  const json meta{{"sampler", "degree_capped_uniform_attachment"},
                  {"seed", inst.seed},
                  {"resamples", inst.resamples},
                  {"topology", {{"edges", std::move(edges)},
                                {"degrees", inst.topology.degrees}}},
                  {"params", {{"susceptance", inst.params.susceptance},
                              {"inertia", inst.params.inertia},
                              {"damping", inst.params.damping},
                              {"dt", inst.params.dt}}}};
  write_system_json(a.out, inst.system, meta.dump());
  std::cout << "wrote " << a.out << " (n=" << inst.system.n()
            << ", m=" << inst.system.m() << ", resamples=" << inst.resamples
            << ")\n";
  return 0;
}

struct SimulateArgs {
  std::string system;
  long T = 0;
  std::uint64_t seed = 0;
  std::string out;
  double sigma_w = 0.1;
  double sigma_v = std::sqrt(0.05);
  std::string w_family = "gaussian";
  std::string v_family = "gaussian";
};

int run_simulate(const SimulateArgs& a) {
  const SystemModel sys = read_system_json(a.system);
  NoiseSpec w;
  w.family = parse_family(a.w_family);
  w.scale = a.sigma_w;
  NoiseSpec v;
  v.family = parse_family(a.v_family);
  v.scale = a.sigma_v;
  const TrajectoryData traj = simulate_closed_loop(sys, w, v, a.T, a.seed);
  write_trajectory_csv(a.out, traj);
  std::cout << "wrote " << a.out << " (T=" << traj.T << ", n=" << sys.n()
            << ", m=" << sys.m() << ")\n";
  return 0;
}

struct IdentifyArgs {
  std::string trajectory;
  std::string system;
  double lambda = 0.0;
  bool lambda_set = false;
  std::string lambda_rule;
  double delta = 0.05;
  double tol = 1e-8;
  long max_sweeps = 100000;
  bool post_ls = false;
  std::string out;
  double sigma_w = 0.1;
  double sigma_v = std::sqrt(0.05);
};

int run_identify(const IdentifyArgs& a) {
  const auto [n, m] = trajectory_dims(a.trajectory);
  const TrajectoryData traj = read_trajectory_csv(a.trajectory, n, m);

  RegressionData data;
  data.X.resize(traj.T, n + m);
  data.X.leftCols(n) = traj.states.topRows(traj.T);
  data.X.rightCols(m) = traj.inputs;
  data.Y = traj.states.bottomRows(traj.T);

  LassoOptions opts;
  opts.tol = a.tol;
  opts.max_sweeps = a.max_sweeps;
  std::string rule_used = "fixed";
  if (a.lambda_set) {
    opts.lambda = a.lambda;
  } else if (a.lambda_rule == "paper") {
    opts.lambda = empirical_lambda(n, m, traj.T);
    rule_used = "paper";
  } else if (a.lambda_rule == "theorem1") {
    if (a.system.empty()) {
      throw CLI::ValidationError(
          "--lambda-rule theorem1 needs --system for the model constants");
    }
    const SystemModel sys = read_system_json(a.system);
    const StationaryStats stats =
        compute_stationary_stats(sys, a.sigma_w, a.sigma_v);
    const AssumptionReport report =
        build_assumption_report(sys.psi_star(), stats.M_star);
    TheoryParams p;
    p.C = stats.C;
    p.rho = stats.rho;
    p.eta = eta_bound(NoiseSpec::gaussian(a.sigma_w),
                      NoiseSpec::gaussian(a.sigma_v));
    p.gamma = report.incoherence.gamma;
    p.C_min = report.min_eigenvalue.C_min;
    p.D_max = report.inf_norm.D_max;
    p.Psi_min = report.min_gap.min_variant;
    p.k = report.sparsity.k;
    p.n = n;
    p.m = m;
    p.delta = a.delta;
    opts.lambda = theorem1_lambda(p, traj.T);
    rule_used = "theorem1";
  } else {
    throw CLI::ValidationError("pass --lambda or --lambda-rule paper|theorem1");
  }

  const EstimateResult est = estimate_lasso(data, opts);
  json doc{{"n", n},
           {"m", m},
           {"T", traj.T},
           {"lambda", opts.lambda},
           {"lambda_rule", rule_used},
           {"Psi_hat", matrix_json(est.Psi_hat)},
           {"support", supports_json(est.support)},
           {"diagnostics",
            {{"kkt_residuals", std::vector<double>(
                                   est.kkt_residuals.data(),
                                   est.kkt_residuals.data() + est.kkt_residuals.size())},
             {"sweeps_used", est.sweeps_used},
             {"converged", est.converged},
             {"tol", opts.tol}}}};

  if (a.post_ls) {
    const RefinedEstimate refined =
        restricted_least_squares(data, est.support);
    doc["psi_hat_ls"] = matrix_json(refined.Psi_hat);
    doc["diagnostics"]["post_ls"] = {{"conditioning", refined.conditioning},
                                     {"column_ok", refined.column_ok},
                                     {"all_ok", refined.all_ok}};
  }
  emit(doc, a.out);
  return est.converged ? 0 : 2;
}

struct CheckArgs {
  std::string system;
  double sigma_w = 0.1;
  double sigma_v = std::sqrt(0.05);
  std::string out;
  std::string histogram;
  long generators = 0;
  long instances = 200;
  long bins = 50;
  std::uint64_t seed = 0;
  long jobs = 1;
  std::string out_dir;
};

int run_check(const CheckArgs& a) {
  if (!a.histogram.empty()) {
    if (a.histogram != "gamma") {
      throw CLI::ValidationError("only --histogram gamma is available");
    }
    if (a.generators < 2) {
      throw CLI::ValidationError("--histogram gamma needs --generators >= 2");
    }
    SweepConfig cfg;
    cfg.generator_counts = {a.generators};
    cfg.T_grid = {1};  // unused by the histogram
    cfg.instances = a.instances;
    cfg.bins = a.bins;
    cfg.seed_base = a.seed;
    cfg.jobs = a.jobs;
    cfg.out_dir = a.out_dir;
    const GammaHistogram hist = run_gamma_histogram(cfg);
    std::cout << "instances=" << hist.values.size()
              << " violation_fraction=" << hist.violation_fraction << "\n";
    return 0;
  }

  if (a.system.empty()) {
    throw CLI::ValidationError("pass --system, or --histogram gamma");
  }
  const SystemModel sys = read_system_json(a.system);
  const StationaryStats stats =
      compute_stationary_stats(sys, a.sigma_w, a.sigma_v);
  const AssumptionReport report =
      build_assumption_report(sys.psi_star(), stats.M_star);

  const json doc{
      {"n", sys.n()},
      {"m", sys.m()},
      {"sigma_w", a.sigma_w},
      {"sigma_v", a.sigma_v},
      {"Q_star", matrix_json(stats.Q_star)},
      {"M_star", matrix_json(stats.M_star)},
      {"C", stats.C},
      {"rho", stats.rho},
      {"horizon_used", stats.horizon_used},
      {"assumptions",
       {{"gamma", report.incoherence.gamma},
        {"incoherence_satisfied", report.incoherence.satisfied},
        {"C_min", report.min_eigenvalue.C_min},
        {"D_max", report.inf_norm.D_max},
        {"min_gap_max_variant", report.min_gap.max_variant},
        {"min_gap_min_variant", report.min_gap.min_variant},
        {"k", report.sparsity.k},
        {"nnz", report.sparsity.nnz},
        {"supports", supports_json(report.sparsity.supports)},
        {"all_satisfied", report.all_satisfied}}},
      {"coherence_limit", coherence_limit(stats.M_star)}};
  emit(doc, a.out);
  return 0;
}

struct SweepArgs {
  std::string config;
  bool seed_set = false;
  std::uint64_t seed = 0;
  long jobs = 0;
  std::string out;
};

SweepConfig sweep_config(const SweepArgs& a) {
  SweepConfig cfg = load_sweep_config(a.config);
  if (a.seed_set) cfg.seed_base = a.seed;
  if (a.jobs > 0) cfg.jobs = a.jobs;
  if (!a.out.empty()) cfg.out_dir = a.out;
  return cfg;
}

int report_sweep(const SweepResult& res) {
  std::cout << "rows=" << res.rows.size()
            << " hard_failures=" << (res.any_hard_failure ? "yes" : "no")
            << "\n";
  return res.any_hard_failure ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse system identification from closed-loop trajectories"};
  app.set_version_flag("--version", "0.1.0");
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand(
      "generate", "sample a random swing-equation grid system");
  generate->add_option("--generators", gen.generators, "generator count")
      ->required()
      ->check(CLI::Range(2l, 100000l));
  generate->add_option("--seed", gen.seed, "instance seed");
  generate->add_option("--max-degree", gen.max_degree, "tree degree cap")
      ->check(CLI::Range(2l, 100000l));
  generate->add_option("--out", gen.out, "output system JSON")->required();

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "roll out one closed-loop trajectory to CSV");
  simulate->add_option("--system", sim.system, "system JSON")->required();
  simulate->add_option("--T", sim.T, "trajectory length")
      ->required()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "noise seed");
  simulate->add_option("--out", sim.out, "output CSV")->required();
  simulate->add_option("--sigma-w", sim.sigma_w, "process noise scale");
  simulate->add_option("--sigma-v", sim.sigma_v, "input excitation scale");
  simulate->add_option("--w-family", sim.w_family,
                       "gaussian|uniform|rademacher");
  simulate->add_option("--v-family", sim.v_family,
                       "gaussian|uniform|rademacher");

  IdentifyArgs id;
  CLI::App* identify = app.add_subcommand(
      "identify", "estimate [A B]^T from a trajectory CSV");
  identify->add_option("--trajectory", id.trajectory, "trajectory CSV")
      ->required();
  identify->add_option("--system", id.system,
                       "system JSON (needed for --lambda-rule theorem1)");
  CLI::Option* lam =
      identify->add_option("--lambda", id.lambda, "fixed penalty weight")
          ->check(CLI::PositiveNumber);
  identify->add_option("--lambda-rule", id.lambda_rule, "paper|theorem1")
      ->excludes(lam);
  identify->add_option("--delta", id.delta, "failure probability")
      ->check(CLI::Range(1e-12, 0.999999));
  identify->add_option("--tol", id.tol, "KKT tolerance")
      ->check(CLI::PositiveNumber);
  identify->add_option("--max-sweeps", id.max_sweeps, "sweep cap")
      ->check(CLI::PositiveNumber);
  identify->add_flag("--post-ls", id.post_ls,
                     "refit on the recovered support by least squares");
  identify->add_option("--out", id.out, "output JSON (default stdout)");
  identify->add_option("--sigma-w", id.sigma_w,
                       "process noise scale for the theorem1 rule");
  identify->add_option("--sigma-v", id.sigma_v,
                       "excitation scale for the theorem1 rule");

  CheckArgs chk;
  CLI::App* check = app.add_subcommand(
      "check", "stationary covariances, decay constants, assumption report");
  check->add_option("--system", chk.system, "system JSON");
  check->add_option("--sigma-w", chk.sigma_w, "process noise scale");
  check->add_option("--sigma-v", chk.sigma_v, "input excitation scale");
  check->add_option("--out", chk.out, "output JSON (default stdout)");
  check->add_option("--histogram", chk.histogram,
                    "gamma: histogram the incoherence over random instances");
  check->add_option("--generators", chk.generators,
                    "generator count for --histogram");
  check->add_option("--instances", chk.instances,
                    "instance count for --histogram")
      ->check(CLI::PositiveNumber);
  check->add_option("--bins", chk.bins, "histogram bins")
      ->check(CLI::PositiveNumber);
  check->add_option("--seed", chk.seed, "seed base for --histogram");
  check->add_option("--jobs", chk.jobs, "worker count")
      ->check(CLI::PositiveNumber);
  check->add_option("--out-dir", chk.out_dir, "CSV output directory");

  SweepArgs sw;
  CLI::App* sweep = app.add_subcommand("sweep", "batch experiments");
  sweep->require_subcommand(1);
  CLI::App* sweep_recovery = sweep->add_subcommand(
      "recovery", "support recovery vs horizon, lasso only");
  CLI::App* sweep_compare = sweep->add_subcommand(
      "compare", "lasso vs debiased lasso vs least squares");
  CLI::App* sweep_gamma = sweep->add_subcommand(
      "gamma", "incoherence histogram over sampled instances");
  for (CLI::App* sub : {sweep_recovery, sweep_compare, sweep_gamma}) {
    sub->add_option("--config", sw.config, "sweep config JSON")->required();
    sub->add_option("--seed", sw.seed, "override the config seed base");
    sub->add_option("--jobs", sw.jobs, "override the config worker count")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", sw.out, "override the config output directory");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) return run_generate(gen);
    if (*simulate) return run_simulate(sim);
    if (*identify) {
      id.lambda_set = lam->count() > 0;
      return run_identify(id);
    }
    if (*check) return run_check(chk);
    if (*sweep) {
      sw.seed_set = false;
      for (CLI::App* sub : {sweep_recovery, sweep_compare, sweep_gamma}) {
        if (sub->parsed() && sub->count("--seed") > 0) sw.seed_set = true;
      }
      if (*sweep_recovery) {
        return report_sweep(run_recovery_sweep(sweep_config(sw)));
      }
      if (*sweep_compare) {
        return report_sweep(run_estimator_comparison(sweep_config(sw)));
      }
      const GammaHistogram hist = run_gamma_histogram(sweep_config(sw));
      std::cout << "instances=" << hist.values.size()
                << " violation_fraction=" << hist.violation_fraction << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

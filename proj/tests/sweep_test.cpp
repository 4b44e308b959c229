#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "doctest.h"
#include "sparsid/assumptions.hpp"
#include "sparsid/lasso.hpp"
#include "sparsid/metrics.hpp"
#include "sparsid/post_estimation.hpp"
#include "sparsid/powergrid.hpp"
#include "sparsid/sweep.hpp"
#include "sparsid/trajectory.hpp"

using namespace sparsid;

namespace {

// Every field except the wall-clock column, for determinism comparisons.
std::string row_key(const SweepRow& r) {
  std::string key = sweep_csv_line(r);
  return key.substr(0, key.rfind(','));
}

std::vector<std::string> row_keys(const SweepResult& res) {
  std::vector<std::string> keys;
  keys.reserve(res.rows.size());
  for (const auto& r : res.rows) keys.push_back(row_key(r));
  return keys;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("lambda rule tokens") {
  CHECK(parse_lambda_rule("paper") == LambdaRule::empirical);
  CHECK(parse_lambda_rule("theorem1") == LambdaRule::theory);
  CHECK(parse_lambda_rule("fixed") == LambdaRule::fixed);
  CHECK_THROWS(parse_lambda_rule("papers"));
  CHECK_THROWS(parse_lambda_rule(""));
  for (LambdaRule rule :
       {LambdaRule::empirical, LambdaRule::theory, LambdaRule::fixed}) {
    CHECK(parse_lambda_rule(lambda_rule_token(rule)) == rule);
  }
}

TEST_CASE("load_sweep_config") {
  TempDir tmp("sparsid_config_test");
  const std::string path = (tmp.path / "cfg.json").string();

  SUBCASE("all keys round trip") {
    std::ofstream out(path);
    out << R"({"generator_counts": [4, 8], "T_grid": [100, 200],
               "trials": 2, "lambda_rule": "theorem1", "fixed_lambda": 0.25,
               "delta": 0.1, "seed_base": 7, "jobs": 2, "out_dir": "x",
               "lasso_tol": 1e-6, "max_sweeps": 500, "instances": 10,
               "bins": 5, "max_degree": 4})";
    out.close();
    const SweepConfig cfg = load_sweep_config(path);
    CHECK(cfg.generator_counts == std::vector<long>{4, 8});
    CHECK(cfg.T_grid == std::vector<long>{100, 200});
    CHECK(cfg.trials == 2);
    CHECK(cfg.lambda_rule == LambdaRule::theory);
    CHECK(cfg.fixed_lambda == 0.25);
    CHECK(cfg.delta == 0.1);
    CHECK(cfg.seed_base == 7);
    CHECK(cfg.jobs == 2);
    CHECK(cfg.out_dir == "x");
    CHECK(cfg.lasso_tol == 1e-6);
    CHECK(cfg.max_sweeps == 500);
    CHECK(cfg.instances == 10);
    CHECK(cfg.bins == 5);
    CHECK(cfg.max_degree == 4);
  }

  SUBCASE("missing keys keep their defaults") {
    std::ofstream out(path);
    out << R"({"generator_counts": [4], "T_grid": [100]})";
    out.close();
    const SweepConfig cfg = load_sweep_config(path);
    CHECK(cfg.trials == 10);
    CHECK(cfg.lambda_rule == LambdaRule::empirical);
    CHECK(cfg.fixed_lambda == 0.0);
    CHECK(cfg.delta == 0.05);
    CHECK(cfg.seed_base == 0);
    CHECK(cfg.jobs == 1);
    CHECK(cfg.out_dir.empty());
    CHECK(cfg.lasso_tol == 1e-8);
    CHECK(cfg.max_sweeps == 100000);
    CHECK(cfg.instances == 200);
    CHECK(cfg.bins == 50);
    CHECK(cfg.max_degree == 10);
  }

  SUBCASE("unknown keys fail loudly") {
    std::ofstream out(path);
    out << R"({"generator_count": [4]})";
    out.close();
    CHECK_THROWS(load_sweep_config(path));
  }

  SUBCASE("missing file") {
    CHECK_THROWS(load_sweep_config((tmp.path / "nope.json").string()));
  }
}

TEST_CASE("csv rendering") {
  CHECK(sweep_csv_header() ==
        "N_g,n,m,T,RLT,trial,estimator,mismatch,RME,linf_error,"
        "l2_error_normalized,recovery_success,status,seconds");

  SUBCASE("negative sentinels render as empty cells") {
    SweepRow row;
    row.N_g = 3;
    row.n = -1;
    row.m = -1;
    row.T = -1;
    row.trial = 1;
    row.status = "error: boom";
    row.seconds = 0.5;
    // metrics keep their -1 defaults; RLT is empty because n + m <= 0
    CHECK(sweep_csv_line(row) == "3,,,,,1,,,,,,,error: boom,0.500000");
  }

  SUBCASE("populated row renders every field") {
    SweepRow row;
    row.N_g = 2;
    row.n = 4;
    row.m = 2;
    row.T = 12;
    row.RLT = 2.0;
    row.trial = 0;
    row.estimator = "lasso";
    row.mismatch = 3;
    row.RME = 0.125;
    row.linf_error = 0.5;
    row.l2_error_normalized = 0.25;
    row.recovery_success = 0;
    row.seconds = 1.25;
    CHECK(sweep_csv_line(row) ==
          "2,4,2,12,2,0,lasso,3,0.125,0.5,0.25,0,ok,1.250000");
  }
}

TEST_CASE("recovery sweep row accounting and ordering") {
  SweepConfig cfg;
  cfg.generator_counts = {2, 3};
  cfg.T_grid = {60, 120};
  cfg.trials = 2;
  cfg.seed_base = 11;
  const SweepResult res = run_recovery_sweep(cfg);
  CHECK_FALSE(res.any_hard_failure);
  REQUIRE(res.rows.size() == 8);  // 2 sizes x 2 trials x 2 horizons

  size_t idx = 0;
  for (long N_g : {2L, 3L}) {
    for (long trial : {0L, 1L}) {
      for (long T : {60L, 120L}) {
        const SweepRow& row = res.rows[idx++];
        CHECK(row.N_g == N_g);
        CHECK(row.trial == trial);
        CHECK(row.T == T);
        CHECK(row.n == 2 * N_g);
        CHECK(row.m == N_g);
        CHECK(row.RLT == doctest::Approx(double(T) / double(3 * N_g)));
        CHECK(row.estimator == "lasso");
        CHECK(row.status == "ok");
        // relative mismatch lives on the unit interval by construction
        CHECK(row.RME >= 0.0);
        CHECK(row.RME <= 1.0);
        CHECK(row.RME == doctest::Approx(double(row.mismatch) /
                                         double((row.n + row.m) * row.n)));
        CHECK(row.linf_error >= 0.0);
        CHECK(row.l2_error_normalized >= 0.0);
        CHECK(row.recovery_success == (row.mismatch == 0 ? 1 : 0));
      }
    }
  }
}

TEST_CASE("mean relative mismatch does not increase with the horizon") {
  SweepConfig cfg;
  cfg.generator_counts = {20};
  cfg.T_grid = {100, 400, 1600};
  cfg.trials = 3;
  cfg.seed_base = 21;
  const SweepResult res = run_recovery_sweep(cfg);
  REQUIRE(res.rows.size() == 9);

  std::vector<double> mean_rme(3, 0.0);
  for (const auto& row : res.rows) {
    const size_t t = row.T == 100 ? 0 : row.T == 400 ? 1 : 2;
    mean_rme[t] += row.RME / 3.0;
  }
  CHECK(mean_rme[0] >= mean_rme[1]);
  CHECK(mean_rme[1] >= mean_rme[2]);
}

TEST_CASE("reruns are field-identical apart from wall time") {
  SweepConfig cfg;
  cfg.generator_counts = {3};
  cfg.T_grid = {80, 160};
  cfg.trials = 2;
  cfg.seed_base = 33;
  const SweepResult a = run_recovery_sweep(cfg);
  const SweepResult b = run_recovery_sweep(cfg);
  CHECK(row_keys(a) == row_keys(b));
}

TEST_CASE("worker count does not change the output") {
  SweepConfig cfg;
  cfg.generator_counts = {2, 3};
  cfg.T_grid = {50, 100};
  cfg.trials = 2;
  cfg.seed_base = 5;
  cfg.jobs = 1;
  const SweepResult serial = run_estimator_comparison(cfg);
  cfg.jobs = 3;
  const SweepResult pooled = run_estimator_comparison(cfg);
  CHECK(row_keys(serial) == row_keys(pooled));
}

TEST_CASE("estimator comparison flags the underdetermined regime") {
  SweepConfig cfg;
  cfg.generator_counts = {2};  // n + m = 6
  cfg.T_grid = {4, 8};
  cfg.trials = 1;
  cfg.seed_base = 2;
  const SweepResult res = run_estimator_comparison(cfg);
  REQUIRE(res.rows.size() == 6);  // three estimators per horizon
  CHECK_FALSE(res.any_hard_failure);

  for (const auto& row : res.rows) {
    if (row.estimator == "ls" && row.T == 4) {
      CHECK(row.status == "underdetermined");
      CHECK(row.mismatch == -1);         // metrics stay empty
      CHECK(row.recovery_success == -1);
    } else if (row.estimator == "ls") {
      CHECK(row.status == "ok");
      CHECK(row.mismatch >= 0);
    } else {
      // lasso and its debiased variant run at every horizon
      CHECK(row.mismatch >= 0);
    }
  }
  CHECK(res.rows[0].estimator == "lasso");
  CHECK(res.rows[1].estimator == "lasso_ls");
  CHECK(res.rows[2].estimator == "ls");
}

TEST_CASE("noiseless pipeline composition reaches machine-level accuracy") {
  // With the process noise switched off the regression is exact, so the
  // whole chain (simulate, lasso at a tiny lambda, restricted refit) must
  // reproduce the true parameters almost exactly.
  const GridInstance inst = sample_grid_instance(3, 8);
  const NoiseSpec w = NoiseSpec::gaussian(0.0);
  const NoiseSpec v = NoiseSpec::gaussian(std::sqrt(0.05));
  const TrajectoryData traj = simulate_closed_loop(inst.system, w, v, 400, 15);
  const RegressionData data = assemble_regression(inst.system, traj);
  const Eigen::MatrixXd Psi_star = inst.system.psi_star();

  LassoOptions opts;
  opts.lambda = 1e-8;
  const EstimateResult est = estimate_lasso(data, opts);
  REQUIRE(est.converged);
  CHECK(linf_error(est.Psi_hat, Psi_star) <= 1e-6);
  CHECK(normalized_l2_error(est.Psi_hat, Psi_star) <= 1e-6);

  const RefinedEstimate refined =
      restricted_least_squares(data, support_sets(est.Psi_hat, 1e-7).supports);
  REQUIRE(refined.all_ok);
  CHECK(linf_error(refined.Psi_hat, Psi_star) <= 1e-6);
  CHECK(normalized_l2_error(refined.Psi_hat, Psi_star) <= 1e-6);
  CHECK(mismatch_error(refined.Psi_hat, Psi_star, 1e-7) == 0);
}

TEST_CASE("gamma histogram") {
  SweepConfig cfg;
  cfg.generator_counts = {5};
  cfg.instances = 2;
  cfg.bins = 4;
  cfg.seed_base = 9;
  const GammaHistogram hist = run_gamma_histogram(cfg);

  REQUIRE(hist.values.size() == 2);
  REQUIRE(hist.seeds.size() == 2);
  CHECK(hist.seeds[0] != hist.seeds[1]);
  REQUIRE(hist.bin_edges.size() == 5);
  for (size_t b = 1; b < hist.bin_edges.size(); ++b) {
    CHECK(hist.bin_edges[b] > hist.bin_edges[b - 1]);
  }
  long total = 0;
  for (long c : hist.counts) total += c;
  CHECK(total == 2);
  long violations = 0;
  for (double g : hist.values) {
    if (g <= 0.0) ++violations;
  }
  CHECK(hist.violation_fraction == doctest::Approx(violations / 2.0));

  SUBCASE("deterministic in the seed base") {
    const GammaHistogram again = run_gamma_histogram(cfg);
    CHECK(again.values == hist.values);
  }
}

TEST_CASE("sweep artifacts land in the output directory") {
  TempDir tmp("sparsid_sweep_out_test");
  SweepConfig cfg;
  cfg.generator_counts = {2};
  cfg.T_grid = {60};
  cfg.trials = 2;
  cfg.seed_base = 4;
  cfg.out_dir = tmp.path.string();
  const SweepResult res = run_recovery_sweep(cfg);

  const std::filesystem::path csv_path = tmp.path / "results.csv";
  REQUIRE(std::filesystem::exists(csv_path));
  std::ifstream csv(csv_path);
  std::string line;
  REQUIRE(std::getline(csv, line));
  CHECK(line == sweep_csv_header());
  size_t data_lines = 0;
  std::vector<std::string> lines;
  while (std::getline(csv, line)) {
    if (!line.empty()) {
      lines.push_back(line);
      ++data_lines;
    }
  }
  CHECK(data_lines == res.rows.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    CHECK(lines[i] == sweep_csv_line(res.rows[i]));
  }

  const std::filesystem::path meta_path = tmp.path / "meta.json";
  REQUIRE(std::filesystem::exists(meta_path));
  std::ifstream meta_in(meta_path);
  nlohmann::json meta;
  meta_in >> meta;
  CHECK(meta.at("command") == "sweep recovery");
  CHECK(meta.at("rows") == res.rows.size());
  CHECK(meta.at("any_hard_failure") == false);
  CHECK(meta.at("config").at("trials") == 2);
  CHECK(meta.at("config").at("lambda_rule") == "paper");

  SUBCASE("gamma artifacts") {
    TempDir tmp2("sparsid_gamma_out_test");
    SweepConfig gcfg;
    gcfg.generator_counts = {4};
    gcfg.instances = 3;
    gcfg.bins = 2;
    gcfg.out_dir = tmp2.path.string();
    run_gamma_histogram(gcfg);
    CHECK(std::filesystem::exists(tmp2.path / "gamma.csv"));
    CHECK(std::filesystem::exists(tmp2.path / "histogram.csv"));
    CHECK(std::filesystem::exists(tmp2.path / "meta.json"));

    std::ifstream gcsv(tmp2.path / "gamma.csv");
    size_t glines = 0;
    while (std::getline(gcsv, line)) {
      if (!line.empty()) ++glines;
    }
    CHECK(glines == 4);  // header plus one line per instance
  }
}

TEST_CASE("config validation") {
  SweepConfig cfg;
  CHECK_THROWS(run_recovery_sweep(cfg));  // empty grids
  cfg.generator_counts = {2};
  cfg.T_grid = {50};
  cfg.trials = 0;
  CHECK_THROWS(run_recovery_sweep(cfg));
  cfg.trials = 1;
  cfg.lambda_rule = LambdaRule::fixed;
  CHECK_THROWS(run_recovery_sweep(cfg));  // fixed rule without a lambda
  cfg.fixed_lambda = 0.1;
  CHECK_NOTHROW(run_recovery_sweep(cfg));
}

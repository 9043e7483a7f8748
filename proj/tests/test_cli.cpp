#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "flmcp/cli.hpp"
#include "flmcp/estimator.hpp"
#include "flmcp/limit_law.hpp"
#include "flmcp/rng.hpp"
#include "flmcp/seqproc.hpp"
#include "flmcp/simlab.hpp"

using namespace flmcp;

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int exit_code = 0;
  std::string out;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream captured;
  std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
  CliRun result;
  result.exit_code = run_cli(args);
  std::cout.rdbuf(old);
  result.out = captured.str();
  return result;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_dataset_csv(const FunctionalDataset& data, const fs::path& path) {
  std::ofstream out(path);
  out << "y";
  for (Eigen::Index j = 0; j < data.grid().size(); ++j)
    out << ',' << fmt17(data.grid()[j]);
  out << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << fmt17(data.responses()[i]);
    for (Eigen::Index j = 0; j < data.grid().size(); ++j)
      out << ',' << fmt17(data.curves()(i, j));
    out << '\n';
  }
}

double verdict_field(const std::string& line, const std::string& key) {
  const auto pos = line.find(key + "=");
  REQUIRE(pos != std::string::npos);
  return std::stod(line.substr(pos + key.size() + 1));
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2, help with 0") {
  CHECK(run({"--help"}).exit_code == 0);
  CHECK(run({"critval", "--help"}).exit_code == 0);
  CHECK(run({}).exit_code == 2);
  CHECK(run({"bogus-verb"}).exit_code == 2);
  CHECK(run({"simulate", "--bogus-flag", "1"}).exit_code == 2);
  CHECK(run({"test"}).exit_code == 2);  // missing --table
  const auto dir = fresh_dir("flmcp_cli_usage");
  CHECK(run({"test", "--table", (dir / "none.qtab").string()}).exit_code ==
        2);  // neither --residuals nor --data
}

TEST_CASE("runtime failures exit with 1") {
  const auto dir = fresh_dir("flmcp_cli_runtime");
  CHECK(run({"fit", "--data", (dir / "missing.csv").string()}).exit_code == 1);
  const auto bad = dir / "bad.csv";
  std::ofstream(bad) << "not,a,number\nx,y,z\n";
  CHECK(run({"fit", "--data", bad.string()}).exit_code == 1);
  // residual file with a non-numeric line
  const auto res = dir / "res.csv";
  std::ofstream(res) << "1.0\nnope\n";
  const auto table = dir / "t.qtab";
  CHECK(run({"critval", "-M", "50", "-R", "1000", "--out",
             (dir / "t").string()}).exit_code == 0);
  CHECK(run({"test", "--residuals", res.string(), "--table",
             (dir / "t_ks.qtab").string()}).exit_code == 1);
}

TEST_CASE("critval output is consistent with a manual quantile lookup") {
  const auto dir = fresh_dir("flmcp_cli_critval");
  const auto result = run({"--seed", "21", "critval", "-M", "50", "-R",
                           "2000", "--out", (dir / "cv").string()});
  CHECK(result.exit_code == 0);

  const QuantileTable table = load_table((dir / "cv_ks.qtab").string());
  CHECK(table.grid_resolution == 50);
  CHECK(table.replications == 2000);
  CHECK(table.seed == 21);

  // levels CSV agrees with quantile() on the loaded table
  const std::string levels = read_file(dir / "cv_levels.csv");
  char expected[64];
  std::snprintf(expected, sizeof(expected), "ks,%.17g,%.17g", 0.95,
                quantile(table, 0.95));
  CHECK(levels.find(expected) != std::string::npos);

  // decision consistency: a residual file tested at level 0.05 rejects
  // exactly when the statistic exceeds that 0.95 quantile
  const auto res_path = dir / "res.csv";
  {
    Rng rng(5);
    std::ofstream out(res_path);
    out << "# iid residuals\n";
    for (int i = 0; i < 200; ++i) out << fmt17(rng.normal()) << '\n';
  }
  const CliRun verdict =
      run({"-o", dir.string(), "test", "--residuals", res_path.string(),
           "--table", (dir / "cv_ks.qtab").string()});
  CHECK(verdict.exit_code == 0);
  const double stat = verdict_field(verdict.out, "statistic");
  const double crit = verdict_field(verdict.out, "critical_value");
  CHECK(crit == doctest::Approx(quantile(table, 0.95)).epsilon(1e-15));
  const bool reject = verdict.out.find("reject=true") != std::string::npos;
  CHECK(reject == (stat > crit));

  // process CSV exists with one line per k
  const std::string proc = read_file(dir / "seqproc.csv");
  CHECK(proc.rfind("t,D,C", 0) == 0);
  CHECK(std::count(proc.begin(), proc.end(), '\n') == 200);
}

TEST_CASE("identical residuals give statistic 0 and accept") {
  const auto dir = fresh_dir("flmcp_cli_flat");
  CHECK(run({"critval", "-M", "50", "-R", "1000", "--out",
             (dir / "cv").string()}).exit_code == 0);
  const auto res_path = dir / "flat.csv";
  {
    std::ofstream out(res_path);
    for (int i = 0; i < 50; ++i) out << "3.25\n";
  }
  const CliRun verdict =
      run({"-o", dir.string(), "test", "--residuals", res_path.string(),
           "--table", (dir / "cv_ks.qtab").string()});
  CHECK(verdict.exit_code == 0);
  CHECK(verdict.out.find("statistic=0 ") != std::string::npos);
  CHECK(verdict.out.find("reject=false") != std::string::npos);
  CHECK(verdict_field(verdict.out, "p_value") == 1.0);
}

TEST_CASE("simulate is byte-identical across runs and worker counts") {
  const auto dir = fresh_dir("flmcp_cli_sim");
  CHECK(run({"critval", "-M", "50", "-R", "1000", "--out",
             (dir / "cv").string()}).exit_code == 0);
  const std::string table = (dir / "cv_ks.qtab").string();

  const CliRun r1 = run({"--seed", "1", "-o", (dir / "a").string(),
                         "simulate", "--family", "var_change", "--delta", "0",
                         "0.8", "--n", "50", "--reps", "60", "--table",
                         table});
  CHECK(r1.exit_code == 0);
  ::setenv("FLMCP_WORKERS", "1", 1);
  const CliRun r2 = run({"--seed", "1", "-o", (dir / "b").string(),
                         "simulate", "--family", "var_change", "--delta", "0",
                         "0.8", "--n", "50", "--reps", "60", "--table",
                         table});
  ::unsetenv("FLMCP_WORKERS");
  CHECK(r2.exit_code == 0);
  CHECK(r1.out == r2.out);
  CHECK(read_file(dir / "a/rejections_var_change.csv") ==
        read_file(dir / "b/rejections_var_change.csv"));
  CHECK(read_file(dir / "a/rejections_var_change.svg") ==
        read_file(dir / "b/rejections_var_change.svg"));
  CHECK(!read_file(dir / "a/rejections_var_change.csv").empty());

  // plot re-emits an identical figure from the CSV
  const CliRun replot =
      run({"plot", "--rows", (dir / "a/rejections_var_change.csv").string(),
           "--out", (dir / "replot").string()});
  CHECK(replot.exit_code == 0);
  CHECK(read_file(dir / "replot.svg") ==
        read_file(dir / "a/rejections_var_change.svg"));
  CHECK(read_file(dir / "replot.csv") ==
        read_file(dir / "a/rejections_var_change.csv"));
}

TEST_CASE("fit emits a report and beta curve") {
  const auto dir = fresh_dir("flmcp_cli_fit");
  // small synthetic dataset through the simulation generator
  const Eigen::VectorXd grid = equidistant_grid(80);
  Rng rng(404);
  const Eigen::MatrixXd curves = gen_covariates(40, grid, rng);
  const GridFunction gamma = gamma_coefficient(3.0, 1.0 / 3.0, grid);
  Eigen::VectorXd y =
      curves * trapezoid_weights(grid).cwiseProduct(gamma.values());
  for (int i = 0; i < 40; ++i) y[i] += 0.5 * rng.normal();
  write_dataset_csv(FunctionalDataset(grid, curves, y), dir / "data.csv");

  const CliRun r = run({"-o", dir.string(), "fit", "--data",
                        (dir / "data.csv").string(), "--basis-size", "15"});
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("alpha_hat") != std::string::npos);
  const std::string report = read_file(dir / "fit_report.json");
  CHECK(report.find("\"lambda\"") != std::string::npos);
  CHECK(report.find("\"edf\"") != std::string::npos);
  const std::string beta = read_file(dir / "beta_hat.csv");
  CHECK(beta.rfind("t,beta", 0) == 0);
  CHECK(std::count(beta.begin(), beta.end(), '\n') == 81);
}

TEST_CASE("chained fit+test equals the fused simulate path") {
  const auto dir = fresh_dir("flmcp_cli_chain");
  CHECK(run({"critval", "-M", "50", "-R", "1500", "--out",
             (dir / "cv").string()}).exit_code == 0);
  const QuantileTable table = load_table((dir / "cv_ks.qtab").string());

  // reconstruct repetition 0 of the experiment exactly
  SimConfig config;
  config.n = 60;
  config.grid_points = 120;
  config.repetitions = 1;
  config.error_spec = {ErrorFamily::VarChange, 1.0};
  config.seed = 31;
  config.basis_size = 20;
  const RejectionRow fused = run_experiment(config, table);

  const Eigen::VectorXd grid = equidistant_grid(config.grid_points);
  Rng rng(derive_seed(config.seed, 0));
  const Eigen::MatrixXd curves = gen_covariates(config.n, grid, rng);
  const Eigen::VectorXd errors =
      gen_errors(config.error_spec, config.n / 2, config.n - config.n / 2,
                 rng);
  const GridFunction gamma = gamma_coefficient(3.0, 1.0 / 3.0, grid);
  const Eigen::VectorXd y =
      curves * trapezoid_weights(grid).cwiseProduct(gamma.values()) + errors;
  write_dataset_csv(FunctionalDataset(grid, curves, y), dir / "rep0.csv");

  const CliRun verdict = run({"-o", dir.string(), "test", "--data",
                              (dir / "rep0.csv").string(), "--table",
                              (dir / "cv_ks.qtab").string(), "--basis-size",
                              "20"});
  CHECK(verdict.exit_code == 0);
  const bool cli_reject =
      verdict.out.find("reject=true") != std::string::npos;
  CHECK(cli_reject == (fused.reject_rate == 1.0));
  if (cli_reject) {
    CHECK(verdict_field(verdict.out, "theta_hat") ==
          doctest::Approx(fused.mean_theta_rejected).epsilon(1e-15));
  }
}

}  // TEST_SUITE

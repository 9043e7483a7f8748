#include "flmcp/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "flmcp/errors.hpp"
#include "flmcp/estimator.hpp"
#include "flmcp/figure.hpp"
#include "flmcp/grid_function.hpp"
#include "flmcp/limit_law.hpp"
#include "flmcp/seqproc.hpp"
#include "flmcp/simlab.hpp"

namespace flmcp {

namespace {

namespace fs = std::filesystem;

std::string fmt(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

struct FitFlags {
  int basis_size = 40;
  int degree = 5;
  int penalty_order = 3;
  int lambda_count = 50;
  double lambda_lo = 1e-10;
  double lambda_hi = 1e2;

  void attach(CLI::App* cmd) {
    cmd->add_option("--basis-size", basis_size, "Spline basis size K");
    cmd->add_option("--degree", degree, "Spline degree");
    cmd->add_option("--penalty-order", penalty_order,
                    "Derivative order m of the roughness penalty");
    cmd->add_option("--lambda-count", lambda_count,
                    "Number of grid points for the GCV search");
    cmd->add_option("--lambda-min", lambda_lo, "Smallest lambda on the grid");
    cmd->add_option("--lambda-max", lambda_hi, "Largest lambda on the grid");
  }

  FlmFit fit(const FunctionalDataset& data) const {
    const SplineBasis basis(basis_size, degree, penalty_order);
    return gcv_select(data, basis,
                      default_lambda_grid(lambda_count, lambda_lo, lambda_hi));
  }
};

Eigen::VectorXd load_residual_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open file: " + path);
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    bool blank = true;
    for (char c : line)
      if (c != ' ' && c != '\t' && c != '\r') { blank = false; break; }
    if (blank || line[0] == '#') continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(line, &used);
      while (used < line.size() &&
             (line[used] == ' ' || line[used] == '\t' || line[used] == '\r'))
        ++used;
      if (used != line.size()) throw std::invalid_argument(line);
      values.push_back(v);
    } catch (const std::invalid_argument&) {
      throw FormatError("non-numeric residual at line " +
                        std::to_string(line_no) + ": '" + line + "'");
    }
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = values[i];
  return out;
}

void write_fit_outputs(const FlmFit& fit, const FunctionalDataset& data,
                       const fs::path& out_dir, bool verbose) {
  nlohmann::json report;
  report["alpha_hat"] = fit.alpha_hat;
  report["lambda"] = fit.lambda;
  report["gcv_score"] = fit.gcv_score;
  report["edf"] = fit.edf;
  report["n"] = static_cast<int>(data.n());
  report["basis"] = {{"size", fit.basis.size()},
                     {"degree", fit.basis.degree()},
                     {"penalty_order", fit.basis.penalty_order()}};

  fs::create_directories(out_dir);
  const fs::path report_path = out_dir / "fit_report.json";
  {
    std::ofstream out(report_path);
    if (!out) throw FormatError("cannot open file for writing: " +
                                report_path.string());
    out << report.dump(2) << '\n';
  }
  const fs::path beta_path = out_dir / "beta_hat.csv";
  {
    std::ofstream out(beta_path);
    if (!out) throw FormatError("cannot open file for writing: " +
                                beta_path.string());
    out << "t,beta\n";
    const Eigen::VectorXd beta = beta_on_grid(fit, data.grid());
    for (Eigen::Index j = 0; j < data.grid().size(); ++j)
      out << fmt(data.grid()[j]) << ',' << fmt(beta[j]) << '\n';
  }
  std::cout << report.dump(2) << '\n';
  if (verbose)
    std::cerr << "wrote " << report_path.string() << " and "
              << beta_path.string() << '\n';
}

void write_process_csv(const SeqProcessTable& table, const fs::path& path) {
  fs::create_directories(path.parent_path().empty() ? "."
                                                    : path.parent_path());
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open file for writing: " +
                              path.string());
  out << "t,D,C\n";
  for (Eigen::Index k = 0; k < table.D.size(); ++k)
    out << fmt(static_cast<double>(k + 1) / table.n) << ',' << fmt(table.D[k])
        << ',' << fmt(table.C[k]) << '\n';
}

std::string table_path_for(const std::string& prefix, StatisticKind kind) {
  std::string name = to_string(kind);
  for (char& c : name)
    if (c == '-') c = '_';
  return prefix + "_" + name + ".qtab";
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"change-point tests for the error distribution of functional "
               "linear models"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  bool verbose = false;
  std::string out_dir = ".";
  // global flags remain reachable after a subcommand name
  app.fallthrough();
  app.add_option("--seed", seed, "Master seed for Monte Carlo verbs")
      ->capture_default_str();
  app.add_flag("-v,--verbose", verbose, "Chatty diagnostics on stderr");
  app.add_option("-o,--out-dir", out_dir, "Directory for output files")
      ->capture_default_str();

  // fit
  auto* fit_cmd = app.add_subcommand(
      "fit", "Fit the penalized functional linear model with GCV");
  std::string fit_data_path;
  FitFlags fit_flags;
  fit_cmd->add_option("--data", fit_data_path, "Dataset CSV")->required();
  fit_flags.attach(fit_cmd);

  // test
  auto* test_cmd = app.add_subcommand(
      "test", "Change-point test on residuals or on a dataset");
  std::string test_residuals_path, test_data_path, test_table_path;
  std::string test_kind = "ks";
  std::string process_csv;
  double test_level = 0.05;
  FitFlags test_fit_flags;
  auto* res_opt = test_cmd->add_option("--residuals", test_residuals_path,
                                       "Residual CSV, one value per line");
  auto* data_opt = test_cmd->add_option(
      "--data", test_data_path, "Dataset CSV (fit + residuals + test)");
  res_opt->excludes(data_opt);
  test_cmd->add_option("--table", test_table_path, "Quantile table file")
      ->required();
  test_cmd->add_option("--kind", test_kind, "ks, cvm-sup or cvm-int")
      ->capture_default_str();
  test_cmd->add_option("--level", test_level, "Test level in (0,1)")
      ->capture_default_str();
  test_cmd->add_option("--process-csv", process_csv,
                       "Where to write the (t, D, C) table "
                       "(default <out-dir>/seqproc.csv)");
  test_fit_flags.attach(test_cmd);

  // critval
  auto* critval_cmd = app.add_subcommand(
      "critval", "Tabulate null-limit critical values by Monte Carlo");
  int cv_grid = 200;
  std::int64_t cv_reps = 100000;
  std::string cv_out;
  critval_cmd->add_option("-M,--grid-resolution", cv_grid,
                          "Lattice resolution of the simulated sheet")
      ->capture_default_str();
  critval_cmd->add_option("-R,--replications", cv_reps,
                          "Monte Carlo replications")
      ->capture_default_str();
  critval_cmd->add_option("--out", cv_out,
                          "Output prefix (default <out-dir>/critval)");

  // simulate
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Rejection-probability experiments");
  std::string sim_family;
  std::vector<double> sim_deltas{0.0};
  std::vector<int> sim_ns{100};
  int sim_reps = 500;
  double sim_level = 0.05;
  std::string sim_kind = "ks";
  std::string sim_table_path;
  double sim_change_fraction = 0.5;
  bool sim_pointwise = false;
  FitFlags sim_fit_flags;
  sim_cmd->add_option("--family", sim_family,
                      "normal, mix_mean, mix_var, skew or var_change")
      ->required();
  sim_cmd->add_option("--delta", sim_deltas, "Change sizes")
      ->capture_default_str();
  sim_cmd->add_option("--n", sim_ns, "Sample sizes")->capture_default_str();
  sim_cmd->add_option("--reps", sim_reps, "Repetitions per cell")
      ->capture_default_str();
  sim_cmd->add_option("--level", sim_level, "Test level")
      ->capture_default_str();
  sim_cmd->add_option("--kind", sim_kind, "Test statistic kind")
      ->capture_default_str();
  sim_cmd->add_option("--table", sim_table_path, "Quantile table file")
      ->required();
  sim_cmd->add_option("--change-fraction", sim_change_fraction,
                      "Relative change position")
      ->capture_default_str();
  sim_cmd->add_flag("--pointwise-centering", sim_pointwise,
                    "Center the covariate generator pointwise in t");
  sim_fit_flags.attach(sim_cmd);

  // plot
  auto* plot_cmd = app.add_subcommand(
      "plot", "Re-emit the figure for a rejection CSV");
  std::string plot_rows_path, plot_out;
  plot_cmd->add_option("--rows", plot_rows_path, "Rejection CSV")->required();
  plot_cmd->add_option("--out", plot_out,
                       "Output prefix (default <out-dir>/replot)");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("flmcp");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (fit_cmd->parsed()) {
      const FunctionalDataset data = load_dataset(fit_data_path);
      const FlmFit fit = fit_flags.fit(data);
      write_fit_outputs(fit, data, out_dir, verbose);
      return 0;
    }

    if (test_cmd->parsed()) {
      if (test_residuals_path.empty() && test_data_path.empty()) {
        std::cerr << "test needs --residuals or --data\n";
        return 2;
      }
      const StatisticKind kind = statistic_kind_from_string(test_kind);
      const QuantileTable table = load_table(test_table_path);

      Eigen::VectorXd res;
      if (!test_residuals_path.empty()) {
        res = load_residual_file(test_residuals_path);
      } else {
        const FunctionalDataset data = load_dataset(test_data_path);
        const FlmFit fit = test_fit_flags.fit(data);
        res = residuals(fit, data);
      }
      const ResidualSample sample(res);
      const TestResult result = run_test(sample, kind, test_level, table);
      const fs::path csv_path = process_csv.empty()
                                    ? fs::path(out_dir) / "seqproc.csv"
                                    : fs::path(process_csv);
      write_process_csv(seq_process(sample), csv_path);
      std::cout << "kind=" << to_string(result.kind)
                << " statistic=" << fmt(result.statistic)
                << " critical_value=" << fmt(result.critical_value)
                << " p_value=" << fmt(result.p_value)
                << " reject=" << (result.reject ? "true" : "false")
                << " theta_hat=" << fmt(result.theta_hat)
                << " n=" << result.n << '\n';
      return 0;
    }

    if (critval_cmd->parsed()) {
      const std::string prefix =
          cv_out.empty() ? (fs::path(out_dir) / "critval").string() : cv_out;
      fs::create_directories(fs::path(prefix).parent_path().empty()
                                 ? "."
                                 : fs::path(prefix).parent_path());
      if (verbose)
        std::cerr << "simulating " << cv_reps << " sheets at resolution "
                  << cv_grid << '\n';
      const TuckedSheetTables tables =
          simulate_tucked_sheet_functionals(cv_grid, cv_reps, seed);
      const QuantileTable* all[] = {&tables.ks, &tables.cvm_sup,
                                    &tables.cvm_int};
      std::ofstream levels_csv(prefix + "_levels.csv");
      if (!levels_csv)
        throw FormatError("cannot open file for writing: " + prefix +
                          "_levels.csv");
      levels_csv << "kind,level,value\n";
      for (const QuantileTable* t : all) {
        save_table(*t, table_path_for(prefix, t->kind));
        for (const auto& [level, value] : t->quantiles)
          levels_csv << to_string(t->kind) << ',' << fmt(level) << ','
                     << fmt(value) << '\n';
      }
      std::cout << "wrote " << table_path_for(prefix, StatisticKind::KS)
                << " " << table_path_for(prefix, StatisticKind::CvMSup) << " "
                << table_path_for(prefix, StatisticKind::CvMInt) << " "
                << prefix + "_levels.csv" << '\n';
      return 0;
    }

    if (sim_cmd->parsed()) {
      const ErrorFamily family = error_family_from_string(sim_family);
      const QuantileTable table = load_table(sim_table_path);
      std::vector<RejectionRow> rows;
      for (int n : sim_ns) {
        for (double delta : sim_deltas) {
          SimConfig config;
          config.n = n;
          config.error_spec = {family, delta};
          config.repetitions = sim_reps;
          config.level = sim_level;
          config.seed = seed;
          config.kind = statistic_kind_from_string(sim_kind);
          config.change_fraction = sim_change_fraction;
          config.pointwise_centering = sim_pointwise;
          config.basis_size = sim_fit_flags.basis_size;
          config.degree = sim_fit_flags.degree;
          config.penalty_order = sim_fit_flags.penalty_order;
          config.lambda_count = sim_fit_flags.lambda_count;
          config.lambda_lo = sim_fit_flags.lambda_lo;
          config.lambda_hi = sim_fit_flags.lambda_hi;
          const RejectionRow row = run_experiment(config, table);
          rows.push_back(row);
          std::cout << "family=" << to_string(row.family)
                    << " delta=" << fmt(row.delta) << " n=" << row.n
                    << " reject_rate=" << fmt(row.reject_rate)
                    << " mc_stderr=" << fmt(row.mc_stderr)
                    << " failed_fits=" << row.failed_fits << '\n';
        }
      }
      fs::create_directories(out_dir);
      const std::string prefix =
          (fs::path(out_dir) / ("rejections_" + to_string(family))).string();
      const FigureFiles files = emit_figure_data(rows, prefix);
      if (verbose)
        std::cerr << "wrote " << files.csv_path << " and " << files.svg_path
                  << '\n';
      return 0;
    }

    if (plot_cmd->parsed()) {
      const std::vector<RejectionRow> rows =
          load_rejection_rows(plot_rows_path);
      const std::string prefix =
          plot_out.empty() ? (fs::path(out_dir) / "replot").string()
                           : plot_out;
      fs::create_directories(fs::path(prefix).parent_path().empty()
                                 ? "."
                                 : fs::path(prefix).parent_path());
      const FigureFiles files = emit_figure_data(rows, prefix);
      std::cout << "wrote " << files.csv_path << " and " << files.svg_path
                << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace flmcp

#ifndef FLMCP_SIMLAB_HPP_
#define FLMCP_SIMLAB_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "flmcp/grid_function.hpp"
#include "flmcp/limit_law.hpp"
#include "flmcp/rng.hpp"
#include "flmcp/statistic_kind.hpp"

namespace flmcp {

/// Error-distribution designs. All change families start from the pre-change
/// law and switch after the change index:
///   NormalStd  N(0,1) throughout (pure null)
///   MixMean    N(0,1) -> even mixture of N(-2d,1), N(2d,1)
///   MixVar     N(0,1) -> even mixture of N(0,(1-d)^2), N(0,2-(1-d)^2)
///   Skew       N(0,1) -> skew-normal with shape 10d, moment-matched to
///              mean 0 and variance 1
///   VarChange  N(0,0.25) -> N(0,(0.5+d)^2)
enum class ErrorFamily { NormalStd, MixMean, MixVar, Skew, VarChange };

std::string to_string(ErrorFamily family);
ErrorFamily error_family_from_string(const std::string& name);

struct ErrorSpec {
  ErrorFamily family = ErrorFamily::NormalStd;
  double delta = 0.0;

  /// Throws ConfigError on negative delta or a MixVar delta whose
  /// complementary variance 2-(1-delta)^2 would go negative.
  void validate() const;
};

struct SimConfig {
  int n = 100;
  int grid_points = 300;
  double change_fraction = 0.5;  // change index floor(n * fraction)
  ErrorSpec error_spec;
  int repetitions = 500;
  double level = 0.05;
  std::uint64_t seed = 0;
  StatisticKind kind = StatisticKind::KS;
  // Covariate centering: the generator subtracts the scalar constant
  // E[B sin((5-B)2pi) - M]; the switch centers pointwise in t instead.
  bool pointwise_centering = false;
  // Estimator settings.
  int basis_size = 40;
  int degree = 5;
  int penalty_order = 3;
  int lambda_count = 50;
  double lambda_lo = 1e-10;
  double lambda_hi = 1e2;

  void validate() const;
};

/// One cell of a rejection-probability experiment.
struct RejectionRow {
  ErrorFamily family = ErrorFamily::NormalStd;
  double delta = 0.0;
  int n = 0;
  int repetitions = 0;
  double level = 0.0;
  double reject_rate = 0.0;
  double mc_stderr = 0.0;
  double mean_theta_rejected = 0.0;    // NaN when nothing was rejected
  double median_theta_rejected = 0.0;  // NaN when nothing was rejected
  int failed_fits = 0;
};

Eigen::VectorXd equidistant_grid(int points);

/// E[B sin((5-B)2pi)] for B ~ U[0,5], by cached numerical integration.
double covariate_centering_mean();

/// n iid covariate curves, one per row:
/// X(t) = (1/2) sum_{l=1}^5 (B_l sin(t(5-B_l)2pi) - M_l - centering)
/// with B_l ~ U[0,5], M_l ~ U[0,2pi].
Eigen::MatrixXd gen_covariates(int n, const Eigen::VectorXd& grid, Rng& rng,
                               bool pointwise_centering = false);

/// Gamma density b^a/Gamma(a) t^(a-1) e^(-bt) sampled on the grid; the
/// value at t = 0 is the continuous limit (0 for a > 1, b for a = 1).
GridFunction gamma_coefficient(double a, double b,
                               const Eigen::VectorXd& grid);

/// n_before draws from the pre-change law followed by n_after draws from
/// the post-change law of the spec.
Eigen::VectorXd gen_errors(const ErrorSpec& spec, int n_before, int n_after,
                           Rng& rng);

/// Full pipeline per repetition: covariates, errors, responses through the
/// gamma_{3,1/3} coefficient, GCV fit, residual test. Repetitions use
/// derived seeds and reduce by index, so results are independent of the
/// worker count. Throws NumericalError if more than 1% of fits fail.
RejectionRow run_experiment(const SimConfig& config,
                            const QuantileTable& quantiles);

}  // namespace flmcp

#endif  // FLMCP_SIMLAB_HPP_

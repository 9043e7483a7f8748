#ifndef FLMCP_SEQPROC_HPP_
#define FLMCP_SEQPROC_HPP_

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "flmcp/statistic_kind.hpp"

namespace flmcp {

struct QuantileTable;

/// Residuals together with their ascending order and ranks. Ties keep the
/// original index order internally; the statistics depend on values only.
class ResidualSample {
 public:
  /// Throws InvalidInputError on non-finite entries or n < 2.
  explicit ResidualSample(Eigen::VectorXd values);

  const Eigen::VectorXd& values() const { return values_; }
  /// values()[sort_index()[j]] is non-decreasing in j.
  const std::vector<int>& sort_index() const { return sort_index_; }
  /// ranks()[i] in 1..n, a permutation; ties broken by original index.
  const std::vector<int>& ranks() const { return ranks_; }
  int n() const { return static_cast<int>(values_.size()); }

 private:
  Eigen::VectorXd values_;
  std::vector<int> sort_index_;
  std::vector<int> ranks_;
};

/// Per-k functionals of the sequential process
///   G_n(k/n, z) = (k / sqrt(n)) (F_k(z) - F_n(z)),
/// where F_k is the empirical cdf of the first k residuals.
/// D[k-1] = sup_z |G_n(k/n, z)| and C[k-1] = (1/n) sum_i G_n(k/n, eps_i)^2
/// for k = 1..n-1, both computed exactly from rank counts.
struct SeqProcessTable {
  Eigen::VectorXd D;
  Eigen::VectorXd C;
  int n = 0;
};

struct TestResult {
  StatisticKind kind = StatisticKind::KS;
  double statistic = 0.0;
  double critical_value = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double theta_hat = 0.0;  // in {1/n, ..., (n-1)/n}
  int n = 0;
};

/// O(n^2) evaluation over the residual order statistics, where the sup over
/// z is attained because both empirical cdfs only jump there.
SeqProcessTable seq_process(const ResidualSample& sample);

/// T_n = max_k D[k]; the sup over t reduces to the jump points k/n.
double ks_statistic(const SeqProcessTable& table);

/// (sup_t, integral over t) of the Cramer-von-Mises average; the process is
/// constant on [k/n, (k+1)/n), so the integral is an exact step-function sum.
std::pair<double, double> cvm_statistics(const SeqProcessTable& table);

/// Smallest k/n attaining max_k D[k].
double change_point_estimate(const SeqProcessTable& table);

/// Assembles the verdict: Monte Carlo p-value against the table's samples,
/// rejection on statistic > critical value (strict).
TestResult run_test(const ResidualSample& sample, StatisticKind kind,
                    double level, const QuantileTable& quantiles);

/// sup over (k, z) of the absolute difference between the sequential
/// processes of two equally sized samples, evaluated on the union of their
/// order statistics (both processes are step functions in z).
double max_process_distance(const ResidualSample& a, const ResidualSample& b);

}  // namespace flmcp

#endif  // FLMCP_SEQPROC_HPP_

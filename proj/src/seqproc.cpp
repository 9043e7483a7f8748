#include "flmcp/seqproc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flmcp/errors.hpp"
#include "flmcp/limit_law.hpp"

namespace flmcp {

ResidualSample::ResidualSample(Eigen::VectorXd values)
    : values_(std::move(values)) {
  const int n = static_cast<int>(values_.size());
  if (n < 2) throw InvalidInputError("need at least 2 residuals");
  if (!values_.allFinite())
    throw InvalidInputError("residuals contain non-finite values");
  sort_index_.resize(n);
  std::iota(sort_index_.begin(), sort_index_.end(), 0);
  std::sort(sort_index_.begin(), sort_index_.end(), [&](int a, int b) {
    if (values_[a] != values_[b]) return values_[a] < values_[b];
    return a < b;
  });
  ranks_.resize(n);
  for (int j = 0; j < n; ++j) ranks_[sort_index_[j]] = j + 1;
}

namespace {

// Number of residuals <= s_j for each sorted position j (1-based count);
// constant across a tie block.
std::vector<int> tie_block_ends(const ResidualSample& sample) {
  const int n = sample.n();
  const auto& v = sample.values();
  const auto& idx = sample.sort_index();
  std::vector<int> block_end(n);
  int j = 0;
  while (j < n) {
    int e = j;
    while (e + 1 < n && v[idx[e + 1]] == v[idx[j]]) ++e;
    for (int p = j; p <= e; ++p) block_end[p] = e + 1;
    j = e + 1;
  }
  return block_end;
}

}  // namespace

SeqProcessTable seq_process(const ResidualSample& sample) {
  const int n = sample.n();
  const std::vector<int> block_end = tie_block_ends(sample);
  std::vector<int> pos_of(n);
  for (int j = 0; j < n; ++j) pos_of[sample.sort_index()[j]] = j;

  SeqProcessTable table;
  table.n = n;
  table.D.resize(n - 1);
  table.C.resize(n - 1);
  // G_n(k/n, s_j) = (n c_k(j) - k m_j) / (n sqrt(n)) with integer counts
  // c_k(j) = #{i <= k : eps_i <= s_j} and m_j = #{i : eps_i <= s_j}; keeping
  // the numerator integral makes the statistics exactly invariant under
  // monotone transforms and sequence reversal.
  const double scale = 1.0 / (static_cast<double>(n) * std::sqrt(n));
  std::vector<unsigned char> added(n, 0);
  for (int k = 1; k <= n - 1; ++k) {
    added[pos_of[k - 1]] = 1;
    long long running = 0;
    long long best = 0;
    double sum_sq = 0.0;
    int j = 0;
    while (j < n) {
      const int e = block_end[j];
      for (int p = j; p < e; ++p) running += added[p];
      const long long numer = static_cast<long long>(n) * running -
                              static_cast<long long>(k) * e;
      best = std::max(best, numer < 0 ? -numer : numer);
      const double g = static_cast<double>(numer) * scale;
      sum_sq += static_cast<double>(e - j) * g * g;
      j = e;
    }
    table.D[k - 1] = static_cast<double>(best) * scale;
    table.C[k - 1] = sum_sq / n;
  }
  return table;
}

double ks_statistic(const SeqProcessTable& table) {
  return table.D.maxCoeff();
}

std::pair<double, double> cvm_statistics(const SeqProcessTable& table) {
  const double sup = table.C.maxCoeff();
  const double integral = table.C.sum() / table.n;
  return {sup, integral};
}

double change_point_estimate(const SeqProcessTable& table) {
  const double best = table.D.maxCoeff();
  for (Eigen::Index k = 0; k < table.D.size(); ++k)
    if (table.D[k] == best)
      return static_cast<double>(k + 1) / table.n;
  return static_cast<double>(table.D.size()) / table.n;  // unreachable
}

TestResult run_test(const ResidualSample& sample, StatisticKind kind,
                    double level, const QuantileTable& quantiles) {
  if (!(level > 0.0 && level < 1.0))
    throw ConfigError("test level must lie in (0,1)");
  if (quantiles.kind != kind)
    throw ConfigError("quantile table holds " + to_string(quantiles.kind) +
                      " samples, test requested " + to_string(kind));
  if (quantiles.sorted_samples.size() == 0)
    throw ConfigError("quantile table has no samples");

  const SeqProcessTable table = seq_process(sample);
  double statistic = 0.0;
  switch (kind) {
    case StatisticKind::KS:
      statistic = ks_statistic(table);
      break;
    case StatisticKind::CvMSup:
      statistic = cvm_statistics(table).first;
      break;
    case StatisticKind::CvMInt:
      statistic = cvm_statistics(table).second;
      break;
  }

  TestResult result;
  result.kind = kind;
  result.n = sample.n();
  result.statistic = statistic;
  result.critical_value = quantile(quantiles, 1.0 - level);
  // Monte Carlo p-value: fraction of simulated limit samples >= statistic.
  const auto& samples = quantiles.sorted_samples;
  const double* begin = samples.data();
  const double* end = begin + samples.size();
  const auto below = std::lower_bound(begin, end, statistic) - begin;
  result.p_value = static_cast<double>(samples.size() - below) /
                   static_cast<double>(samples.size());
  result.reject = statistic > result.critical_value;
  result.theta_hat = change_point_estimate(table);
  return result;
}

double max_process_distance(const ResidualSample& a,
                            const ResidualSample& b) {
  const int n = a.n();
  if (b.n() != n)
    throw InvalidInputError("process distance needs equally sized samples");

  // Distinct union of both samples' values, ascending.
  std::vector<double> grid;
  grid.reserve(2 * static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) grid.push_back(a.values()[a.sort_index()[j]]);
  for (int j = 0; j < n; ++j) grid.push_back(b.values()[b.sort_index()[j]]);
  std::inplace_merge(grid.begin(), grid.begin() + n, grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const int m = static_cast<int>(grid.size());

  auto locate = [&](const ResidualSample& s) {
    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i) {
      pos[i] = static_cast<int>(
          std::lower_bound(grid.begin(), grid.end(), s.values()[i]) -
          grid.begin());
    }
    return pos;
  };
  const std::vector<int> pos_a = locate(a);
  const std::vector<int> pos_b = locate(b);

  // me_x[j] = #{values of x <= grid[j]}.
  auto totals = [&](const std::vector<int>& pos) {
    std::vector<int> me(m, 0);
    for (int i = 0; i < n; ++i) ++me[pos[i]];
    for (int j = 1; j < m; ++j) me[j] += me[j - 1];
    return me;
  };
  const std::vector<int> me_a = totals(pos_a);
  const std::vector<int> me_b = totals(pos_b);

  std::vector<int> add_a(m, 0), add_b(m, 0);
  const double scale = 1.0 / (static_cast<double>(n) * std::sqrt(n));
  long long best = 0;
  for (int k = 1; k <= n - 1; ++k) {
    ++add_a[pos_a[k - 1]];
    ++add_b[pos_b[k - 1]];
    long long run_a = 0, run_b = 0;
    for (int j = 0; j < m; ++j) {
      run_a += add_a[j];
      run_b += add_b[j];
      const long long numer_a = static_cast<long long>(n) * run_a -
                                static_cast<long long>(k) * me_a[j];
      const long long numer_b = static_cast<long long>(n) * run_b -
                                static_cast<long long>(k) * me_b[j];
      const long long diff = numer_a - numer_b;
      best = std::max(best, diff < 0 ? -diff : diff);
    }
  }
  return static_cast<double>(best) * scale;
}

}  // namespace flmcp

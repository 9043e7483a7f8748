#ifndef FLMCP_LIMIT_LAW_HPP_
#define FLMCP_LIMIT_LAW_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>

#include "flmcp/rng.hpp"
#include "flmcp/statistic_kind.hpp"

namespace flmcp {

/// Sorted Monte Carlo sample of a null-limit functional with precomputed
/// quantiles (type-7, linear interpolation).
struct QuantileTable {
  StatisticKind kind = StatisticKind::KS;
  int grid_resolution = 0;            // M
  std::int64_t replications = 0;      // R
  std::uint64_t seed = 0;
  Eigen::VectorXd sorted_samples;     // length R, non-decreasing
  std::map<double, double> quantiles; // level -> value at standard levels
  std::string generator;              // RNG label; empty for v1 tables
};

/// The three functionals share each simulated sheet.
struct TuckedSheetTables {
  QuantileTable ks;
  QuantileTable cvm_sup;
  QuantileTable cvm_int;
};

/// One path of the completely tucked Brownian sheet on the lattice
/// {0, 1/M, ..., 1}^2: cumulative sums of iid N(0, 1/M^2) increments pinned
/// to zero on all four sides. Entry (i, j) is the value at (i/M, j/M).
Eigen::MatrixXd tucked_sheet_path(int grid_resolution, Rng& rng);

/// Simulates R replications with per-replication derived seeds and records
/// sup |G| (KS), sup_t of the Riemann z-average of G^2 (CvM-sup) and the
/// full Riemann double integral of G^2 (CvM-int). Deterministic given
/// (M, R, seed) at any parallelism level. Requires M >= 50, R >= 1000.
TuckedSheetTables simulate_tucked_sheet_functionals(int grid_resolution,
                                                    std::int64_t replications,
                                                    std::uint64_t seed);

/// Type-7 empirical quantile of the stored samples; level in (0,1).
double quantile(const QuantileTable& table, double level);

/// Binary little-endian table file, versioned header. save writes the
/// current version; load accepts the previous one with defaulted new fields.
void save_table(const QuantileTable& table, const std::string& path);
QuantileTable load_table(const std::string& path);

/// Levels precomputed into QuantileTable::quantiles.
inline constexpr double kStandardLevels[] = {0.90, 0.95, 0.99};

}  // namespace flmcp

#endif  // FLMCP_LIMIT_LAW_HPP_

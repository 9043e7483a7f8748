#include "flmcp/limit_law.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "flmcp/errors.hpp"
#include "flmcp/parallel.hpp"

namespace flmcp {

Eigen::MatrixXd tucked_sheet_path(int grid_resolution, Rng& rng) {
  const int M = grid_resolution;
  Eigen::MatrixXd sheet(M + 1, M + 1);
  sheet.row(0).setZero();
  sheet.col(0).setZero();
  const double sd = 1.0 / M;
  // Column-major fill, then cumulative sums down columns and across rows.
  for (int j = 1; j <= M; ++j)
    for (int i = 1; i <= M; ++i) sheet(i, j) = sd * rng.normal();
  for (int j = 1; j <= M; ++j)
    for (int i = 2; i <= M; ++i) sheet(i, j) += sheet(i - 1, j);
  for (int j = 2; j <= M; ++j) sheet.col(j) += sheet.col(j - 1);

  // Pin all four sides: G(s,u) = W(s,u) - s W(1,u) - u W(s,1) + s u W(1,1).
  Eigen::MatrixXd tucked(M + 1, M + 1);
  const double corner = sheet(M, M);
  for (int j = 0; j <= M; ++j) {
    const double u = static_cast<double>(j) / M;
    for (int i = 0; i <= M; ++i) {
      const double s = static_cast<double>(i) / M;
      tucked(i, j) =
          sheet(i, j) - s * sheet(M, j) - u * (sheet(i, M) - s * corner);
    }
  }
  return tucked;
}

namespace {

struct SheetFunctionals {
  double ks = 0.0;
  double cvm_sup = 0.0;
  double cvm_int = 0.0;
};

SheetFunctionals sheet_functionals(const Eigen::MatrixXd& tucked) {
  const int M = static_cast<int>(tucked.rows()) - 1;
  SheetFunctionals out;
  out.ks = tucked.cwiseAbs().maxCoeff();
  // Riemann sums over the interior lattice; all boundary terms vanish.
  double total = 0.0;
  for (int i = 1; i < M; ++i) {
    double row = 0.0;
    for (int j = 1; j < M; ++j) row += tucked(i, j) * tucked(i, j);
    row /= M;
    out.cvm_sup = std::max(out.cvm_sup, row);
    total += row;
  }
  out.cvm_int = total / M;
  return out;
}

QuantileTable build_table(StatisticKind kind, int M, std::int64_t R,
                          std::uint64_t seed, std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  QuantileTable table;
  table.kind = kind;
  table.grid_resolution = M;
  table.replications = R;
  table.seed = seed;
  table.generator = "splitmix64/mt19937_64/box-muller";
  table.sorted_samples =
      Eigen::Map<Eigen::VectorXd>(samples.data(), samples.size());
  for (double level : kStandardLevels)
    table.quantiles[level] = quantile(table, level);
  return table;
}

}  // namespace

TuckedSheetTables simulate_tucked_sheet_functionals(int grid_resolution,
                                                    std::int64_t replications,
                                                    std::uint64_t seed) {
  if (grid_resolution < 50)
    throw ConfigError("grid resolution must be at least 50");
  if (replications < 1000)
    throw ConfigError("need at least 1000 replications");

  std::vector<double> ks(replications), cs(replications), ci(replications);
  parallel_for(static_cast<std::size_t>(replications), [&](std::size_t rep) {
    Rng rng(derive_seed(seed, rep));
    const SheetFunctionals f =
        sheet_functionals(tucked_sheet_path(grid_resolution, rng));
    ks[rep] = f.ks;
    cs[rep] = f.cvm_sup;
    ci[rep] = f.cvm_int;
  });

  TuckedSheetTables tables{
      build_table(StatisticKind::KS, grid_resolution, replications, seed,
                  std::move(ks)),
      build_table(StatisticKind::CvMSup, grid_resolution, replications, seed,
                  std::move(cs)),
      build_table(StatisticKind::CvMInt, grid_resolution, replications, seed,
                  std::move(ci))};
  return tables;
}

double quantile(const QuantileTable& table, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw ConfigError("quantile level must lie in (0,1)");
  const auto& s = table.sorted_samples;
  const Eigen::Index R = s.size();
  if (R == 0) throw ConfigError("quantile table has no samples");
  const double h = (static_cast<double>(R) - 1.0) * level;
  const Eigen::Index lo = static_cast<Eigen::Index>(std::floor(h));
  if (lo + 1 >= R) return s[R - 1];
  return s[lo] + (h - static_cast<double>(lo)) * (s[lo + 1] - s[lo]);
}

namespace {

constexpr char kMagic[4] = {'F', 'Q', 'T', 'B'};
constexpr std::uint32_t kCurrentVersion = 2;

template <typename T>
void write_raw(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw FormatError("truncated quantile table file");
  return value;
}

}  // namespace

void save_table(const QuantileTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open file for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_raw(out, kCurrentVersion);
  write_raw(out, static_cast<std::uint32_t>(table.kind));
  write_raw(out, static_cast<std::int32_t>(table.grid_resolution));
  write_raw(out, table.replications);
  write_raw(out, table.seed);
  write_raw(out, static_cast<std::uint32_t>(table.quantiles.size()));
  for (const auto& [level, value] : table.quantiles) {
    write_raw(out, level);
    write_raw(out, value);
  }
  write_raw(out, static_cast<std::int64_t>(table.sorted_samples.size()));
  out.write(reinterpret_cast<const char*>(table.sorted_samples.data()),
            static_cast<std::streamsize>(table.sorted_samples.size() *
                                         sizeof(double)));
  // Since v2: RNG label.
  write_raw(out, static_cast<std::uint32_t>(table.generator.size()));
  out.write(table.generator.data(),
            static_cast<std::streamsize>(table.generator.size()));
  if (!out) throw FormatError("write failed: " + path);
}

QuantileTable load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file: " + path);
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw FormatError("not a quantile table file (bad magic): " + path);
  const auto version = read_raw<std::uint32_t>(in);
  if (version < 1 || version > kCurrentVersion)
    throw FormatError("unsupported quantile table version " +
                      std::to_string(version));

  QuantileTable table;
  const auto kind = read_raw<std::uint32_t>(in);
  if (kind > 2) throw FormatError("invalid statistic kind in table file");
  table.kind = static_cast<StatisticKind>(kind);
  table.grid_resolution = read_raw<std::int32_t>(in);
  table.replications = read_raw<std::int64_t>(in);
  table.seed = read_raw<std::uint64_t>(in);
  const auto n_levels = read_raw<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < n_levels; ++i) {
    const double level = read_raw<double>(in);
    const double value = read_raw<double>(in);
    table.quantiles[level] = value;
  }
  const auto n_samples = read_raw<std::int64_t>(in);
  if (n_samples < 0) throw FormatError("negative sample count in table file");
  table.sorted_samples.resize(n_samples);
  in.read(reinterpret_cast<char*>(table.sorted_samples.data()),
          static_cast<std::streamsize>(n_samples * sizeof(double)));
  if (!in) throw FormatError("truncated quantile table file");
  if (version >= 2) {
    const auto len = read_raw<std::uint32_t>(in);
    table.generator.resize(len);
    in.read(table.generator.data(), len);
    if (!in) throw FormatError("truncated quantile table file");
  }
  for (Eigen::Index i = 0; i + 1 < table.sorted_samples.size(); ++i)
    if (table.sorted_samples[i] > table.sorted_samples[i + 1])
      throw FormatError("table samples are not sorted");
  return table;
}

}  // namespace flmcp

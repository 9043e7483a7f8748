#include "flmcp/grid_function.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "flmcp/errors.hpp"

namespace flmcp {

void validate_grid(const Eigen::VectorXd& grid) {
  if (grid.size() < 2) throw InvalidInputError("grid needs at least 2 points");
  for (Eigen::Index i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i] < grid[i + 1]))
      throw InvalidInputError("grid not increasing");
  }
  if (grid[0] != 0.0 || grid[grid.size() - 1] != 1.0)
    throw InvalidInputError("grid must start at 0 and end at 1");
}

Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& grid) {
  const Eigen::Index g = grid.size();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(g);
  for (Eigen::Index i = 0; i + 1 < g; ++i) {
    const double half = 0.5 * (grid[i + 1] - grid[i]);
    w[i] += half;
    w[i + 1] += half;
  }
  return w;
}

GridFunction::GridFunction(Eigen::VectorXd grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  validate_grid(grid_);
  if (values_.size() != grid_.size())
    throw InvalidInputError("values and grid differ in length");
}

double inner_product(const GridFunction& f, const GridFunction& g) {
  if (f.grid().size() != g.grid().size() || f.grid() != g.grid())
    throw GridMismatchError("inner product requires a shared grid");
  return f.values().cwiseProduct(g.values()).dot(trapezoid_weights(f.grid()));
}

double l2_norm(const GridFunction& f) {
  return std::sqrt(
      f.values().cwiseAbs2().dot(trapezoid_weights(f.grid())));
}

FunctionalDataset::FunctionalDataset(Eigen::VectorXd grid,
                                     Eigen::MatrixXd curves,
                                     Eigen::VectorXd responses)
    : grid_(std::move(grid)),
      curves_(std::move(curves)),
      responses_(std::move(responses)) {
  validate_grid(grid_);
  if (curves_.cols() != grid_.size())
    throw InvalidInputError("curves and grid differ in length");
  if (responses_.size() != curves_.rows())
    throw InvalidInputError("responses and curves differ in count");
  if (curves_.rows() < 2) throw InvalidInputError("n < 2");
}

GridFunction FunctionalDataset::covariate(Eigen::Index i) const {
  return GridFunction(grid_, curves_.row(i).transpose());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, int line_no, std::size_t col) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(begin, &end);
  while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
  if (end == begin || (end && *end != '\0') || errno == ERANGE)
    throw FormatError("non-numeric cell at line " + std::to_string(line_no) +
                      ", column " + std::to_string(col + 1) + ": '" + cell +
                      "'");
  return value;
}

bool is_blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

}  // namespace

FunctionalDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open file: " + path);

  std::string line;
  int line_no = 0;

  // Header: response label followed by the grid points.
  Eigen::VectorXd grid;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < 3)
      throw FormatError("header needs a response label and at least 2 grid points");
    grid.resize(static_cast<Eigen::Index>(cells.size()) - 1);
    for (std::size_t c = 1; c < cells.size(); ++c)
      grid[static_cast<Eigen::Index>(c - 1)] = parse_cell(cells[c], line_no, c);
    break;
  }
  if (grid.size() == 0) throw FormatError("missing header row");
  for (Eigen::Index i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1])) throw FormatError("grid not increasing");
  if (grid[0] != 0.0 || grid[grid.size() - 1] != 1.0)
    throw FormatError("grid must start at 0 and end at 1");

  std::vector<double> responses;
  std::vector<Eigen::VectorXd> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    const auto cells = split_csv_line(line);
    if (static_cast<Eigen::Index>(cells.size()) != grid.size() + 1)
      throw FormatError("arity mismatch at line " + std::to_string(line_no) +
                        ": expected " + std::to_string(grid.size() + 1) +
                        " cells, got " + std::to_string(cells.size()));
    responses.push_back(parse_cell(cells[0], line_no, 0));
    Eigen::VectorXd row(grid.size());
    for (Eigen::Index j = 0; j < grid.size(); ++j)
      row[j] = parse_cell(cells[static_cast<std::size_t>(j) + 1], line_no,
                          static_cast<std::size_t>(j) + 1);
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw FormatError("n < 2");

  Eigen::MatrixXd curves(static_cast<Eigen::Index>(rows.size()), grid.size());
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    curves.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    y[static_cast<Eigen::Index>(i)] = responses[i];
  }
  return FunctionalDataset(std::move(grid), std::move(curves), std::move(y));
}

}  // namespace flmcp

#ifndef FLMCP_GRID_FUNCTION_HPP_
#define FLMCP_GRID_FUNCTION_HPP_

#include <Eigen/Dense>
#include <string>

namespace flmcp {

/// Throws if grid is not a strictly increasing sample of [0,1] with
/// endpoints 0 and 1 and at least two points.
void validate_grid(const Eigen::VectorXd& grid);

/// Composite trapezoidal quadrature weights for a (validated) grid.
Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& grid);

/// A real function on [0,1] sampled on a finite grid. Immutable after
/// construction.
class GridFunction {
 public:
  GridFunction(Eigen::VectorXd grid, Eigen::VectorXd values);

  const Eigen::VectorXd& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::Index size() const { return grid_.size(); }

 private:
  Eigen::VectorXd grid_;
  Eigen::VectorXd values_;
};

/// Trapezoidal approximation of the L2([0,1]) inner product
/// integral of f(t) g(t) dt. Both functions must share one grid.
double inner_product(const GridFunction& f, const GridFunction& g);

/// sqrt(inner_product(f, f)).
double l2_norm(const GridFunction& f);

/// n covariate curves on one common grid plus scalar responses. Rows of
/// curves() are the sampled covariates. Immutable after construction.
class FunctionalDataset {
 public:
  FunctionalDataset(Eigen::VectorXd grid, Eigen::MatrixXd curves,
                    Eigen::VectorXd responses);

  const Eigen::VectorXd& grid() const { return grid_; }
  const Eigen::MatrixXd& curves() const { return curves_; }
  const Eigen::VectorXd& responses() const { return responses_; }
  Eigen::Index n() const { return curves_.rows(); }

  GridFunction covariate(Eigen::Index i) const;

 private:
  Eigen::VectorXd grid_;
  Eigen::MatrixXd curves_;   // n x grid size
  Eigen::VectorXd responses_;
};

/// Loads the flat CSV layout: a header row whose first cell labels the
/// response column and whose remaining cells are the grid points, followed
/// by one row per observation (response, then function values). Lines
/// starting with '#' are ignored. Throws FormatError with a distinct
/// diagnostic per defect (missing file, non-numeric cell, arity mismatch,
/// non-increasing grid, too few rows).
FunctionalDataset load_dataset(const std::string& path);

}  // namespace flmcp

#endif  // FLMCP_GRID_FUNCTION_HPP_

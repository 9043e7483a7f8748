#ifndef FLMCP_ESTIMATOR_HPP_
#define FLMCP_ESTIMATOR_HPP_

#include <Eigen/Dense>

#include "flmcp/bspline.hpp"
#include "flmcp/grid_function.hpp"

namespace flmcp {

/// Fitted functional linear model Y = alpha + <X, beta> + eps with beta
/// expanded in a spline basis.
struct FlmFit {
  double alpha_hat = 0.0;
  Eigen::VectorXd coeffs;   // K spline coefficients of beta_hat
  double lambda = 0.0;
  double gcv_score = 0.0;
  double edf = 0.0;         // trace of the hat matrix, intercept included
  SplineBasis basis;
  Eigen::VectorXd grid;     // training grid; residuals require the same grid
};

/// n x K matrix with entry (i, j) = trapezoidal <X_i, B_j> on the data grid.
Eigen::MatrixXd design_matrix(const FunctionalDataset& data,
                              const SplineBasis& basis);

/// K x K roughness penalty: Omega(j,k) = integral of B_j^(m) B_k^(m) over
/// [0,1], assembled by 7-node Gauss-Legendre quadrature per knot interval
/// (exact for the piecewise-polynomial integrand). Symmetric positive
/// semidefinite; its null space are the degree < m polynomials.
Eigen::MatrixXd penalty_matrix(const SplineBasis& basis);

/// Minimizes (1/n) |Y - a 1 - Z c|^2 + lambda c' Omega c. Solves the
/// penalized normal equations by LDLT with a 1e-12 diagonal jitter retry;
/// throws NumericalError if the system stays unsolvable.
FlmFit fit_penalized(const FunctionalDataset& data, const SplineBasis& basis,
                     double lambda);

/// Log-uniform lambda grid, default 50 points on [1e-10, 1e2].
Eigen::VectorXd default_lambda_grid(int count = 50, double lo = 1e-10,
                                    double hi = 1e2);

/// Fit minimizing GCV(lambda) = n RSS / (n - tr H)^2 over the grid; ties
/// break toward larger lambda.
FlmFit gcv_select(const FunctionalDataset& data, const SplineBasis& basis,
                  const Eigen::VectorXd& lambda_grid);

/// Residuals Y_i - alpha_hat - <X_i, beta_hat> on the training grid.
Eigen::VectorXd residuals(const FlmFit& fit, const FunctionalDataset& data);

/// beta_hat sampled on an arbitrary grid in [0,1].
Eigen::VectorXd beta_on_grid(const FlmFit& fit, const Eigen::VectorXd& grid);

}  // namespace flmcp

#endif  // FLMCP_ESTIMATOR_HPP_

#ifndef FLMCP_BSPLINE_HPP_
#define FLMCP_BSPLINE_HPP_

#include <Eigen/Dense>

namespace flmcp {

/// Clamped B-spline basis on [0,1] with equidistant interior knots.
///
/// basis_size K, polynomial degree d and roughness-penalty order m satisfy
/// K = interior_knots + d + 1 and d >= 2m - 1, so m-th derivatives of basis
/// elements are square-integrable piecewise polynomials.
class SplineBasis {
 public:
  SplineBasis(int basis_size, int degree, int penalty_order);

  /// K = 40, degree 5, penalty order 3.
  static SplineBasis defaults();

  int size() const { return size_; }
  int degree() const { return degree_; }
  int penalty_order() const { return penalty_order_; }
  int interior_knots() const { return size_ - degree_ - 1; }
  const Eigen::VectorXd& knots() const { return knots_; }

  /// Values of all K basis functions at x in [0,1].
  Eigen::VectorXd eval(double x) const;

  /// deriv-th derivatives of all K basis functions at x.
  Eigen::VectorXd eval_derivative(double x, int deriv) const;

  /// Rows = basis values at the grid points (grid.size() x K).
  Eigen::MatrixXd eval_matrix(const Eigen::VectorXd& grid) const;

  /// As eval_matrix but for the deriv-th derivatives.
  Eigen::MatrixXd eval_derivative_matrix(const Eigen::VectorXd& grid,
                                         int deriv) const;

 private:
  int size_;
  int degree_;
  int penalty_order_;
  Eigen::VectorXd knots_;  // length K + degree + 1, clamped

  int find_span(double x) const;
  // Non-zero basis values (and derivatives up to `ders`) at x in the span.
  // Row r of the result holds the r-th derivatives of the degree+1 local
  // basis functions.
  Eigen::MatrixXd local_derivatives(double x, int span, int ders) const;
};

}  // namespace flmcp

#endif  // FLMCP_BSPLINE_HPP_

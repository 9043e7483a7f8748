#include "flmcp/bspline.hpp"

#include <algorithm>
#include <cmath>

#include "flmcp/errors.hpp"

namespace flmcp {

SplineBasis::SplineBasis(int basis_size, int degree, int penalty_order)
    : size_(basis_size), degree_(degree), penalty_order_(penalty_order) {
  if (penalty_order_ < 1) throw ConfigError("penalty order must be >= 1");
  if (degree_ < 2 * penalty_order_ - 1)
    throw ConfigError("spline degree " + std::to_string(degree_) +
                      " too low for penalty order " +
                      std::to_string(penalty_order_) +
                      " (need degree >= 2m - 1)");
  if (size_ < degree_ + 1)
    throw ConfigError("basis size must be at least degree + 1");

  const int interior = size_ - degree_ - 1;
  knots_.resize(size_ + degree_ + 1);
  for (int i = 0; i <= degree_; ++i) knots_[i] = 0.0;
  for (int i = 1; i <= interior; ++i)
    knots_[degree_ + i] = static_cast<double>(i) / (interior + 1);
  for (int i = size_; i < size_ + degree_ + 1; ++i) knots_[i] = 1.0;
}

SplineBasis SplineBasis::defaults() { return SplineBasis(40, 5, 3); }

int SplineBasis::find_span(double x) const {
  // Largest span index mu in [degree, K-1] with knots[mu] <= x.
  if (x >= 1.0) return size_ - 1;
  if (x <= 0.0) return degree_;
  int lo = degree_, hi = size_;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (knots_[mid] <= x)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

Eigen::MatrixXd SplineBasis::local_derivatives(double x, int span,
                                               int ders) const {
  const int d = degree_;
  // Triangular table of basis values by degree (Cox-de Boor), plus the
  // knot differences needed for the derivative recursion.
  Eigen::MatrixXd ndu = Eigen::MatrixXd::Zero(d + 1, d + 1);
  Eigen::VectorXd left(d + 1), right(d + 1);
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= d; ++j) {
    left[j] = x - knots_[span + 1 - j];
    right[j] = knots_[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const double temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu(j, j) = saved;
  }

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(ders + 1, d + 1);
  for (int j = 0; j <= d; ++j) out(0, j) = ndu(j, d);
  if (ders == 0) return out;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, d + 1);
  for (int r = 0; r <= d; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = 1.0;
    for (int k = 1; k <= std::min(ders, d); ++k) {
      double dv = 0.0;
      const int rk = r - k;
      const int pk = d - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        dv = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = r - 1 <= pk ? k - 1 : d - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        dv += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        dv += a(s2, k) * ndu(r, pk);
      }
      out(k, r) = dv;
      std::swap(s1, s2);
    }
  }
  double factor = d;
  for (int k = 1; k <= std::min(ders, d); ++k) {
    for (int j = 0; j <= d; ++j) out(k, j) *= factor;
    factor *= d - k;
  }
  return out;
}

Eigen::VectorXd SplineBasis::eval(double x) const {
  return eval_derivative(x, 0);
}

Eigen::VectorXd SplineBasis::eval_derivative(double x, int deriv) const {
  if (deriv < 0) throw ConfigError("derivative order must be >= 0");
  Eigen::VectorXd values = Eigen::VectorXd::Zero(size_);
  if (deriv > degree_) return values;  // identically zero
  const int span = find_span(x);
  const Eigen::MatrixXd local = local_derivatives(x, span, deriv);
  for (int j = 0; j <= degree_; ++j)
    values[span - degree_ + j] = local(deriv, j);
  return values;
}

Eigen::MatrixXd SplineBasis::eval_matrix(const Eigen::VectorXd& grid) const {
  return eval_derivative_matrix(grid, 0);
}

Eigen::MatrixXd SplineBasis::eval_derivative_matrix(const Eigen::VectorXd& grid,
                                                    int deriv) const {
  Eigen::MatrixXd values(grid.size(), size_);
  for (Eigen::Index g = 0; g < grid.size(); ++g)
    values.row(g) = eval_derivative(grid[g], deriv).transpose();
  return values;
}

}  // namespace flmcp

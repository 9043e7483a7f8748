#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "flmcp/bspline.hpp"
#include "flmcp/errors.hpp"
#include "flmcp/rng.hpp"

using namespace flmcp;

namespace {

// Least-squares spline coefficients reproducing f on a dense grid;
// used to probe basis properties through known polynomials.
Eigen::VectorXd project(const SplineBasis& basis, double (*f)(double)) {
  const int points = 600;
  Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(points, 0.0, 1.0);
  Eigen::MatrixXd design = basis.eval_matrix(grid);
  Eigen::VectorXd target(points);
  for (int i = 0; i < points; ++i) target[i] = f(grid[i]);
  return design.colPivHouseholderQr().solve(target);
}

double rep_error(const SplineBasis& basis, const Eigen::VectorXd& coeffs,
                 double (*f)(double)) {
  double worst = 0.0;
  for (int i = 0; i <= 512; ++i) {
    const double x = static_cast<double>(i) / 512;
    worst = std::max(worst,
                     std::abs(basis.eval(x).dot(coeffs) - f(x)));
  }
  return worst;
}

}  // namespace

TEST_SUITE("bspline") {

TEST_CASE("construction invariants") {
  const SplineBasis basis = SplineBasis::defaults();
  CHECK(basis.size() == 40);
  CHECK(basis.degree() == 5);
  CHECK(basis.penalty_order() == 3);
  CHECK(basis.interior_knots() == 34);
  CHECK(basis.knots().size() == 46);
  // degree >= 2m - 1 enforced
  CHECK_THROWS_AS(SplineBasis(20, 4, 3), ConfigError);
  CHECK_NOTHROW(SplineBasis(20, 5, 3));
  CHECK_THROWS_AS(SplineBasis(4, 5, 3), ConfigError);
}

TEST_CASE("partition of unity") {
  const SplineBasis basis = SplineBasis::defaults();
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const double x = i < 2 ? static_cast<double>(i) : rng.uniform();
    CHECK(basis.eval(x).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(basis.eval(x).minCoeff() >= 0.0);
  }
}

TEST_CASE("derivatives match finite differences") {
  const SplineBasis basis(12, 5, 3);
  Rng rng(11);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const double x = rng.uniform(0.05, 0.95);
    const Eigen::VectorXd d1 = basis.eval_derivative(x, 1);
    const Eigen::VectorXd fd =
        (basis.eval(x + h) - basis.eval(x - h)) / (2.0 * h);
    CHECK((d1 - fd).cwiseAbs().maxCoeff() < 1e-4);

    const Eigen::VectorXd d3 = basis.eval_derivative(x, 3);
    const Eigen::VectorXd fd3 = (basis.eval_derivative(x + h, 2) -
                                 basis.eval_derivative(x - h, 2)) /
                                (2.0 * h);
    CHECK((d3 - fd3).cwiseAbs().maxCoeff() < 2e-3);
  }
}

TEST_CASE("polynomials are reproduced exactly") {
  const SplineBasis basis = SplineBasis::defaults();
  auto cubic = [](double t) { return t * t * t; };
  const Eigen::VectorXd coeffs = project(basis, cubic);
  CHECK(rep_error(basis, coeffs, cubic) < 1e-9);
  // third derivative of t^3 is the constant 6
  for (double x : {0.03, 0.31, 0.77, 0.99})
    CHECK(basis.eval_derivative(x, 3).dot(coeffs) ==
          doctest::Approx(6.0).epsilon(1e-7));
}

TEST_CASE("derivative order above degree vanishes") {
  const SplineBasis basis(12, 5, 3);
  CHECK(basis.eval_derivative(0.4, 6).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("endpoint evaluation is clamped") {
  const SplineBasis basis = SplineBasis::defaults();
  const Eigen::VectorXd at_zero = basis.eval(0.0);
  const Eigen::VectorXd at_one = basis.eval(1.0);
  CHECK(at_zero[0] == doctest::Approx(1.0));
  CHECK(at_one[basis.size() - 1] == doctest::Approx(1.0));
  CHECK(at_zero.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(at_one.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

}  // TEST_SUITE

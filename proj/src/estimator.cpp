#include "flmcp/estimator.hpp"

#include <cmath>
#include <limits>

#include "flmcp/errors.hpp"

namespace flmcp {

namespace {

// 7-node Gauss-Legendre rule on [-1, 1].
constexpr int kGaussNodes = 7;
constexpr double kGaussX[kGaussNodes] = {
    -0.9491079123427585245262, -0.7415311855993944398639,
    -0.4058451513773971669066, 0.0,
    0.4058451513773971669066,  0.7415311855993944398639,
    0.9491079123427585245262};
constexpr double kGaussW[kGaussNodes] = {
    0.1294849661688696932706, 0.2797053914892766679015,
    0.3818300505051189449504, 0.4179591836734693877551,
    0.3818300505051189449504, 0.2797053914892766679015,
    0.1294849661688696932706};

struct PenalizedSolve {
  Eigen::VectorXd theta;  // (intercept, coeffs)
  double rss = 0.0;
  double edf = 0.0;
  double gcv = std::numeric_limits<double>::quiet_NaN();
};

// Shared pieces of the normal equations, reusable across the lambda grid.
struct NormalEquations {
  Eigen::MatrixXd gram;       // D'D / n, D = [1 | Z]
  Eigen::VectorXd moment;     // D'Y / n
  Eigen::MatrixXd penalty;    // blockdiag(0, Omega)
  Eigen::MatrixXd design;     // D
  Eigen::VectorXd y;
};

NormalEquations assemble(const FunctionalDataset& data,
                         const SplineBasis& basis) {
  const Eigen::Index n = data.n();
  const int K = basis.size();
  NormalEquations eq;
  eq.design.resize(n, K + 1);
  eq.design.col(0).setOnes();
  eq.design.rightCols(K) = design_matrix(data, basis);
  eq.y = data.responses();
  eq.gram = eq.design.transpose() * eq.design / static_cast<double>(n);
  eq.moment = eq.design.transpose() * eq.y / static_cast<double>(n);
  eq.penalty = Eigen::MatrixXd::Zero(K + 1, K + 1);
  eq.penalty.bottomRightCorner(K, K) = penalty_matrix(basis);
  return eq;
}

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

PenalizedSolve solve_at(const NormalEquations& eq, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  const Eigen::Index n = eq.design.rows();
  Eigen::MatrixXd system = eq.gram + lambda * eq.penalty;

  auto attempt = [&](const Eigen::MatrixXd& mat, PenalizedSolve& out) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(mat);
    if (ldlt.info() != Eigen::Success) return false;
    out.theta = ldlt.solve(eq.moment);
    if (!finite(out.theta)) return false;
    // edf = tr(H) with H = D (D'D/n + lambda P)^{-1} D'/n = tr(A^{-1} D'D/n)
    const Eigen::MatrixXd inv_gram = ldlt.solve(eq.gram);
    out.edf = inv_gram.trace();
    if (!std::isfinite(out.edf)) return false;
    return true;
  };

  PenalizedSolve out;
  if (!attempt(system, out)) {
    system.diagonal().array() += 1e-12;
    if (!attempt(system, out))
      throw NumericalError("penalized system is singular (jitter retry failed)");
  }
  out.rss = (eq.y - eq.design * out.theta).squaredNorm();
  const double denom = static_cast<double>(n) - out.edf;
  out.gcv = static_cast<double>(n) * out.rss / (denom * denom);
  return out;
}

FlmFit make_fit(const FunctionalDataset& data, const SplineBasis& basis,
                double lambda, const PenalizedSolve& solve) {
  FlmFit fit{solve.theta[0],
             solve.theta.tail(basis.size()),
             lambda,
             solve.gcv,
             solve.edf,
             basis,
             data.grid()};
  return fit;
}

}  // namespace

Eigen::MatrixXd design_matrix(const FunctionalDataset& data,
                              const SplineBasis& basis) {
  const Eigen::VectorXd weights = trapezoid_weights(data.grid());
  const Eigen::MatrixXd basis_values = basis.eval_matrix(data.grid());
  return data.curves() * weights.asDiagonal() * basis_values;
}

Eigen::MatrixXd penalty_matrix(const SplineBasis& basis) {
  const int K = basis.size();
  const int m = basis.penalty_order();
  const auto& knots = basis.knots();
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(K, K);
  for (int i = basis.degree(); i < K; ++i) {
    const double a = knots[i], b = knots[i + 1];
    if (!(b > a)) continue;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (int q = 0; q < kGaussNodes; ++q) {
      const double x = mid + half * kGaussX[q];
      // scaling the vector before the outer product keeps the accumulated
      // matrix symmetric to the last bit
      const Eigen::VectorXd scaled =
          std::sqrt(half * kGaussW[q]) * basis.eval_derivative(x, m);
      omega.noalias() += scaled * scaled.transpose();
    }
  }
  return omega;
}

FlmFit fit_penalized(const FunctionalDataset& data, const SplineBasis& basis,
                     double lambda) {
  const NormalEquations eq = assemble(data, basis);
  return make_fit(data, basis, lambda, solve_at(eq, lambda));
}

// The derivative penalty carries the knot-spacing scale (norm ~ 1e7 for the
// default basis), so the flexible-to-rigid transition of the fit happens at
// much smaller lambda than an O(1)-scaled penalty would suggest. The default
// range spans the whole transition.
Eigen::VectorXd default_lambda_grid(int count, double lo, double hi) {
  if (count < 1 || !(lo > 0.0) || !(hi > lo))
    throw ConfigError("lambda grid needs count >= 1 and 0 < lo < hi");
  if (count == 1) return Eigen::VectorXd::Constant(1, lo);
  Eigen::VectorXd grid(count);
  const double step = (std::log(hi) - std::log(lo)) / (count - 1);
  for (int i = 0; i < count; ++i) grid[i] = std::exp(std::log(lo) + i * step);
  return grid;
}

FlmFit gcv_select(const FunctionalDataset& data, const SplineBasis& basis,
                  const Eigen::VectorXd& lambda_grid) {
  if (lambda_grid.size() == 0) throw ConfigError("empty lambda grid");
  const NormalEquations eq = assemble(data, basis);

  Eigen::VectorXd sorted = lambda_grid;
  std::sort(sorted.data(), sorted.data() + sorted.size());

  bool found = false;
  double best_lambda = 0.0;
  PenalizedSolve best;
  for (Eigen::Index i = 0; i < sorted.size(); ++i) {
    PenalizedSolve cur;
    try {
      cur = solve_at(eq, sorted[i]);
    } catch (const NumericalError&) {
      continue;
    }
    if (!std::isfinite(cur.gcv)) continue;
    // ascending scan with <=, so ties resolve to the larger lambda
    if (!found || cur.gcv <= best.gcv) {
      best = cur;
      best_lambda = sorted[i];
      found = true;
    }
  }
  if (!found) throw NumericalError("no finite GCV value on the lambda grid");
  return make_fit(data, basis, best_lambda, best);
}

Eigen::VectorXd residuals(const FlmFit& fit, const FunctionalDataset& data) {
  if (fit.grid.size() != data.grid().size() || fit.grid != data.grid())
    throw GridMismatchError("fit and dataset grids differ");
  const Eigen::MatrixXd design = design_matrix(data, fit.basis);
  return data.responses().array() - fit.alpha_hat -
         (design * fit.coeffs).array();
}

Eigen::VectorXd beta_on_grid(const FlmFit& fit, const Eigen::VectorXd& grid) {
  return fit.basis.eval_matrix(grid) * fit.coeffs;
}

}  // namespace flmcp

#include "peac/least_squares.hpp"

#include <ceres/ceres.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "peac/error.hpp"

namespace peac {

namespace {

struct Residual {
  const ResidualFn* f;
  std::size_t n;
  std::size_t m;

  bool operator()(double const* const* x, double* r) const {
    try {
      (*f)(std::span<const double>(x[0], n), std::span<double>(r, m));
    } catch (const Error&) {
      return false;
    }
    for (std::size_t i = 0; i < m; ++i)
      if (!std::isfinite(r[i])) return false;
    return true;
  }
};

std::vector<double> inverse_normal_matrix(ceres::Problem& problem, std::size_t n) {
  ceres::CRSMatrix crs;
  if (!problem.Evaluate(ceres::Problem::EvaluateOptions(), nullptr, nullptr, nullptr, &crs)) return {};
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(crs.num_rows, crs.num_cols);
  for (int row = 0; row < crs.num_rows; ++row)
    for (int k = crs.rows[static_cast<std::size_t>(row)]; k < crs.rows[static_cast<std::size_t>(row) + 1]; ++k)
      J(row, crs.cols[static_cast<std::size_t>(k)]) = crs.values[static_cast<std::size_t>(k)];
  const Eigen::MatrixXd normal = J.transpose() * J;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
  if (!lu.isInvertible()) return {};
  const Eigen::MatrixXd inv = lu.inverse();
  std::vector<double> out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out[i * n + j] = inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

}  // namespace

LsqBounds LsqBounds::unbounded(std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  return {std::vector<double>(n, -inf), std::vector<double>(n, inf)};
}

LsqResult least_squares(const ResidualFn& f, std::vector<double> x0, std::size_t m, const LsqBounds& bounds,
                        const LsqOptions& options) {
  const std::size_t n = x0.size();
  if (n == 0) fail(Errc::invalid_parameter, "least squares needs at least one parameter");
  if (m < n) fail(Errc::invalid_parameter, "least squares needs at least as many residuals as parameters");
  if (bounds.lower.size() != n || bounds.upper.size() != n)
    fail(Errc::invalid_parameter, "bounds must match the parameter count");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(bounds.lower[i] <= bounds.upper[i])) fail(Errc::invalid_parameter, "lower bound exceeds upper bound");
    x0[i] = std::clamp(x0[i], bounds.lower[i], bounds.upper[i]);
  }

  auto* cost = new ceres::DynamicNumericDiffCostFunction<Residual, ceres::CENTRAL>(new Residual{&f, n, m});
  cost->AddParameterBlock(static_cast<int>(n));
  cost->SetNumResiduals(static_cast<int>(m));

  ceres::Problem problem;
  double* x = x0.data();
  problem.AddResidualBlock(cost, nullptr, x);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(bounds.lower[i])) problem.SetParameterLowerBound(x, static_cast<int>(i), bounds.lower[i]);
    if (std::isfinite(bounds.upper[i])) problem.SetParameterUpperBound(x, static_cast<int>(i), bounds.upper[i]);
  }

  ceres::Solver::Options solver;
  solver.trust_region_strategy_type = ceres::LEVENBERG_MARQUARDT;
  solver.linear_solver_type = ceres::DENSE_QR;
  solver.max_num_iterations = options.max_iterations;
  solver.function_tolerance = options.ftol;
  solver.parameter_tolerance = options.xtol;
  solver.gradient_tolerance = options.gtol;
  solver.logging_type = ceres::SILENT;
  solver.num_threads = 1;
  ceres::Solver::Summary summary;
  ceres::Solve(solver, &problem, &summary);

  LsqResult result;
  result.x = x0;
  result.iterations = static_cast<int>(summary.iterations.size());
  result.evaluations = summary.num_residual_evaluations;
  result.converged = summary.termination_type == ceres::CONVERGENCE;
  result.residuals.assign(m, 0.0);
  f(result.x, result.residuals);
  double ss = 0.0;
  for (double r : result.residuals) ss += r * r;
  result.cost = std::isfinite(ss) ? 0.5 * ss : std::numeric_limits<double>::infinity();
  if (!std::isfinite(result.cost)) result.converged = false;
  if (result.converged) result.inverse_hessian = inverse_normal_matrix(problem, n);
  return result;
}

}  // namespace peac

#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace peac {

/// Residual callback: fills r (size m) for parameters x.
using ResidualFn = std::function<void(std::span<const double> x, std::span<double> r)>;

struct LsqBounds {
  std::vector<double> lower;
  std::vector<double> upper;

  static LsqBounds unbounded(std::size_t n);
};

struct LsqOptions {
  int max_iterations = 200;
  double ftol = 1e-12;  // relative cost decrease
  double xtol = 1e-10;  // relative step
  double gtol = 1e-14;  // projected gradient max-norm
};

struct LsqResult {
  std::vector<double> x;
  std::vector<double> residuals;
  double cost = std::numeric_limits<double>::infinity();  // 0.5 * sum r^2
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  /// Row-major n x n approximation of (J^T J)^-1 at the solution; empty when singular.
  std::vector<double> inverse_hessian;
};

/// Box-constrained Levenberg-Marquardt (Ceres trust-region solver) with a
/// central-difference Jacobian.
LsqResult least_squares(const ResidualFn& f, std::vector<double> x0, std::size_t m,
                        const LsqBounds& bounds, const LsqOptions& options = {});

}  // namespace peac

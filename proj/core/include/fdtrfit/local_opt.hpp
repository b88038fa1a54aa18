#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fdtrfit/evaluation.hpp"
#include "fdtrfit/param_space.hpp"

namespace fdtrfit {

enum class LocalAlgorithm { bfgs, nelder_mead, trust_region };
std::string to_string(LocalAlgorithm a);
/// Accepts "bfgs", "nelder_mead"/"nm", "trust_region"/"tr".
std::optional<LocalAlgorithm> parse_local_algorithm(const std::string& s);

enum class LocalStatus { converged, max_iter, line_search_failed, stalled };
std::string to_string(LocalStatus s);

struct LocalTracePoint {
  std::size_t iteration = 0;
  double f = 0.0;
  double gradient_norm = std::numeric_limits<double>::quiet_NaN();  // NaN for Nelder-Mead
};

struct LocalResult {
  SearchVector x;
  double f = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  std::size_t evals = 0;
  LocalStatus status = LocalStatus::max_iter;
  std::vector<LocalTracePoint> trace;
};

struct BfgsOptions {
  double tol = 1e-6;  // on the gradient norm
  std::size_t max_iter = 1000;
  double fd_step = 1e-7;
  double armijo_c = 1e-4;
  int max_halvings = 40;
  /// Length cap on the very first trial step, taken along -g before any
  /// curvature is known.
  double first_step = 1.0;
  /// Checked between iterations: the last one may overrun by its line
  /// search and gradient.
  std::optional<std::size_t> max_evals;
};

struct BfgsUpdate {
  Eigen::MatrixXd binv;
  bool skipped = false;
};

/// Inverse-Hessian BFGS update. Skipped (input returned) unless the
/// curvature dx.dg exceeds 1e-12 |dx| |dg|.
BfgsUpdate bfgs_update(const Eigen::MatrixXd& binv, const Eigen::VectorXd& dx,
                       const Eigen::VectorXd& dg);

/// Central-difference gradient; returns false if any probe is non-finite.
bool central_gradient(const ObjectiveFn& f, std::span<const double> x, double h,
                      std::span<double> g);

LocalResult bfgs_minimize(const ObjectiveFn& f, std::span<const double> x0, const BfgsOptions& opt = {});

struct NelderMeadOptions {
  double tol = 1e-6;  // on the spread of simplex function values
  std::size_t max_iter = 1000;
  double reflect = 1.0;
  double expand = 2.0;
  double contract = 0.5;
  double shrink = 0.5;
  /// Per-axis initial edge; default 5% of |x0_i|, or 0.00025 where x0_i = 0.
  std::vector<double> initial_step;
  std::optional<std::size_t> max_evals;  // checked between iterations
};

LocalResult nelder_mead_minimize(const ObjectiveFn& f, std::span<const double> x0,
                                 const NelderMeadOptions& opt = {});

struct TrustRegionOptions {
  double tol = 1e-6;
  std::size_t max_iter = 1000;
  double initial_radius = 1.0;
  double max_radius = 1e3;
  double fd_step = 1e-6;
  std::size_t max_rejections = 60;  // consecutive, before giving up as stalled
  std::optional<std::size_t> max_evals;  // checked between iterations
};

/// Dogleg Gauss-Newton on sum r_i^2. The reported f is sum r_i^2; the
/// gradient norm in the trace is |J^T r|.
LocalResult trust_region_lsq(const ResidualFn& r, std::span<const double> x0,
                             const TrustRegionOptions& opt = {});

/// Dogleg step for the model 0.5 |r + J p|^2 within radius `delta`.
Eigen::VectorXd dogleg_step(const Eigen::MatrixXd& J, const Eigen::VectorXd& r, double delta);

}  // namespace fdtrfit

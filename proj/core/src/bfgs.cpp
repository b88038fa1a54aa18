#include <algorithm>
#include <cctype>
#include <cmath>

#include "fdtrfit/error.hpp"
#include "fdtrfit/local_opt.hpp"

namespace fdtrfit {

std::string to_string(LocalAlgorithm a) {
  switch (a) {
    case LocalAlgorithm::bfgs: return "BFGS";
    case LocalAlgorithm::nelder_mead: return "NelderMead";
    case LocalAlgorithm::trust_region: return "TrustRegion";
  }
  return "unknown";
}

std::optional<LocalAlgorithm> parse_local_algorithm(const std::string& s) {
  std::string l(s);
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  std::erase(l, '-');
  std::erase(l, '_');
  if (l == "bfgs" || l == "qn") return LocalAlgorithm::bfgs;
  if (l == "neldermead" || l == "nm") return LocalAlgorithm::nelder_mead;
  if (l == "trustregion" || l == "tr") return LocalAlgorithm::trust_region;
  return std::nullopt;
}

std::string to_string(LocalStatus s) {
  switch (s) {
    case LocalStatus::converged: return "converged";
    case LocalStatus::max_iter: return "max_iter";
    case LocalStatus::line_search_failed: return "line_search_failed";
    case LocalStatus::stalled: return "stalled";
  }
  return "unknown";
}

BfgsUpdate bfgs_update(const Eigen::MatrixXd& binv, const Eigen::VectorXd& dx,
                       const Eigen::VectorXd& dg) {
  const double curvature = dx.dot(dg);
  if (!(curvature > 1e-12 * dx.norm() * dg.norm())) return {binv, true};
  const double rho = 1.0 / curvature;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(binv.rows(), binv.cols());
  const Eigen::MatrixXd left = I - rho * dx * dg.transpose();
  Eigen::MatrixXd next = left * binv * left.transpose() + rho * dx * dx.transpose();
  // Round-off leaves tiny asymmetries; keep the stored matrix exactly symmetric.
  next = 0.5 * (next + next.transpose()).eval();
  return {std::move(next), false};
}

bool central_gradient(const ObjectiveFn& f, std::span<const double> x, double h,
                      std::span<double> g) {
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
    if (!std::isfinite(g[i])) return false;
  }
  return true;
}

LocalResult bfgs_minimize(const ObjectiveFn& f, std::span<const double> x0, const BfgsOptions& opt) {
  const auto n = static_cast<Eigen::Index>(x0.size());
  if (n == 0) throw ContractError("bfgs: empty start vector");
  LocalResult res;
  const ObjectiveFn counted = [&](std::span<const double> x) {
    ++res.evals;
    return f(x);
  };
  auto out_of_evals = [&] { return opt.max_evals && res.evals >= *opt.max_evals; };

  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
  double fx = counted(x0);
  if (!std::isfinite(fx)) throw ContractError("bfgs: objective is not finite at the start point");
  Eigen::VectorXd g(n);
  res.x.assign(x0.begin(), x0.end());
  res.f = fx;
  if (!central_gradient(counted, x0, opt.fd_step, {g.data(), static_cast<std::size_t>(n)})) {
    res.status = LocalStatus::stalled;
    res.trace.push_back({0, fx, std::numeric_limits<double>::quiet_NaN()});
    return res;
  }
  res.trace.push_back({0, fx, g.norm()});
  Eigen::MatrixXd binv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd xn(n), gn(n);

  while (true) {
    if (g.norm() < opt.tol) {
      res.status = LocalStatus::converged;
      break;
    }
    if (res.iterations >= opt.max_iter || out_of_evals()) {
      res.status = LocalStatus::max_iter;
      break;
    }
    Eigen::VectorXd d = -binv * g;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      binv.setIdentity();
      d = -g;
      slope = -g.squaredNorm();
    }
    double t = 1.0;
    if (res.iterations == 0) t = std::min(1.0, opt.first_step / d.norm());
    double fn = 0.0;
    bool accepted = false;
    for (int k = 0; k <= opt.max_halvings; ++k, t *= 0.5) {
      xn = x + t * d;
      fn = counted({xn.data(), static_cast<std::size_t>(n)});
      if (std::isfinite(fn) && fn <= fx + opt.armijo_c * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.status = LocalStatus::line_search_failed;
      break;
    }
    if (!central_gradient(counted, {xn.data(), static_cast<std::size_t>(n)}, opt.fd_step,
                          {gn.data(), static_cast<std::size_t>(n)})) {
      // Keep the accepted point; without a gradient there is no next direction.
      x = xn;
      fx = fn;
      ++res.iterations;
      res.trace.push_back({res.iterations, fx, std::numeric_limits<double>::quiet_NaN()});
      res.status = LocalStatus::stalled;
      break;
    }
    binv = bfgs_update(binv, xn - x, gn - g).binv;
    x = xn;
    fx = fn;
    g = gn;
    ++res.iterations;
    res.trace.push_back({res.iterations, fx, g.norm()});
  }
  res.x.assign(x.data(), x.data() + n);
  res.f = fx;
  return res;
}

}  // namespace fdtrfit

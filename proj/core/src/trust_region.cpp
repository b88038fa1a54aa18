#include <cmath>

#include "fdtrfit/error.hpp"
#include "fdtrfit/local_opt.hpp"

namespace fdtrfit {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

}  // namespace

VectorXd dogleg_step(const MatrixXd& J, const VectorXd& r, double delta) {
  const VectorXd g = J.transpose() * r;
  const VectorXd p_gn = -J.completeOrthogonalDecomposition().solve(r);
  if (p_gn.allFinite() && p_gn.norm() <= delta) return p_gn;

  const double gg = g.squaredNorm();
  const double jg = (J * g).squaredNorm();
  if (gg == 0.0) return VectorXd::Zero(g.size());
  if (jg == 0.0 || !p_gn.allFinite()) return -delta / std::sqrt(gg) * g;
  const VectorXd p_sd = -(gg / jg) * g;
  if (p_sd.norm() >= delta) return -delta / std::sqrt(gg) * g;

  // Walk from the Cauchy point toward the Gauss-Newton point to the boundary.
  const VectorXd d = p_gn - p_sd;
  const double a = d.squaredNorm();
  const double b = 2.0 * p_sd.dot(d);
  const double c = p_sd.squaredNorm() - delta * delta;
  const double tau = (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
  return p_sd + tau * d;
}

LocalResult trust_region_lsq(const ResidualFn& rfn, std::span<const double> x0,
                             const TrustRegionOptions& opt) {
  const auto n = static_cast<Eigen::Index>(x0.size());
  if (n == 0) throw ContractError("trust_region: empty start vector");
  if (!(opt.initial_radius > 0.0 && opt.max_radius >= opt.initial_radius)) {
    throw ContractError("trust_region: need 0 < initial_radius <= max_radius");
  }
  LocalResult res;
  // Residuals that fail or come back non-finite mark the point as unusable.
  auto residuals = [&](const VectorXd& x, VectorXd& r) {
    ++res.evals;
    std::vector<double> v;
    try {
      v = rfn({x.data(), static_cast<std::size_t>(x.size())});
    } catch (const NumericalError&) {
      return false;
    }
    r = Eigen::Map<VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    return r.allFinite();
  };
  auto out_of_evals = [&] { return opt.max_evals && res.evals >= *opt.max_evals; };

  VectorXd x = Eigen::Map<const VectorXd>(x0.data(), n);
  VectorXd r;
  if (!residuals(x, r)) throw ContractError("trust_region: residuals are not finite at the start point");
  const auto m = r.size();
  double phi = 0.5 * r.squaredNorm();
  double delta = opt.initial_radius;
  MatrixXd J(m, n);
  VectorXd rp, xt, rt;

  auto jacobian = [&]() {
    for (Eigen::Index j = 0; j < n; ++j) {
      xt = x;
      xt[j] += opt.fd_step;
      if (!residuals(xt, rp) || rp.size() != m) return false;
      J.col(j) = (rp - r) / opt.fd_step;
    }
    return true;
  };

  bool have_jacobian = jacobian();
  VectorXd g = have_jacobian ? VectorXd(J.transpose() * r) : VectorXd::Zero(n);
  res.trace.push_back({0, 2.0 * phi, have_jacobian ? g.norm() : std::numeric_limits<double>::quiet_NaN()});
  res.status = LocalStatus::max_iter;
  std::size_t rejections = 0;
  std::size_t accepted = 0;

  while (true) {
    if (!have_jacobian) {
      res.status = LocalStatus::stalled;
      break;
    }
    if (g.norm() < opt.tol) {
      res.status = LocalStatus::converged;
      break;
    }
    if (res.iterations >= opt.max_iter || out_of_evals()) break;
    ++res.iterations;

    const VectorXd p = dogleg_step(J, r, delta);
    const double predicted = -(g.dot(p) + 0.5 * (J * p).squaredNorm());
    if (!(predicted > 0.0)) {
      res.status = LocalStatus::stalled;
      break;
    }
    xt = x + p;
    double rho = -std::numeric_limits<double>::infinity();
    double phi_t = 0.0;
    if (residuals(xt, rt) && rt.size() == m) {
      phi_t = 0.5 * rt.squaredNorm();
      rho = (phi - phi_t) / predicted;
    }

    const double pnorm = p.norm();
    if (rho < 0.25) {
      delta *= 0.25;
    } else if (rho > 0.75 && pnorm >= 0.99 * delta) {
      delta = std::min(2.0 * delta, opt.max_radius);
    }

    if (rho > 0.0) {
      const double rel_change = (phi - phi_t) / std::max(phi, std::numeric_limits<double>::min());
      x = xt;
      r = rt;
      phi = phi_t;
      rejections = 0;
      ++accepted;
      have_jacobian = jacobian();
      if (have_jacobian) g = J.transpose() * r;
      res.trace.push_back({accepted, 2.0 * phi, have_jacobian ? g.norm() : std::numeric_limits<double>::quiet_NaN()});
      if (rel_change < opt.tol && have_jacobian) {
        res.status = LocalStatus::converged;
        break;
      }
    } else if (++rejections >= opt.max_rejections || delta < 1e-300) {
      res.status = LocalStatus::stalled;
      break;
    }
  }
  res.x.assign(x.data(), x.data() + n);
  res.f = 2.0 * phi;
  return res;
}

}  // namespace fdtrfit

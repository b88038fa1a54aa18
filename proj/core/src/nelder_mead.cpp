#include <algorithm>
#include <cmath>
#include <numeric>

#include "fdtrfit/error.hpp"
#include "fdtrfit/local_opt.hpp"

namespace fdtrfit {

LocalResult nelder_mead_minimize(const ObjectiveFn& f, std::span<const double> x0,
                                 const NelderMeadOptions& opt) {
  const std::size_t n = x0.size();
  if (n == 0) throw ContractError("nelder_mead: empty start vector");
  if (!opt.initial_step.empty() && opt.initial_step.size() != n) {
    throw ContractError("nelder_mead: initial_step has the wrong dimension");
  }
  LocalResult res;
  auto eval = [&](const SearchVector& x) {
    ++res.evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  auto out_of_evals = [&] { return opt.max_evals && res.evals >= *opt.max_evals; };

  std::vector<SearchVector> s(n + 1, SearchVector(x0.begin(), x0.end()));
  std::vector<double> fs(n + 1);
  fs[0] = eval(s[0]);
  if (!std::isfinite(fs[0])) throw ContractError("nelder_mead: objective is not finite at the start point");
  res.trace.push_back({0, fs[0]});
  if (opt.max_iter == 0) {
    res.x = s[0];
    res.f = fs[0];
    res.status = LocalStatus::max_iter;
    return res;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double step = opt.initial_step.empty() ? (x0[i] != 0.0 ? 0.05 * x0[i] : 0.00025) : opt.initial_step[i];
    s[i + 1][i] += step;
    fs[i + 1] = eval(s[i + 1]);
  }

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    std::vector<SearchVector> s2(n + 1);
    std::vector<double> f2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s2[i] = std::move(s[order[i]]);
      f2[i] = fs[order[i]];
    }
    s = std::move(s2);
    fs = std::move(f2);
  };
  auto affine = [&](const SearchVector& c, const SearchVector& w, double t) {
    // c + t (c - w)
    SearchVector y(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = c[k] + t * (c[k] - w[k]);
    return y;
  };

  sort_simplex();
  res.status = LocalStatus::max_iter;
  while (true) {
    if (fs[n] - fs[0] < opt.tol) {
      res.status = LocalStatus::converged;
      break;
    }
    if (res.iterations >= opt.max_iter || out_of_evals()) break;
    ++res.iterations;

    SearchVector c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) c[k] += s[i][k];
    }
    for (double& ck : c) ck /= static_cast<double>(n);

    bool shrink = false;
    SearchVector xr = affine(c, s[n], opt.reflect);
    const double fr = eval(xr);
    if (fr < fs[0]) {
      SearchVector xe = affine(c, s[n], opt.reflect * opt.expand);
      const double fe = eval(xe);
      if (fe < fr) {
        s[n] = std::move(xe);
        fs[n] = fe;
      } else {
        s[n] = std::move(xr);
        fs[n] = fr;
      }
    } else if (fr < fs[n - 1]) {
      s[n] = std::move(xr);
      fs[n] = fr;
    } else if (fr < fs[n]) {
      SearchVector xc = affine(c, s[n], opt.reflect * opt.contract);
      const double fc = eval(xc);
      if (fc <= fr) {
        s[n] = std::move(xc);
        fs[n] = fc;
      } else {
        shrink = true;
      }
    } else {
      SearchVector xcc = affine(c, s[n], -opt.contract);
      const double fcc = eval(xcc);
      if (fcc < fs[n]) {
        s[n] = std::move(xcc);
        fs[n] = fcc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t k = 0; k < n; ++k) s[i][k] = s[0][k] + opt.shrink * (s[i][k] - s[0][k]);
        fs[i] = eval(s[i]);
      }
    }
    sort_simplex();
    res.trace.push_back({res.iterations, fs[0]});
  }
  res.x = s[0];
  res.f = fs[0];
  return res;
}

}  // namespace fdtrfit

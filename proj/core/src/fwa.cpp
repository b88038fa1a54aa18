#include <algorithm>
#include <cmath>
#include <numeric>

#include "fdtrfit/error.hpp"
#include "fdtrfit/global_opt.hpp"

namespace fdtrfit {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Picks max(1, round(dim * U)) distinct axes.
std::vector<std::size_t> random_axes(std::size_t dim, Rng& rng) {
  std::size_t z = static_cast<std::size_t>(std::lround(static_cast<double>(dim) * uniform01(rng)));
  z = std::clamp<std::size_t>(z, 1, dim);
  std::vector<std::size_t> axes(dim);
  std::iota(axes.begin(), axes.end(), 0);
  for (std::size_t i = 0; i < z; ++i) std::swap(axes[i], axes[i + uniform_index(rng, dim - i)]);
  axes.resize(z);
  return axes;
}

std::size_t argmin(const std::vector<double>& f) {
  return static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
}

}  // namespace

void FwaParams::validate() const {
  if (fireworks < 1) throw ConfigError("fwa: fireworks must be at least 1");
  if (sparks < 1) throw ConfigError("fwa: sparks must be at least 1");
  if (!(amplitude > 0.0)) throw ConfigError("fwa: amplitude must be positive");
  if (!(max_sparks_fraction > 0.0 && max_sparks_fraction <= 1.0)) {
    throw ConfigError("fwa: max_sparks_fraction must be in (0, 1]");
  }
  if (min_sparks < 1 || min_sparks > max_sparks()) {
    throw ConfigError("fwa: need 1 <= min_sparks <= max_sparks_fraction * sparks");
  }
  if (min_sparks * fireworks > sparks) {
    throw ConfigError("fwa: min_sparks * fireworks exceeds the spark budget");
  }
}

std::size_t FwaParams::max_sparks() const {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(max_sparks_fraction * sparks)));
}

std::vector<std::size_t> fwa_spark_counts(const std::vector<double>& f, const FwaParams& p) {
  const double worst = *std::max_element(f.begin(), f.end());
  double total = 0.0;
  for (double fi : f) total += worst - fi + kEps;
  std::vector<std::size_t> s(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double share = static_cast<double>(p.sparks) * (worst - f[i] + kEps) / total;
    s[i] = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(share)), p.min_sparks,
                                   p.max_sparks());
  }
  // Rounding can overshoot M; trim the largest allocations (lowest index first).
  std::size_t sum = std::accumulate(s.begin(), s.end(), std::size_t{0});
  while (sum > p.sparks) {
    const auto it = std::max_element(s.begin(), s.end());
    if (*it <= p.min_sparks) break;
    --*it;
    --sum;
  }
  return s;
}

std::vector<double> fwa_amplitudes(const std::vector<double>& f, const FwaParams& p) {
  const double best = *std::min_element(f.begin(), f.end());
  double total = 0.0;
  for (double fi : f) total += fi - best + kEps;
  std::vector<double> a(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) a[i] = p.amplitude * (f[i] - best + kEps) / total;
  return a;
}

FireworkPopulation fwa_init(const FwaParams& p, const Box& box, Evaluator& eval, Rng& rng) {
  p.validate();
  FireworkPopulation pop;
  pop.x.assign(p.fireworks, SearchVector(box.dim()));
  for (auto& x : pop.x) {
    for (std::size_t k = 0; k < box.dim(); ++k) x[k] = uniform(rng, box.lower()[k], box.upper()[k]);
  }
  pop.f.assign(p.fireworks, std::numeric_limits<double>::infinity());
  eval.evaluate(pop.x, pop.f);
  return pop;
}

void fwa_generation(FireworkPopulation& pop, const FwaParams& p, const Box& box, Evaluator& eval,
                    Rng& rng) {
  const std::size_t n = pop.x.size();
  const std::size_t dim = box.dim();

  // Unevaluated fireworks (budget cut) must not poison the allocation sums.
  std::vector<double> f = pop.f;
  double finite_worst = -std::numeric_limits<double>::infinity();
  for (double fi : f) {
    if (std::isfinite(fi)) finite_worst = std::max(finite_worst, fi);
  }
  for (double& fi : f) {
    if (!std::isfinite(fi)) fi = std::isfinite(finite_worst) ? finite_worst : 0.0;
  }
  const auto counts = fwa_spark_counts(f, p);
  const auto amps = fwa_amplitudes(f, p);
  const std::size_t best = argmin(pop.f);

  std::vector<SearchVector> sparks;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < counts[i]; ++s) {
      SearchVector x = pop.x[i];
      for (std::size_t k : random_axes(dim, rng)) x[k] += amps[i] * box.width(k) * uniform(rng, -1.0, 1.0);
      box.constrain_in_place(x, BoundMode::reflect);
      sparks.push_back(std::move(x));
    }
  }
  for (std::size_t g = 0; g < p.gaussian_sparks; ++g) {
    SearchVector x = pop.x[uniform_index(rng, n)];
    const double scale = 1.0 + standard_normal(rng);
    for (std::size_t k : random_axes(dim, rng)) x[k] += (pop.x[best][k] - x[k]) * scale;
    box.constrain_in_place(x, BoundMode::reflect);
    sparks.push_back(std::move(x));
  }
  std::vector<double> sf(sparks.size());
  eval.evaluate(sparks, sf);

  std::vector<SearchVector> cand = std::move(pop.x);
  std::vector<double> cf = std::move(pop.f);
  cand.insert(cand.end(), std::make_move_iterator(sparks.begin()), std::make_move_iterator(sparks.end()));
  cf.insert(cf.end(), sf.begin(), sf.end());

  // Keep the best, then fill by roulette on summed distance to all candidates.
  const std::size_t keep = argmin(cf);
  std::vector<double> weight(cand.size(), 0.0);
  for (std::size_t i = 0; i < cand.size(); ++i) {
    for (std::size_t j = i + 1; j < cand.size(); ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) d2 += (cand[i][k] - cand[j][k]) * (cand[i][k] - cand[j][k]);
      const double d = std::sqrt(d2);
      weight[i] += d;
      weight[j] += d;
    }
  }
  std::vector<bool> taken(cand.size(), false);
  taken[keep] = true;
  FireworkPopulation next;
  next.x.push_back(cand[keep]);
  next.f.push_back(cf[keep]);
  while (next.x.size() < n) {
    double total = 0.0;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (!taken[i]) total += weight[i];
    }
    std::size_t pick = cand.size();
    if (total > 0.0) {
      double u = uniform01(rng) * total;
      for (std::size_t i = 0; i < cand.size(); ++i) {
        if (taken[i] || weight[i] <= 0.0) continue;
        pick = i;
        u -= weight[i];
        if (u < 0.0) break;
      }
    }
    if (pick == cand.size()) {
      std::size_t r = uniform_index(rng, cand.size() - next.x.size());
      for (std::size_t i = 0; i < cand.size(); ++i) {
        if (taken[i]) continue;
        if (r-- == 0) {
          pick = i;
          break;
        }
      }
    }
    taken[pick] = true;
    next.x.push_back(cand[pick]);
    next.f.push_back(cf[pick]);
  }
  pop = std::move(next);
}

}  // namespace fdtrfit

#include "fdtrfit/error.hpp"
#include "fdtrfit/global_opt.hpp"

namespace fdtrfit {

void PsoParams::validate() const {
  if (particles < 1) throw ConfigError("pso: particles must be at least 1");
  if (!(inertia >= 0.0) || !(c1 >= 0.0) || !(c2 >= 0.0)) {
    throw ConfigError("pso: inertia, c1 and c2 must be non-negative");
  }
  if (!(initial_velocity >= 0.0)) throw ConfigError("pso: initial_velocity must be non-negative");
}

namespace {

void refresh_bests(SwarmState& s) {
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    if (s.f[i] < s.pbest_f[i]) {
      s.pbest_f[i] = s.f[i];
      s.pbest[i] = s.x[i];
    }
    if (s.pbest_f[i] < s.gbest_f) {
      s.gbest_f = s.pbest_f[i];
      s.gbest = s.pbest[i];
    }
  }
}

}  // namespace

SwarmState pso_init(const PsoParams& p, const Box& box, Evaluator& eval, Rng& rng) {
  p.validate();
  const std::size_t n = p.particles;
  const std::size_t d = box.dim();
  SwarmState s;
  s.x.assign(n, SearchVector(d));
  s.v.assign(n, SearchVector(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) s.x[i][k] = uniform(rng, box.lower()[k], box.upper()[k]);
    for (std::size_t k = 0; k < d; ++k) {
      const double vmax = p.initial_velocity * box.width(k);
      s.v[i][k] = uniform(rng, -vmax, vmax);
    }
  }
  s.f.assign(n, std::numeric_limits<double>::infinity());
  s.pbest = s.x;
  s.pbest_f.assign(n, std::numeric_limits<double>::infinity());
  s.gbest = s.x.front();
  eval.evaluate(s.x, s.f);
  refresh_bests(s);
  return s;
}

void pso_step(SwarmState& s, const PsoParams& p, const Box& box, Evaluator& eval, Rng& rng) {
  const std::size_t d = box.dim();
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    auto& x = s.x[i];
    auto& v = s.v[i];
    for (std::size_t k = 0; k < d; ++k) {
      const double r1 = uniform01(rng);
      const double r2 = uniform01(rng);
      v[k] = p.inertia * v[k] + p.c1 * r1 * (s.pbest[i][k] - x[k]) + p.c2 * r2 * (s.gbest[k] - x[k]);
    }
    for (std::size_t k = 0; k < d; ++k) {
      x[k] += v[k];
      if (x[k] < box.lower()[k] || x[k] > box.upper()[k]) v[k] = -v[k];
    }
    box.constrain_in_place(x, BoundMode::reflect);
  }
  eval.evaluate(s.x, s.f);
  refresh_bests(s);
}

}  // namespace fdtrfit

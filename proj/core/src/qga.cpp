#include <algorithm>
#include <cmath>

#include "fdtrfit/error.hpp"
#include "fdtrfit/global_opt.hpp"

namespace fdtrfit {

void QgaParams::validate() const {
  if (population < 1) throw ConfigError("qga: population must be at least 1");
  if (!(theta >= 0.0)) throw ConfigError("qga: theta must be non-negative");
  if (!(ratio_cap > 0.0)) throw ConfigError("qga: ratio_cap must be positive");
  if (!(best_floor > 0.0)) throw ConfigError("qga: best_floor must be positive");
  if (bits_per_dim < 1 || bits_per_dim > 52) throw ConfigError("qga: bits_per_dim must be in [1, 52]");
}

Qubit rotate(Qubit q, double delta) {
  const double c = std::cos(delta);
  const double s = std::sin(delta);
  return {c * q.alpha - s * q.beta, s * q.alpha + c * q.beta};
}

double qga_angle(const QgaParams& p, double f, double f_best) {
  const double denom = std::max(std::abs(f_best), p.best_floor);
  return p.theta * std::min(std::abs(f) / denom, p.ratio_cap);
}

double qga_direction(Qubit q, std::uint8_t target_bit) {
  // A positive rotation moves (alpha, beta) = (cos t, sin t) to larger t,
  // which raises |beta|^2 exactly when alpha * beta > 0.
  const double ab = q.alpha * q.beta;
  if (target_bit) {
    if (q.alpha == 0.0) return 0.0;
    if (ab == 0.0) return 1.0;
    return ab > 0.0 ? 1.0 : -1.0;
  }
  if (q.beta == 0.0) return 0.0;
  if (ab == 0.0) return 1.0;
  return ab > 0.0 ? -1.0 : 1.0;
}

QuantumPopulation qga_init(const QgaParams& p, std::size_t dim) {
  p.validate();
  const std::size_t len = dim * static_cast<std::size_t>(p.bits_per_dim);
  QuantumPopulation pop;
  pop.qubits.assign(p.population, std::vector<Qubit>(len));
  pop.measured.assign(p.population, Chromosome(len, 0));
  pop.fitness.assign(p.population, std::numeric_limits<double>::infinity());
  return pop;
}

void qga_generation(QuantumPopulation& pop, const QgaParams& p, const Box& box, Evaluator& eval,
                    Rng& rng) {
  const std::size_t n = pop.qubits.size();
  std::vector<SearchVector> points(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& bits = pop.measured[i];
    for (std::size_t j = 0; j < bits.size(); ++j) {
      const double b = pop.qubits[i][j].beta;
      bits[j] = uniform01(rng) < b * b ? 1 : 0;
    }
    points[i] = box.decode_bits(bits, p.bits_per_dim);
  }
  eval.evaluate(points, pop.fitness);

  for (std::size_t i = 0; i < n; ++i) {
    if (pop.fitness[i] < pop.best_f) {
      pop.best_f = pop.fitness[i];
      pop.best_bits = pop.measured[i];
      pop.best_x = points[i];
    }
  }
  if (pop.best_bits.empty()) return;

  for (std::size_t i = 0; i < n; ++i) {
    if (!(pop.fitness[i] > pop.best_f) || !std::isfinite(pop.fitness[i])) continue;
    const double angle = qga_angle(p, pop.fitness[i], pop.best_f);
    auto& qs = pop.qubits[i];
    for (std::size_t j = 0; j < qs.size(); ++j) {
      if (pop.measured[i][j] == pop.best_bits[j]) continue;
      const double dir = qga_direction(qs[j], pop.best_bits[j]);
      if (dir != 0.0) qs[j] = rotate(qs[j], dir * angle);
    }
  }
}

}  // namespace fdtrfit

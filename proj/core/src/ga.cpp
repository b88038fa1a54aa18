#include <algorithm>
#include <numeric>

#include "fdtrfit/error.hpp"
#include "fdtrfit/global_opt.hpp"

namespace fdtrfit {

void GaParams::validate() const {
  if (population < 2) throw ConfigError("ga: population must be at least 2");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) throw ConfigError("ga: crossover_rate must be in [0, 1]");
  if (mutation_rate && !(*mutation_rate >= 0.0 && *mutation_rate <= 1.0)) {
    throw ConfigError("ga: mutation_rate must be in [0, 1]");
  }
  if (bits_per_dim < 1 || bits_per_dim > 52) throw ConfigError("ga: bits_per_dim must be in [1, 52]");
  if (elite >= population) throw ConfigError("ga: elite must be smaller than the population");
  if (tournament < 1) throw ConfigError("ga: tournament size must be at least 1");
}

double GaParams::mutation_for(std::size_t dim) const {
  return mutation_rate ? *mutation_rate : 1.0 / (static_cast<double>(dim) * bits_per_dim);
}

namespace {

std::vector<SearchVector> decode_all(const std::vector<Chromosome>& c, const Box& box, int bits) {
  std::vector<SearchVector> out;
  out.reserve(c.size());
  for (const auto& ch : c) out.push_back(box.decode_bits(ch, bits));
  return out;
}

}  // namespace

GaPopulation ga_init(const GaParams& p, const Box& box, Evaluator& eval, Rng& rng) {
  p.validate();
  const std::size_t len = box.dim() * static_cast<std::size_t>(p.bits_per_dim);
  GaPopulation pop;
  pop.chromosomes.assign(p.population, Chromosome(len));
  for (auto& ch : pop.chromosomes) {
    for (auto& b : ch) b = static_cast<std::uint8_t>(rng() >> 63);
  }
  pop.fitness.assign(p.population, std::numeric_limits<double>::infinity());
  eval.evaluate(decode_all(pop.chromosomes, box, p.bits_per_dim), pop.fitness);
  return pop;
}

std::size_t tournament_select(const std::vector<double>& fitness, std::size_t size, Rng& rng) {
  std::size_t winner = uniform_index(rng, fitness.size());
  for (std::size_t t = 1; t < size; ++t) {
    const std::size_t c = uniform_index(rng, fitness.size());
    if (fitness[c] < fitness[winner]) winner = c;
  }
  return winner;
}

void ga_generation(GaPopulation& pop, const GaParams& p, const Box& box, Evaluator& eval, Rng& rng) {
  const std::size_t n = pop.chromosomes.size();
  const std::size_t len = pop.chromosomes.front().size();
  const double pm = p.mutation_for(box.dim());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pop.fitness[a] < pop.fitness[b]; });

  std::vector<Chromosome> next;
  std::vector<double> next_f;
  next.reserve(n);
  for (std::size_t e = 0; e < p.elite; ++e) {
    next.push_back(pop.chromosomes[order[e]]);
    next_f.push_back(pop.fitness[order[e]]);
  }

  while (next.size() < n) {
    Chromosome a = pop.chromosomes[tournament_select(pop.fitness, p.tournament, rng)];
    Chromosome b = pop.chromosomes[tournament_select(pop.fitness, p.tournament, rng)];
    if (len > 1 && uniform01(rng) < p.crossover_rate) {
      const std::size_t cut = 1 + uniform_index(rng, len - 1);
      std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(cut), a.end(),
                       b.begin() + static_cast<std::ptrdiff_t>(cut));
    }
    for (auto* child : {&a, &b}) {
      for (auto& bit : *child) {
        if (uniform01(rng) < pm) bit ^= 1;
      }
    }
    next.push_back(std::move(a));
    if (next.size() < n) next.push_back(std::move(b));
  }

  const std::size_t fresh = n - p.elite;
  std::vector<SearchVector> points;
  points.reserve(fresh);
  for (std::size_t i = p.elite; i < n; ++i) points.push_back(box.decode_bits(next[i], p.bits_per_dim));
  std::vector<double> f(fresh);
  eval.evaluate(points, f);
  next_f.insert(next_f.end(), f.begin(), f.end());

  pop.chromosomes = std::move(next);
  pop.fitness = std::move(next_f);
}

}  // namespace fdtrfit

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fdtrfit/evaluation.hpp"
#include "fdtrfit/param_space.hpp"
#include "fdtrfit/random.hpp"

namespace fdtrfit {

enum class GlobalAlgorithm { ga, qga, pso, fwa };
std::string to_string(GlobalAlgorithm a);
/// Accepts "ga", "qga", "pso", "fwa" (case-insensitive).
std::optional<GlobalAlgorithm> parse_global_algorithm(const std::string& s);

// ---------------------------------------------------------------- PSO

struct PsoParams {
  std::size_t particles = 30;
  double inertia = 0.7;
  double c1 = 1.5;
  double c2 = 1.5;
  double initial_velocity = 0.5;  // fraction of each axis width
  void validate() const;
};

struct SwarmState {
  std::vector<SearchVector> x;
  std::vector<SearchVector> v;
  std::vector<double> f;
  std::vector<SearchVector> pbest;
  std::vector<double> pbest_f;
  SearchVector gbest;
  double gbest_f = std::numeric_limits<double>::infinity();
};

SwarmState pso_init(const PsoParams& p, const Box& box, Evaluator& eval, Rng& rng);
/// One velocity/position update, evaluation and personal/global best
/// refresh. A coordinate reflected off a bound also has its velocity negated.
void pso_step(SwarmState& s, const PsoParams& p, const Box& box, Evaluator& eval, Rng& rng);

// ---------------------------------------------------------------- GA

struct GaParams {
  std::size_t population = 100;
  double crossover_rate = 0.8;
  std::optional<double> mutation_rate;  // default 1 / (dim * bits)
  int bits_per_dim = 20;
  std::size_t elite = 1;
  std::size_t tournament = 2;
  void validate() const;
  double mutation_for(std::size_t dim) const;
};

using Chromosome = std::vector<std::uint8_t>;

struct GaPopulation {
  std::vector<Chromosome> chromosomes;
  std::vector<double> fitness;
};

GaPopulation ga_init(const GaParams& p, const Box& box, Evaluator& eval, Rng& rng);
/// Index of the tournament winner among `size` uniformly drawn entrants.
std::size_t tournament_select(const std::vector<double>& fitness, std::size_t size, Rng& rng);
void ga_generation(GaPopulation& pop, const GaParams& p, const Box& box, Evaluator& eval, Rng& rng);

// ---------------------------------------------------------------- QGA

struct QgaParams {
  std::size_t population = 40;
  double theta = 0.01 * 3.141592653589793;
  double ratio_cap = 10.0;
  double best_floor = 1e-12;
  int bits_per_dim = 20;
  void validate() const;
};

struct Qubit {
  double alpha = 0.7071067811865476;
  double beta = 0.7071067811865476;
};

/// Applies [[cos d, -sin d], [sin d, cos d]] to (alpha, beta).
Qubit rotate(Qubit q, double delta);

struct QuantumPopulation {
  std::vector<std::vector<Qubit>> qubits;  // [individual][bit]
  std::vector<Chromosome> measured;
  std::vector<double> fitness;
  Chromosome best_bits;
  SearchVector best_x;
  double best_f = std::numeric_limits<double>::infinity();
};

/// All qubits in equal superposition; nothing evaluated yet.
QuantumPopulation qga_init(const QgaParams& p, std::size_t dim);
/// Rotation magnitude theta * min(|F / F_best|, cap) with |F_best| floored.
double qga_angle(const QgaParams& p, double f, double f_best);
/// Signed rotation steering `q` toward `target_bit`; 0 when already certain.
double qga_direction(Qubit q, std::uint8_t target_bit);
/// Measure, decode, evaluate, refresh best-so-far, rotate.
void qga_generation(QuantumPopulation& pop, const QgaParams& p, const Box& box, Evaluator& eval,
                    Rng& rng);

// ---------------------------------------------------------------- FWA

struct FwaParams {
  std::size_t fireworks = 5;
  std::size_t sparks = 50;         // M
  double amplitude = 0.4;          // A_max as a fraction of each axis width
  std::size_t gaussian_sparks = 5;
  std::size_t min_sparks = 2;
  double max_sparks_fraction = 0.8;
  void validate() const;
  std::size_t max_sparks() const;
};

struct FireworkPopulation {
  std::vector<SearchVector> x;
  std::vector<double> f;
};

std::vector<std::size_t> fwa_spark_counts(const std::vector<double>& f, const FwaParams& p);
/// Amplitudes as fractions of axis width.
std::vector<double> fwa_amplitudes(const std::vector<double>& f, const FwaParams& p);
FireworkPopulation fwa_init(const FwaParams& p, const Box& box, Evaluator& eval, Rng& rng);
void fwa_generation(FireworkPopulation& pop, const FwaParams& p, const Box& box, Evaluator& eval,
                    Rng& rng);

// ---------------------------------------------------------------- runner

struct GlobalParams {
  PsoParams pso;
  GaParams ga;
  QgaParams qga;
  FwaParams fwa;
  std::size_t workers = 1;
};

struct RunResult {
  SearchVector best_x;
  double best_f = std::numeric_limits<double>::infinity();
  std::size_t evals = 0;
  std::vector<TracePoint> trace;
  TerminatedBy terminated_by = TerminatedBy::evals;
};

/// Runs `alg` from a uniformly random start until a budget rule fires.
/// Objective failures abort the run; the rethrown error names the algorithm
/// and evaluation count.
RunResult run_global(GlobalAlgorithm alg, const ObjectiveFn& f, const Box& box, const Budget& budget,
                     std::uint64_t seed, const GlobalParams& params = {});

}  // namespace fdtrfit

#include "fdtrfit/objective.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fdtrfit/error.hpp"
#include "fdtrfit/random.hpp"

namespace fdtrfit {

void MeasurementSet::validate() const {
  spot.validate();
  if (grid.size() == 0) throw ContractError("measurement set has an empty frequency grid");
  if (phase_deg.size() != grid.size()) {
    throw ContractError("measurement set has " + std::to_string(phase_deg.size()) +
                        " phases for " + std::to_string(grid.size()) + " frequencies");
  }
  for (double p : phase_deg) {
    if (!std::isfinite(p)) throw ContractError("measurement set contains a non-finite phase");
  }
}

FitProblem::FitProblem(SampleStack stack, ParameterBinding binding, ParameterSpace space,
                       std::vector<MeasurementSet> datasets, QuadratureSpec quad)
    : stack_(std::move(stack)),
      binding_(std::move(binding)),
      space_(std::move(space)),
      datasets_(std::move(datasets)),
      quad_(quad) {
  if (datasets_.empty()) throw ConfigError("fit problem needs at least one dataset");
  stack_.validate();
  binding_.validate(stack_);
  for (const auto& name : space_.fit_names()) {
    if (!binding_.find(name)) throw ConfigError("fit parameter '" + name + "' is not bound to the stack");
  }
  models_.reserve(datasets_.size());
  for (const auto& d : datasets_) {
    d.validate();
    models_.emplace_back(d.spot, d.grid, quad_);
    residual_count_ += d.grid.size();
  }
}

SampleStack FitProblem::stack_at(std::span<const double> v) const {
  const auto phys = space_.to_physical(v);
  // Unconstrained local searches can push log10 coordinates past the range of double.
  for (std::size_t k = 0; k < phys.size(); ++k) {
    if (!(phys[k] > 0.0) || !std::isfinite(phys[k])) {
      throw NumericalError("parameter " + space_.fit(k).name + " is not representable at scaled value " +
                           std::to_string(v[k]));
    }
  }
  return resolve(stack_, binding_, space_, phys);
}

std::vector<std::vector<double>> FitProblem::simulate_stack(const SampleStack& stack) const {
  std::vector<std::vector<double>> out;
  out.reserve(models_.size());
  for (const auto& m : models_) out.push_back(m.phases(stack));
  return out;
}

std::vector<std::vector<double>> FitProblem::simulate(std::span<const double> v) const {
  return simulate_stack(stack_at(v));
}

void FitProblem::residuals(std::span<const double> v, std::span<double> out) const {
  if (out.size() != residual_count_) throw ContractError("residuals: output size mismatch");
  const SampleStack stack = stack_at(v);
  std::size_t offset = 0;
  try {
    for (std::size_t d = 0; d < models_.size(); ++d) {
      const std::size_t n = datasets_[d].grid.size();
      auto slot = out.subspan(offset, n);
      models_[d].phases(stack, slot);
      for (std::size_t i = 0; i < n; ++i) slot[i] = datasets_[d].phase_deg[i] - slot[i];
      offset += n;
    }
  } catch (const NumericalError& e) {
    std::ostringstream os;
    os.precision(17);
    os << e.what() << " [parameters:";
    const auto phys = space_.to_physical(v);
    for (std::size_t k = 0; k < phys.size(); ++k) os << ' ' << space_.fit(k).name << '=' << phys[k];
    os << ']';
    throw NumericalError(os.str());
  }
}

std::vector<double> FitProblem::residuals(std::span<const double> v) const {
  std::vector<double> out(residual_count_);
  residuals(v, out);
  return out;
}

double FitProblem::fitness(std::span<const double> v) const {
  thread_local std::vector<double> r;
  r.resize(residual_count_);
  residuals(v, r);
  // Per-dataset partial sums, then added: F_total = sum of F_dataset.
  double total = 0.0;
  std::size_t offset = 0;
  for (const auto& d : datasets_) {
    double partial = 0.0;
    for (std::size_t i = 0; i < d.grid.size(); ++i) partial += r[offset + i] * r[offset + i];
    total += partial;
    offset += d.grid.size();
  }
  return total;
}

FitProblem FitProblem::with_datasets(std::vector<MeasurementSet> datasets) const {
  return FitProblem(stack_, binding_, space_, std::move(datasets), quad_);
}

std::vector<MeasurementSet> synthesize(const FitProblem& problem_template,
                                       std::span<const double> truth, double noise_sigma_deg,
                                       std::uint64_t seed) {
  const ParameterSpace& space = problem_template.space();
  if (truth.size() != space.dim()) throw ContractError("synthesize: truth has the wrong dimension");
  if (!(noise_sigma_deg >= 0.0)) throw ContractError("synthesize: noise sigma must be non-negative");
  const SearchVector scaled = space.to_scaled(truth);
  if (!space.box().contains(scaled)) throw ContractError("synthesize: truth lies outside the bounds");

  const SampleStack stack = resolve(problem_template.stack(), problem_template.binding(), space, truth);
  Rng rng(seed);
  std::vector<MeasurementSet> out;
  for (std::size_t d = 0; d < problem_template.datasets().size(); ++d) {
    const auto& tmpl = problem_template.datasets()[d];
    MeasurementSet m{tmpl.spot, tmpl.grid, problem_template.models()[d].phases(stack), noise_sigma_deg};
    if (noise_sigma_deg > 0.0) {
      for (double& p : m.phase_deg) p += noise_sigma_deg * standard_normal(rng);
    }
    out.push_back(std::move(m));
  }
  return out;
}

double default_target_fitness(const FitProblem& problem, std::span<const double> truth) {
  const double at_truth = problem.fitness(problem.space().to_scaled(truth));
  return std::max(1.1 * at_truth, 1e-6);
}

std::vector<MeasurementSet> gan_si_dataset_templates(std::size_t points_per_spot) {
  const auto grid = FrequencyGrid::log_spaced(1e4, 1e7, points_per_spot);
  std::vector<double> zeros(grid.size(), 0.0);
  return {
      MeasurementSet{SpotConfig::same(kGanSiSpotLarge), grid, zeros, 0.0},
      MeasurementSet{SpotConfig::same(kGanSiSpotSmall), grid, zeros, 0.0},
  };
}

FitProblem make_gan_si_problem(double noise_sigma_deg, std::uint64_t seed, QuadratureSpec quad) {
  auto [stack, space, binding] = build_gan_si_stack();
  FitProblem tmpl(std::move(stack), std::move(binding), std::move(space), gan_si_dataset_templates(),
                  quad);
  const auto truth = GanSiTruth{}.as_vector();
  return tmpl.with_datasets(synthesize(tmpl, truth, noise_sigma_deg, seed));
}

}  // namespace fdtrfit

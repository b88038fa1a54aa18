#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fdtrfit/forward_fdtr.hpp"
#include "fdtrfit/param_space.hpp"
#include "fdtrfit/sample_model.hpp"

namespace fdtrfit {

/// Phase-vs-frequency record for one spot size.
struct MeasurementSet {
  SpotConfig spot;
  FrequencyGrid grid;
  std::vector<double> phase_deg;
  double noise_sigma_deg = 0.0;  // metadata only

  void validate() const;
};

/// Least-squares phase fit: F(v) = sum over datasets and frequencies of
/// (measured - simulated)^2 in deg^2, datasets weighted equally.
/// Evaluation is const and thread-safe.
class FitProblem {
 public:
  FitProblem(SampleStack stack, ParameterBinding binding, ParameterSpace space,
             std::vector<MeasurementSet> datasets, QuadratureSpec quad = {});

  const SampleStack& stack() const noexcept { return stack_; }
  const ParameterBinding& binding() const noexcept { return binding_; }
  const ParameterSpace& space() const noexcept { return space_; }
  const std::vector<MeasurementSet>& datasets() const noexcept { return datasets_; }
  const QuadratureSpec& quadrature() const noexcept { return quad_; }
  const std::vector<PhaseModel>& models() const noexcept { return models_; }

  std::size_t dim() const noexcept { return space_.dim(); }
  std::size_t residual_count() const noexcept { return residual_count_; }

  /// Stack with the fit parameters set from scaled vector `v`.
  SampleStack stack_at(std::span<const double> v) const;

  /// Simulated phases per dataset at scaled vector `v`.
  std::vector<std::vector<double>> simulate(std::span<const double> v) const;
  std::vector<std::vector<double>> simulate_stack(const SampleStack& stack) const;

  /// measured - simulated, concatenated over datasets in order.
  void residuals(std::span<const double> v, std::span<double> out) const;
  std::vector<double> residuals(std::span<const double> v) const;

  double fitness(std::span<const double> v) const;

  /// Same stack, binding, space and quadrature with different data.
  FitProblem with_datasets(std::vector<MeasurementSet> datasets) const;

 private:
  SampleStack stack_;
  ParameterBinding binding_;
  ParameterSpace space_;
  std::vector<MeasurementSet> datasets_;
  QuadratureSpec quad_;
  std::vector<PhaseModel> models_;
  std::size_t residual_count_ = 0;
};

/// Forward-model phase curves at `truth` (physical units, fit order) plus
/// i.i.d. Gaussian noise. The template's datasets supply spots and grids;
/// their phases are ignored. Deterministic per seed.
std::vector<MeasurementSet> synthesize(const FitProblem& problem_template,
                                       std::span<const double> truth, double noise_sigma_deg,
                                       std::uint64_t seed);

/// Success threshold for fits of synthetic data: 1.1 F(truth), floored at
/// 1e-6 deg^2 so that noiseless data (F(truth) at rounding level) stay reachable.
double default_target_fitness(const FitProblem& problem, std::span<const double> truth);

/// Empty-phase datasets for the GaN/Si campaign: 25 log-spaced frequencies
/// from 10 kHz to 10 MHz at each spot radius, larger spot first.
std::vector<MeasurementSet> gan_si_dataset_templates(std::size_t points_per_spot = 25);

/// GaN/Si fit problem with noiseless or noisy synthetic data at GanSiTruth.
FitProblem make_gan_si_problem(double noise_sigma_deg = 0.0, std::uint64_t seed = 1,
                               QuadratureSpec quad = {});

/// CSV with header `frequency_hz,phase_deg`.
MeasurementSet read_measurement_csv(const std::filesystem::path& path, const SpotConfig& spot,
                                    double noise_sigma_deg = 0.0);
void write_measurement_csv(const std::filesystem::path& path, const MeasurementSet& set);

}  // namespace fdtrfit

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "fdtrfit/sample_model.hpp"

namespace fdtrfit {

/// 1/e^2 intensity radii of the pump and probe beams, metres.
struct SpotConfig {
  double r_pump = 0.0;
  double r_probe = 0.0;

  static SpotConfig same(double radius) { return {radius, radius}; }
  double min_radius() const { return r_pump < r_probe ? r_pump : r_probe; }
  void validate() const;
};

/// Strictly increasing list of positive modulation frequencies (Hz).
class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  explicit FrequencyGrid(std::vector<double> freqs);

  static FrequencyGrid log_spaced(double f_min, double f_max, std::size_t count);

  const std::vector<double>& freqs() const noexcept { return freqs_; }
  std::size_t size() const noexcept { return freqs_.size(); }
  double operator[](std::size_t i) const { return freqs_[i]; }

 private:
  std::vector<double> freqs_;
};

/// Fixed-order Gauss-Legendre panels on [0, lambda_max_factor / min(r)].
struct QuadratureSpec {
  int node_count = 200;
  double lambda_max_factor = 10.0;
  int panels = 4;

  void validate() const;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Surface impedance of the stack (K m^2 / W in Hankel space) at radial
/// wavenumber `lambda` (1/m) and angular frequency `omega` (rad/s). Folds the
/// stack from the bottom up with the overflow-free tanh form of the
/// layer transfer relation.
std::complex<double> fold_impedance(const SampleStack& stack, double lambda, double omega);

/// Hankel-space integral of fold_impedance weighted by the Gaussian pump and
/// probe profiles. Constant prefactors are dropped.
std::complex<double> surface_response(const SampleStack& stack, const SpotConfig& spot, double f,
                                      const QuadratureSpec& quad = {});

/// Phase of the surface response in degrees for every grid frequency.
std::vector<double> phase_signal(const SampleStack& stack, const SpotConfig& spot,
                                 const FrequencyGrid& grid, const QuadratureSpec& quad = {});

/// Complex response for every grid frequency (amplitude is |H| up to scale).
std::vector<std::complex<double>> response_curve(const SampleStack& stack, const SpotConfig& spot,
                                                 const FrequencyGrid& grid,
                                                 const QuadratureSpec& quad = {});

/// Precomputed quadrature for one spot/grid pair. Evaluating a stack reuses
/// the nodes and kernel weights, which is what the objective does thousands
/// of times per run. Immutable after construction; safe to share across
/// threads.
class PhaseModel {
 public:
  PhaseModel(const SpotConfig& spot, FrequencyGrid grid, const QuadratureSpec& quad);

  const SpotConfig& spot() const noexcept { return spot_; }
  const FrequencyGrid& grid() const noexcept { return grid_; }
  const QuadratureSpec& quadrature() const noexcept { return quad_; }

  /// Writes grid().size() phases (degrees) into `out`.
  /// Throws NumericalError if any response is non-finite.
  void phases(const SampleStack& stack, std::span<double> out) const;
  std::vector<double> phases(const SampleStack& stack) const;

  std::vector<std::complex<double>> responses(const SampleStack& stack) const;

 private:
  void evaluate(const SampleStack& stack, std::span<std::complex<double>> out) const;

  SpotConfig spot_;
  FrequencyGrid grid_;
  QuadratureSpec quad_;
  std::vector<double> lambda_sq_;  // node lambda^2
  std::vector<double> kernel_;     // weight * lambda * exp(-lambda^2 (rp^2 + rs^2) / 8)
};

}  // namespace fdtrfit

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fdtrfit/global_opt.hpp"
#include "fdtrfit/hybrid.hpp"
#include "fdtrfit/objective.hpp"

namespace fdtrfit {

/// One column of the algorithm matrix. Exactly one of three shapes:
/// global only, local only (random start), or global followed by local.
struct AlgorithmSpec {
  std::string id;
  std::optional<GlobalAlgorithm> global;
  std::optional<LocalAlgorithm> local;
  Budget budget = Budget::evals(30000);  // global budget, or the hybrid switch
  double local_tol = 1e-6;
  std::size_t local_max_iter = 1000;
  std::optional<std::size_t> local_max_evals;

  bool is_hybrid() const noexcept { return global.has_value() && local.has_value(); }
  void validate() const;
};

/// "HPSO", "PSO", "BFGS", "HGA-NelderMead", ... as produced by default_id.
AlgorithmSpec parse_algorithm_id(const std::string& id);
std::string default_id(const AlgorithmSpec& spec);

struct MeasurementFileSpec {
  std::filesystem::path path;
  SpotConfig spot;
};

/// Where the objective comes from: an analytic benchmark or an FDTR fit.
struct ProblemSpec {
  std::string benchmark;  // "Y" or "Z"; empty for an FDTR problem

  SampleStack stack;
  ParameterSpace space;
  ParameterBinding binding;
  QuadratureSpec quadrature;

  // Synthetic data (used when `files` is empty).
  std::vector<SpotConfig> spots;
  double f_min_hz = 1e4;
  double f_max_hz = 1e7;
  std::size_t points = 25;
  std::optional<std::vector<double>> truth;  // physical units, fit order
  double noise_sigma_deg = 0.5;
  std::uint64_t data_seed = 1;

  std::vector<MeasurementFileSpec> files;

  bool is_benchmark() const noexcept { return !benchmark.empty(); }
  /// Builds the fit problem, synthesizing or reading data as configured.
  FitProblem build_fdtr() const;
  /// Dataset templates (spots and grids, zero phases) for synthesis.
  std::vector<MeasurementSet> templates() const;
};

struct SuccessRule {
  std::optional<double> target_fitness;  // default: derived from truth for synthetic FDTR
  std::optional<double> relative_band;   // per-parameter |p / truth - 1| bound
};

struct CampaignConfig {
  ProblemSpec problem;
  std::vector<AlgorithmSpec> algorithms;
  std::size_t trials = 100;
  std::uint64_t master_seed = 1;
  SuccessRule success;
  std::filesystem::path out_dir = "out";
  std::size_t workers = 1;
  GlobalParams params;
  bool write_traces = false;
  std::size_t histogram_bins = 20;
  std::size_t grid_points = 2000;  // benchmark oracle grid per axis
  double sensitivity_step = 0.01;

  void validate() const;
};

/// Parses a JSON configuration; relative paths resolve against `base_dir`.
/// Every problem is reported as ConfigError with the offending key.
CampaignConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
CampaignConfig load_config(const std::filesystem::path& path);

/// Built-in GaN/Si campaign: synthetic data at GanSiTruth with the default
/// 0.5 degree noise, HPSO.
CampaignConfig default_gan_si_config();

}  // namespace fdtrfit

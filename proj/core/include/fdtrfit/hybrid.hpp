#pragma once

#include <cstdint>
#include <string>

#include "fdtrfit/global_opt.hpp"
#include "fdtrfit/local_opt.hpp"

namespace fdtrfit {

struct HybridConfig {
  GlobalAlgorithm global_alg = GlobalAlgorithm::pso;
  LocalAlgorithm local_alg = LocalAlgorithm::bfgs;
  Budget switch_budget = Budget::evals(5000);
  double local_tol = 1e-6;
  std::size_t local_max_iter = 1000;
  std::optional<std::size_t> local_max_evals;
  GlobalParams global_params;

  void validate() const;
  /// "HPSO", "HGA", ... with a suffix when the local stage is not BFGS.
  std::string label() const;
};

struct HybridResult {
  RunResult global_part;
  LocalResult local_part;
  std::size_t total_evals = 0;
  SearchVector x_final;
  double f_final = 0.0;
  bool local_improved = false;
  /// The local stage is unconstrained; its end point is clamped into the box
  /// and re-scored. Set when that moved a component by more than 1e-6.
  bool clamped = false;
};

/// Objective plus the optional residual form used by the trust-region stage.
struct HybridObjective {
  ObjectiveFn f;
  ResidualFn residuals;  // may be empty unless local_alg == trust_region
  ObjectiveFn local_f;   // optional; used by the local stage instead of f

  const ObjectiveFn& for_local() const { return local_f ? local_f : f; }
};

HybridResult run_hybrid(const HybridConfig& cfg, const HybridObjective& obj, const Box& box,
                        std::uint64_t seed);

/// Runs the chosen local method from x0 with the config's tolerances.
LocalResult run_local(LocalAlgorithm alg, const HybridObjective& obj, std::span<const double> x0,
                      double tol, std::size_t max_iter, std::optional<std::size_t> max_evals = {});

}  // namespace fdtrfit

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fdtrfit/config.hpp"
#include "fdtrfit/hybrid.hpp"

namespace fdtrfit {

/// Objective, residuals and parameter naming of whatever a campaign fits.
struct CampaignProblem {
  HybridObjective objective;  // f throws on model failure; local_f maps it to +inf
  Box box;
  std::vector<std::string> names;
  std::function<std::vector<double>(std::span<const double>)> to_physical;
  std::optional<std::vector<double>> truth;  // physical
  std::shared_ptr<const FitProblem> fdtr;    // null for benchmarks

  static CampaignProblem from_fit_problem(std::shared_ptr<const FitProblem> p,
                                          std::optional<std::vector<double>> truth);
  static CampaignProblem from_spec(const ProblemSpec& spec);
};

struct TrialRecord {
  std::string algorithm;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string status;  // terminated_by, local status, or "failed"
  double f_final = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> params;  // physical units
  std::size_t evals = 0;
  std::optional<std::size_t> switch_evals;  // hybrids only
  std::optional<double> switch_f;
  bool clamped = false;
  bool success = false;
  std::string error;
  std::vector<std::vector<std::string>> trace;  // rows of stage,index,f when requested
};

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
};

struct AlgorithmSummary {
  std::string algorithm;
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::size_t failures = 0;
  double success_rate = 0.0;
  std::vector<std::pair<double, double>> f_quantiles;  // (probability, value) over finite f_final
  double mean_evals = 0.0;
  std::size_t f_plateaus = 0;
  std::vector<std::pair<std::string, Histogram>> histograms;
};

struct TrialReport {
  std::vector<std::string> param_names;
  std::vector<TrialRecord> trials;  // sorted by (algorithm order, trial)
  std::vector<AlgorithmSummary> summaries;
  std::optional<double> target_fitness;
  std::optional<double> relative_band;
  bool deterministic = true;
  std::uint64_t master_seed = 0;
};

/// Resolved success rule: defaults filled from the problem when unset.
SuccessRule effective_success_rule(const CampaignConfig& cfg, const CampaignProblem& problem);

/// One trial of one algorithm; never throws for model failures.
TrialRecord run_trial(const AlgorithmSpec& alg, const CampaignProblem& problem, const GlobalParams& params,
                      std::uint64_t seed, bool keep_trace);

TrialReport run_campaign(const CampaignConfig& cfg);
TrialReport run_campaign(const CampaignConfig& cfg, const CampaignProblem& problem);

bool is_success(const TrialRecord& t, const SuccessRule& rule, const std::optional<std::vector<double>>& truth);
/// Fraction of records of `algorithm` (all when empty) meeting `rule`.
double success_rate(const TrialReport& report, const SuccessRule& rule,
                    const std::optional<std::vector<double>>& truth, const std::string& algorithm = {});

/// Type-7 sample quantile (linear interpolation between order statistics).
double quantile(std::vector<double> values, double p);

/// `bins` equal bins over [min, max]; right-open except the last.
Histogram histogram(const std::vector<double>& values, std::size_t bins);

/// Groups of at least `min_members` values separated from the next group by
/// a ratio greater than `ratio` in sorted order. Non-positive values are
/// ignored. Returns the group count (0 when too few values).
std::size_t count_plateaus(std::vector<double> values, double ratio = 10.0, std::size_t min_members = 5);

}  // namespace fdtrfit

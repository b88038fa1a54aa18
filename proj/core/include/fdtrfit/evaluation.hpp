#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdtrfit/param_space.hpp"

namespace fdtrfit {

/// Scalar objective to minimise. Must be safe to call concurrently.
using ObjectiveFn = std::function<double(std::span<const double>)>;

/// Residual vector r(x); the least-squares objective is sum r_i^2.
using ResidualFn = std::function<std::vector<double>(std::span<const double>)>;

/// Stopping rules for a global run or a hybrid switch. Unset fields are inactive.
struct Budget {
  std::optional<std::size_t> max_evals;
  std::optional<double> max_seconds;
  std::optional<double> target_fitness;

  static Budget evals(std::size_t n) { return Budget{n, std::nullopt, std::nullopt}; }

  /// Throws ContractError("empty budget") when no rule can ever fire.
  void validate() const;
  bool deterministic() const noexcept { return !max_seconds.has_value(); }
};

enum class TerminatedBy { evals, time, target };
std::string to_string(TerminatedBy t);

struct TracePoint {
  std::size_t evals = 0;
  double best = std::numeric_limits<double>::infinity();
};

/// Counts objective calls against a Budget and archives the best point.
/// Batches are evaluated in index order (optionally on several threads);
/// the archive is updated in index order afterwards, so results do not
/// depend on the worker count.
class Evaluator {
 public:
  Evaluator(ObjectiveFn f, Budget budget, std::size_t workers = 1);

  /// Unbounded evaluator for driving single steps in tests and tools.
  static Evaluator unbounded(ObjectiveFn f, std::size_t workers = 1);

  /// Evaluates as many leading points as the evaluation budget allows and
  /// returns that count; unevaluated slots of `out` are set to +inf.
  std::size_t evaluate(std::span<const SearchVector> points, std::span<double> out);
  double evaluate_one(std::span<const double> x);

  /// True once any stopping rule has fired (checked after each batch).
  bool should_stop() const noexcept { return stop_.has_value(); }
  std::optional<TerminatedBy> reason() const noexcept { return stop_; }

  std::size_t evals() const noexcept { return evals_; }
  std::size_t remaining_evals() const noexcept;
  double best_fitness() const noexcept { return best_f_; }
  const SearchVector& best_point() const noexcept { return best_x_; }
  const std::vector<TracePoint>& trace() const noexcept { return trace_; }
  double elapsed_seconds() const;

 private:
  void update_stop();

  ObjectiveFn f_;
  Budget budget_;
  std::size_t workers_;
  std::size_t evals_ = 0;
  double best_f_ = std::numeric_limits<double>::infinity();
  SearchVector best_x_;
  std::vector<TracePoint> trace_;
  std::optional<TerminatedBy> stop_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace fdtrfit

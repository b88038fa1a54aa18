#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "fdtrfit/error.hpp"
#include "fdtrfit/evaluation.hpp"

namespace fdtrfit {

void Budget::validate() const {
  if (!max_evals && !max_seconds && !target_fitness) {
    throw ContractError("empty budget: no stopping rule configured");
  }
  if (max_evals && *max_evals == 0) throw ContractError("empty budget: max_evals is 0");
  if (max_seconds && !(*max_seconds > 0.0)) throw ContractError("empty budget: max_seconds must be positive");
  if (target_fitness && std::isnan(*target_fitness)) throw ContractError("target fitness is NaN");
}

std::string to_string(TerminatedBy t) {
  switch (t) {
    case TerminatedBy::evals: return "evals";
    case TerminatedBy::time: return "time";
    case TerminatedBy::target: return "target";
  }
  return "unknown";
}

Evaluator::Evaluator(ObjectiveFn f, Budget budget, std::size_t workers)
    : f_(std::move(f)),
      budget_(budget),
      workers_(std::max<std::size_t>(1, workers)),
      start_(std::chrono::steady_clock::now()) {
  budget_.validate();
}

Evaluator Evaluator::unbounded(ObjectiveFn f, std::size_t workers) {
  Evaluator e(std::move(f), Budget{std::nullopt, std::nullopt, -std::numeric_limits<double>::infinity()},
              workers);
  return e;
}

std::size_t Evaluator::remaining_evals() const noexcept {
  if (!budget_.max_evals) return std::numeric_limits<std::size_t>::max();
  return *budget_.max_evals > evals_ ? *budget_.max_evals - evals_ : 0;
}

double Evaluator::elapsed_seconds() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

std::size_t Evaluator::evaluate(std::span<const SearchVector> points, std::span<double> out) {
  if (out.size() != points.size()) throw ContractError("Evaluator: output size mismatch");
  const std::size_t n = std::min(points.size(), remaining_evals());
  std::fill(out.begin(), out.end(), std::numeric_limits<double>::infinity());

  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t i) {
    try {
      out[i] = f_(points[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t threads = std::min(workers_, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) work(i);
      });
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) {
      evals_ += i;
      std::rethrow_exception(errors[i]);
    }
    if (std::isnan(out[i])) {
      evals_ += i;
      throw NumericalError("objective returned NaN");
    }
    if (out[i] < best_f_ || best_x_.empty()) {
      best_f_ = out[i];
      best_x_ = points[i];
    }
  }
  evals_ += n;
  if (n > 0) trace_.push_back({evals_, best_f_});
  update_stop();
  return n;
}

double Evaluator::evaluate_one(std::span<const double> x) {
  const SearchVector v(x.begin(), x.end());
  double out = 0.0;
  evaluate(std::span<const SearchVector>(&v, 1), std::span<double>(&out, 1));
  return out;
}

void Evaluator::update_stop() {
  if (budget_.target_fitness && best_f_ <= *budget_.target_fitness) {
    stop_ = TerminatedBy::target;
  } else if (budget_.max_evals && evals_ >= *budget_.max_evals) {
    stop_ = TerminatedBy::evals;
  } else if (budget_.max_seconds && elapsed_seconds() >= *budget_.max_seconds) {
    stop_ = TerminatedBy::time;
  }
}

}  // namespace fdtrfit

#include "fdtrfit/test_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "fdtrfit/error.hpp"

namespace fdtrfit {

double eval_Y(double x1, double x2) {
  return x1 * std::sin(4.0 * std::numbers::pi * x1) + x2 * std::sin(20.0 * std::numbers::pi * x2);
}

double eval_Z(double x1, double x2) {
  const double r2 = x1 * x1 + x2 * x2;
  const double s = std::sin(std::sqrt(r2));
  const double d = 1.0 + 0.001 * r2 * r2 * r2;
  return (s * s - 0.5) / (d * d) - 0.5;
}

std::vector<double> z_residuals(double x1, double x2) {
  const double r2 = x1 * x1 + x2 * x2;
  const double r = std::sqrt(r2);
  const double r6 = r2 * r2 * r2;
  const double d = 1.0 + 0.001 * r6;
  const double sinc = r > 0.0 ? std::sin(r) / r : 1.0;
  return {sinc * x1 / d, sinc * x2 / d, r * r2 * std::sqrt(0.001 + 0.5e-6 * r6) / d};
}

BenchmarkProblem benchmark_y() {
  BenchmarkProblem p;
  p.name = "Y";
  p.f = [](std::span<const double> x) { return eval_Y(x[0], x[1]); };
  p.box = Box({-3.0, 4.1}, {12.1, 5.8});
  p.known_min = KnownMinimum{{11.875, 5.775}, -17.65};
  return p;
}

BenchmarkProblem benchmark_z() {
  BenchmarkProblem p;
  p.name = "Z";
  p.f = [](std::span<const double> x) { return eval_Z(x[0], x[1]); };
  p.residuals = [](std::span<const double> x) { return z_residuals(x[0], x[1]); };
  p.box = Box({-4.0, -4.0}, {4.0, 4.0});
  p.known_min = KnownMinimum{{0.0, 0.0}, -1.0};
  return p;
}

std::optional<BenchmarkProblem> benchmark_by_name(const std::string& name) {
  if (name == "Y" || name == "y" || name == "eq8") return benchmark_y();
  if (name == "Z" || name == "z" || name == "eq15") return benchmark_z();
  return std::nullopt;
}

GridMinimum grid_enumerate(const BenchmarkProblem& problem, std::size_t n_per_axis,
                           std::size_t workers) {
  return grid_enumerate(problem.f, problem.box, n_per_axis, workers);
}

GridMinimum grid_enumerate(const ObjectiveFn& f, const Box& box, std::size_t n, std::size_t workers) {
  if (box.dim() != 2) throw ContractError("grid_enumerate: only 2-D problems are supported");
  if (n < 2) throw ContractError("grid_enumerate: need at least 2 points per axis");
  const double h1 = box.width(0) / static_cast<double>(n - 1);
  const double h2 = box.width(1) / static_cast<double>(n - 1);
  auto coord = [&](std::size_t axis, std::size_t i, double h) {
    return i == n - 1 ? box.upper()[axis] : box.lower()[axis] + static_cast<double>(i) * h;
  };

  const std::size_t threads = std::clamp<std::size_t>(workers, 1, n);
  struct Best {
    double value = std::numeric_limits<double>::infinity();
    std::size_t index = std::numeric_limits<std::size_t>::max();
  };
  std::vector<Best> best(threads);
  auto stripe = [&](std::size_t t) {
    Best b;
    double x[2];
    const std::size_t lo = n * t / threads;
    const std::size_t hi = n * (t + 1) / threads;
    for (std::size_t i = lo; i < hi; ++i) {
      x[0] = coord(0, i, h1);
      for (std::size_t j = 0; j < n; ++j) {
        x[1] = coord(1, j, h2);
        const double v = f(std::span<const double>(x, 2));
        if (v < b.value) {
          b.value = v;
          b.index = i * n + j;
        }
      }
    }
    best[t] = b;
  };
  if (threads == 1) {
    stripe(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(stripe, t);
  }
  // Stripes are contiguous and ordered, so strict < keeps the earliest tie.
  Best b;
  for (const auto& s : best) {
    if (s.value < b.value) b = s;
  }
  if (b.index == std::numeric_limits<std::size_t>::max()) {
    throw NumericalError("grid_enumerate: no finite value on the grid");
  }
  const std::size_t i = b.index / n;
  const std::size_t j = b.index % n;
  return {{coord(0, i, h1), coord(1, j, h2)}, b.value, b.index};
}

}  // namespace fdtrfit

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fdtrfit/global_opt.hpp"
#include "fdtrfit/local_opt.hpp"
#include "fdtrfit/random.hpp"
#include "fdtrfit/test_functions.hpp"
#include "oracles.hpp"

using namespace fdtrfit;

TEST_CASE("Y at tabulated points") {
  CHECK(eval_Y(11.875, 5.775) == doctest::Approx(-17.65).epsilon(1e-4));
  CHECK(std::abs(eval_Y(0.0, 4.1)) < 1e-12);
  CHECK(std::abs(eval_Y(1.0, 5.0)) < 1e-12);
}

TEST_CASE("Z at tabulated points") {
  CHECK(eval_Z(0.0, 0.0) == -1.0);
  CHECK(eval_Z(2.83, 0.0) == doctest::Approx(-0.6772).epsilon(1e-4));
  // Evaluated independently at 50 digits: -0.498482...
  CHECK(eval_Z(3.0, 4.0) == doctest::Approx(-0.4984821).epsilon(1e-6));
}

TEST_CASE("Z is radially symmetric and its residuals square to Z + 1") {
  Rng rng(10);
  for (int i = 0; i < 1000; ++i) {
    const double r = uniform(rng, 0.0, 6.0);
    const double t = uniform(rng, 0.0, 2 * std::numbers::pi);
    const double x1 = r * std::cos(t), x2 = r * std::sin(t);
    CHECK(std::abs(eval_Z(x1, x2) - eval_Z(std::hypot(x1, x2), 0.0)) < 1e-12);
    const auto res = z_residuals(x1, x2);
    double s = 0.0;
    for (double v : res) s += v * v;
    CHECK(std::abs(s - (eval_Z(x1, x2) + 1.0)) < 1e-12);
  }
}

TEST_CASE("benchmarks are finite on their boxes") {
  Rng rng(3);
  for (const auto& b : {benchmark_y(), benchmark_z()}) {
    for (int i = 0; i < 10000; ++i) {
      const std::vector<double> x{uniform(rng, b.box.lower()[0], b.box.upper()[0]),
                                  uniform(rng, b.box.lower()[1], b.box.upper()[1])};
      CHECK(std::isfinite(b.f(x)));
    }
  }
  CHECK(benchmark_by_name("eq8")->name == "Y");
  CHECK(benchmark_by_name("z")->name == "Z");
  CHECK_FALSE(benchmark_by_name("ackley").has_value());
}

TEST_CASE("grid search agrees with the naive scan") {
  const auto y = benchmark_y();
  for (std::size_t workers : {1, 3}) {
    const auto g = grid_enumerate(y, 601, workers);
    const auto o = oracle::grid_min(eval_Y, -3.0, 12.1, 4.1, 5.8, 601);
    CHECK(g.value == doctest::Approx(o.value).epsilon(1e-13));
    CHECK(g.location[0] == doctest::Approx(o.x1).epsilon(1e-13));
    CHECK(g.location[1] == doctest::Approx(o.x2).epsilon(1e-13));
  }
}

TEST_CASE("grid ties go to the first row-major point regardless of workers") {
  ObjectiveFn flat = [](std::span<const double>) { return 1.0; };
  const Box box({0.0, 0.0}, {1.0, 1.0});
  for (std::size_t w : {1, 2, 5}) {
    const auto g = grid_enumerate(flat, box, 50, w);
    CHECK(g.index == 0);
    CHECK(g.location == std::vector<double>{0.0, 0.0});
  }
  ObjectiveFn two = [](std::span<const double> x) {
    return (std::abs(x[0] - 0.5) < 1e-9 || std::abs(x[0] - 1.0) < 1e-9) && x[1] == 1.0 ? -1.0 : 0.0;
  };
  const auto g = grid_enumerate(two, box, 3, 3);
  CHECK(g.index == 1 * 3 + 2);
}

TEST_CASE("Y grid minimum at 2000 points per axis") {
  const auto y = benchmark_y();
  const auto g = grid_enumerate(y, 2000, 1);
  const double c1 = 15.1 / 1999, c2 = 1.7 / 1999;
  CHECK(std::abs(g.location[0] - 11.875) <= c1);
  CHECK(std::abs(g.location[1] - 5.775) <= c2);
  CHECK(g.value == doctest::Approx(-17.65).epsilon(1e-3));
}

TEST_CASE("Z grid minimum at the origin") {
  const auto z = benchmark_z();
  const auto g = grid_enumerate(z, 2000, 1);
  const double cell = 8.0 / 1999;
  CHECK(std::abs(g.location[0]) <= cell);
  CHECK(std::abs(g.location[1]) <= cell);
  CHECK(g.value == doctest::Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("a nested finer grid never finds a worse minimum") {
  const auto y = benchmark_y();
  for (std::size_t n : {51, 201, 1001}) {
    // 2n - 1 points contain every point of the n-point grid.
    const auto coarse = grid_enumerate(y, n, 1);
    const auto fine = grid_enumerate(y, 2 * n - 1, 1);
    CHECK(fine.value <= coarse.value + 1e-12);
  }
}

TEST_CASE("optimizer minima are certified by a finer local grid") {
  const auto y = benchmark_y();
  const auto r = run_global(GlobalAlgorithm::pso, y.f, y.box, Budget::evals(6000), 42);
  const auto coarse = grid_enumerate(y, 2000, 1);
  const double c1 = y.box.width(0) / 1999, c2 = y.box.width(1) / 1999;
  const Box local({r.best_x[0] - c1, r.best_x[1] - c2}, {r.best_x[0] + c1, r.best_x[1] + c2});
  const auto fine = grid_enumerate(y.f, local, 201, 1);
  CHECK(r.best_f >= fine.value - 1e-9);
  CHECK(r.best_f <= coarse.value);
}

TEST_CASE("local minimizers on Z agree with the known basins") {
  const auto z = benchmark_z();
  const auto r = bfgs_minimize(z.f, std::vector<double>{0.5, -0.2});
  CHECK(r.f == doctest::Approx(z.known_min->value).epsilon(1e-6));
}

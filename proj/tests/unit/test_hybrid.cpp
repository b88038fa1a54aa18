#include <doctest.h>

#include <algorithm>
#include <atomic>

#include "fdtrfit/error.hpp"
#include "fdtrfit/hybrid.hpp"
#include "fdtrfit/test_functions.hpp"
#include "oracles.hpp"

using namespace fdtrfit;

namespace {

HybridObjective y_objective() {
  const auto y = benchmark_y();
  return HybridObjective{y.f, {}, {}};
}

double median(std::vector<double> v) { return oracle::quantile(std::move(v), 0.5); }

}  // namespace

TEST_CASE("infinite switch target hands over the initial population's best") {
  const auto y = benchmark_y();
  HybridConfig cfg;
  cfg.switch_budget = Budget{};
  cfg.switch_budget.target_fitness = INFINITY;
  const auto r = run_hybrid(cfg, y_objective(), y.box, 9);
  CHECK(r.global_part.evals == cfg.global_params.pso.particles);
  CHECK(r.global_part.terminated_by == TerminatedBy::target);
  REQUIRE_FALSE(r.local_part.trace.empty());
  CHECK(r.local_part.trace.front().f == r.global_part.best_f);
}

TEST_CASE("hybrid contracts and labels") {
  const auto y = benchmark_y();
  HybridConfig cfg;
  cfg.switch_budget = Budget::evals(0);
  CHECK_THROWS_AS(run_hybrid(cfg, y_objective(), y.box, 1), ContractError);
  HybridConfig named;
  CHECK(named.label() == "HPSO");
  named.global_alg = GlobalAlgorithm::qga;
  named.local_alg = LocalAlgorithm::nelder_mead;
  CHECK(named.label() == "HQGA-NelderMead");
}

TEST_CASE("hand-off never worsens the result and stays in the box") {
  const auto y = benchmark_y();
  for (auto g : {GlobalAlgorithm::ga, GlobalAlgorithm::qga, GlobalAlgorithm::pso, GlobalAlgorithm::fwa}) {
    for (auto l : {LocalAlgorithm::bfgs, LocalAlgorithm::nelder_mead}) {
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        HybridConfig cfg;
        cfg.global_alg = g;
        cfg.local_alg = l;
        cfg.switch_budget = Budget::evals(500);
        const auto r = run_hybrid(cfg, y_objective(), y.box, seed);
        CHECK(r.f_final <= r.global_part.best_f + 1e-12);
        CHECK(y.box.contains(r.x_final));
        CHECK(eval_Y(r.x_final[0], r.x_final[1]) == r.f_final);
        CHECK(r.total_evals == r.global_part.evals + r.local_part.evals);
      }
    }
  }
}

TEST_CASE("hybrid runs are reproducible") {
  const auto y = benchmark_y();
  HybridConfig cfg;
  cfg.global_alg = GlobalAlgorithm::fwa;
  cfg.switch_budget = Budget::evals(1500);
  const auto a = run_hybrid(cfg, y_objective(), y.box, 123);
  const auto b = run_hybrid(cfg, y_objective(), y.box, 123);
  CHECK(a.x_final == b.x_final);
  CHECK(a.f_final == b.f_final);
  CHECK(a.total_evals == b.total_evals);
  CHECK(a.local_part.iterations == b.local_part.iterations);
}

TEST_CASE("trust-region local stage on Z uses the residual form") {
  const auto z = benchmark_z();
  HybridConfig cfg;
  cfg.local_alg = LocalAlgorithm::trust_region;
  cfg.switch_budget = Budget::evals(300);
  const auto r = run_hybrid(cfg, HybridObjective{z.f, z.residuals, {}}, z.box, 4);
  CHECK(r.f_final == eval_Z(r.x_final[0], r.x_final[1]));
  CHECK(r.f_final <= r.global_part.best_f);
}

TEST_CASE("stage failures are tagged") {
  const auto y = benchmark_y();
  std::atomic<int> calls{0};
  ObjectiveFn late = [&](std::span<const double> x) {
    if (++calls > 600) throw NumericalError("boom");
    return eval_Y(x[0], x[1]);
  };
  HybridConfig cfg;
  cfg.switch_budget = Budget::evals(600);
  CHECK_THROWS_WITH_AS(run_hybrid(cfg, HybridObjective{late, {}, {}}, y.box, 1), doctest::Contains("local stage"),
                       NumericalError);
  calls = 0;
  ObjectiveFn early = [&](std::span<const double> x) {
    if (++calls > 10) throw NumericalError("boom");
    return eval_Y(x[0], x[1]);
  };
  CHECK_THROWS_WITH_AS(run_hybrid(cfg, HybridObjective{early, {}, {}}, y.box, 1),
                       doctest::Contains("global stage"), NumericalError);
}

TEST_CASE("HPSO on Y: at least 95 of 100 seeds within 1e-6 of -17.65") {
  const auto y = benchmark_y();
  HybridConfig cfg;
  cfg.switch_budget = Budget::evals(5000);
  cfg.local_max_evals = 1000;
  int hits = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto r = run_hybrid(cfg, y_objective(), y.box, derive_seed(42, i));
    if (r.f_final <= -17.65 + 1e-6) ++hits;
    CHECK(r.total_evals <= 6001);
  }
  MESSAGE("HPSO hits: " << hits);
  CHECK(hits >= 95);
}

TEST_CASE("hybrid median is no worse than the standalone median on Y") {
  const auto y = benchmark_y();
  for (auto g : {GlobalAlgorithm::ga, GlobalAlgorithm::qga, GlobalAlgorithm::pso, GlobalAlgorithm::fwa}) {
    std::vector<double> alone, hybrid;
    for (std::uint64_t i = 0; i < 100; ++i) {
      const std::uint64_t seed = derive_seed(42, i);
      alone.push_back(run_global(g, y.f, y.box, Budget::evals(6000), seed).best_f);
      HybridConfig cfg;
      cfg.global_alg = g;
      cfg.switch_budget = Budget::evals(5000);
      cfg.local_max_evals = 1000;
      hybrid.push_back(run_hybrid(cfg, y_objective(), y.box, seed).f_final);
    }
    CAPTURE(to_string(g));
    CHECK(median(hybrid) <= median(alone));
  }
}

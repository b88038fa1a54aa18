#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "fdtrfit/error.hpp"
#include "fdtrfit/objective.hpp"
#include "fdtrfit/random.hpp"

using namespace fdtrfit;

namespace {

const FitProblem& noiseless() {
  static const FitProblem p = make_gan_si_problem(0.0, 1);
  return p;
}

SearchVector truth_scaled(const FitProblem& p) { return p.space().to_scaled(GanSiTruth{}.as_vector()); }

}  // namespace

TEST_CASE("noiseless data: zero residuals and fitness at the truth") {
  const auto& p = noiseless();
  const auto r = p.residuals(truth_scaled(p));
  CHECK(r.size() == 50);
  CHECK(p.residual_count() == 50);
  for (double x : r) CHECK(std::abs(x) < 1e-9);
  CHECK(p.fitness(truth_scaled(p)) < 1e-16);
}

TEST_CASE("ten percent in k_Si shows on the 7.4 um data") {
  const auto& p = noiseless();
  auto phys = GanSiTruth{}.as_vector();
  phys[4] *= 1.1;
  const auto r = p.residuals(p.space().to_scaled(phys));
  double worst = 0.0;
  for (std::size_t i = 0; i < 25; ++i) worst = std::max(worst, std::abs(r[i]));
  CHECK(p.datasets()[0].spot.r_pump == kGanSiSpotLarge);
  CHECK(worst > 0.1);
}

TEST_CASE("fitness is additive over datasets and ignores their order") {
  const auto& p = make_gan_si_problem(0.5, 9);
  const FitProblem one = p.with_datasets({p.datasets()[0]});
  const FitProblem twice = p.with_datasets({p.datasets()[0], p.datasets()[0]});
  const FitProblem swapped = p.with_datasets({p.datasets()[1], p.datasets()[0]});
  Rng rng(2);
  for (int i = 0; i < 5; ++i) {
    SearchVector v(5);
    for (std::size_t k = 0; k < 5; ++k) v[k] = uniform(rng, p.space().box().lower()[k], p.space().box().upper()[k]);
    CHECK(twice.fitness(v) == 2.0 * one.fitness(v));
    CHECK(swapped.fitness(v) == doctest::Approx(p.fitness(v)).epsilon(1e-14));
    CHECK(p.fitness(v) >= 0.0);
  }
}

TEST_CASE("noise statistics of the fitness at the truth") {
  // F(truth) is sigma^2 times a chi-square with N = 50 degrees of freedom.
  const FitProblem tmpl = make_gan_si_problem(0.0, 1);
  const auto t = GanSiTruth{}.as_vector();
  const auto v = tmpl.space().to_scaled(t);
  const double spread = 0.25 * std::sqrt(2.0 * 50.0);
  double sum = 0.0;
  int inside = 0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    const FitProblem p = tmpl.with_datasets(synthesize(tmpl, t, 0.5, 1000 + s));
    const double f = p.fitness(v);
    if (std::abs(f - 12.5) < 3.0 * spread) ++inside;
    sum += f;
  }
  CHECK(inside >= 0.98 * seeds);
  CHECK(std::abs(sum / seeds - 12.5) < 3.0 * spread / std::sqrt(seeds));
}

TEST_CASE("synthesize: exact at sigma 0, reproducible, right noise level") {
  const auto& p = noiseless();
  const auto t = GanSiTruth{}.as_vector();
  const auto clean = synthesize(p, t, 0.0, 1);
  const auto model = p.simulate_stack(resolve(p.stack(), p.binding(), p.space(), t));
  CHECK(clean[0].phase_deg == model[0]);
  CHECK(clean[1].phase_deg == model[1]);
  const auto via_scaled = p.simulate(truth_scaled(p));
  for (std::size_t i = 0; i < model[0].size(); ++i) CHECK(std::abs(via_scaled[0][i] - model[0][i]) < 1e-9);
  CHECK(synthesize(p, t, 0.3, 7)[1].phase_deg == synthesize(p, t, 0.3, 7)[1].phase_deg);
  CHECK(synthesize(p, t, 0.3, 7)[1].phase_deg != synthesize(p, t, 0.3, 8)[1].phase_deg);

  const auto grid = FrequencyGrid::log_spaced(1e4, 1e7, 5000);
  const std::vector<double> zeros(grid.size(), 0.0);
  const FitProblem big = p.with_datasets({MeasurementSet{SpotConfig::same(kGanSiSpotLarge), grid, zeros},
                                          MeasurementSet{SpotConfig::same(kGanSiSpotSmall), grid, zeros}});
  const auto a = synthesize(big, t, 0.0, 3);
  const auto b = synthesize(big, t, 0.5, 3);
  double s1 = 0.0, s2 = 0.0;
  std::size_t n = 0;
  for (std::size_t d = 0; d < 2; ++d) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double e = b[d].phase_deg[i] - a[d].phase_deg[i];
      s1 += e;
      s2 += e * e;
      ++n;
    }
  }
  const double mean = s1 / n;
  const double sd = std::sqrt((s2 - n * mean * mean) / (n - 1));
  CHECK(n == 10000);
  CHECK(sd > 0.49);
  CHECK(sd < 0.51);
  CHECK_THROWS_AS(synthesize(p, std::vector<double>{1e9, 1, 1e6, 1, 1}, 0.0, 1), ContractError);
}

TEST_CASE("central-difference gradient is consistent across steps") {
  const FitProblem p = make_gan_si_problem(0.5, 4);
  Rng rng(21);
  for (int trial = 0; trial < 3; ++trial) {
    SearchVector v(5);
    for (std::size_t k = 0; k < 5; ++k) v[k] = uniform(rng, p.space().box().lower()[k], p.space().box().upper()[k]);
    for (std::size_t k = 0; k < 5; ++k) {
      auto at = [&](double h) {
        SearchVector a = v, b = v;
        a[k] += h;
        b[k] -= h;
        return (p.fitness(a) - p.fitness(b)) / (2 * h);
      };
      const double fine = at(1e-6);
      const double coarse = at(1e-4);
      CHECK(std::abs(fine - coarse) <= 1e-4 * std::max(1.0, std::abs(coarse)));
    }
  }
}

TEST_CASE("target fitness default") {
  const auto& p = noiseless();
  CHECK(default_target_fitness(p, GanSiTruth{}.as_vector()) == 1e-6);
  const FitProblem noisy = make_gan_si_problem(0.5, 2);
  const double f = noisy.fitness(truth_scaled(noisy));
  CHECK(default_target_fitness(noisy, GanSiTruth{}.as_vector()) == 1.1 * f);
}

TEST_CASE("measurement CSV round trip and errors") {
  const auto dir = std::filesystem::temp_directory_path() / "fdtrfit_objective_csv";
  std::filesystem::create_directories(dir);
  const auto& set = noiseless().datasets()[0];
  write_measurement_csv(dir / "a.csv", set);
  const auto back = read_measurement_csv(dir / "a.csv", set.spot);
  CHECK(back.grid.freqs() == set.grid.freqs());
  CHECK(back.phase_deg == set.phase_deg);
  std::ofstream(dir / "bad.csv") << "f,p\n1,2\n";
  CHECK_THROWS_AS(read_measurement_csv(dir / "bad.csv", set.spot), ConfigError);
  std::ofstream(dir / "nan.csv") << "frequency_hz,phase_deg\n1e4,abc\n";
  CHECK_THROWS_AS(read_measurement_csv(dir / "nan.csv", set.spot), ConfigError);
  CHECK_THROWS_AS(read_measurement_csv(dir / "missing.csv", set.spot), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("fit problem contracts") {
  const auto& p = noiseless();
  CHECK_THROWS_AS(p.with_datasets({}), ConfigError);
  CHECK_THROWS_AS(p.fitness(std::vector<double>{1.0, 2.0}), ContractError);
  // log10 coordinates far outside the box are not representable.
  CHECK_THROWS_AS(p.fitness(std::vector<double>{400.0, 2.0, 6.0, 1.0, 2.0}), NumericalError);
}

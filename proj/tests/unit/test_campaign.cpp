#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fdtrfit/campaign.hpp"
#include "fdtrfit/error.hpp"
#include "fdtrfit/report.hpp"
#include "oracles.hpp"

using namespace fdtrfit;
namespace fs = std::filesystem;

namespace {

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CampaignConfig y_config(std::size_t trials = 3) {
  auto c = parse_config(R"({"problem": {"benchmark": "Y"},
    "algorithms": [{"global": "PSO", "budget": {"max_evals": 600}},
                   {"id": "HGA", "global": "GA", "local": "BFGS", "budget": {"max_evals": 500}}]})");
  c.trials = trials;
  c.master_seed = 11;
  return c;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("fdtrfit_test_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("config errors are reported as ConfigError") {
  const char* bad[] = {
      "{",
      R"({"algorithms": ["PSO"]})",
      R"({"problem": {"benchmark": "Q"}})",
      R"({"problem": {"benchmark": "Y"}, "colour": 1})",
      R"({"problem": {"benchmark": "Y"}, "algorithms": ["SA"]})",
      R"({"problem": {"benchmark": "Y"}, "algorithms": ["HPSO-TrustRegion"]})",
      R"({"problem": {"benchmark": "Y"}, "algorithms": ["PSO", "PSO"]})",
      R"({"problem": {"benchmark": "Y"}, "trials": 0})",
      R"({"problem": {"benchmark": "Y"}, "algorithms": [{"global": "PSO", "budget": {"max_evals": 0}}]})",
      R"({"problem": {"preset": "gan_si", "data": {"truth": {"G1": 150}}}})",
      R"({"problem": {"preset": "gan_si", "data": {"noise_sigma_deg": -1}}})",
      R"({"problem": {"stack": {"elements": [{"layer": "a", "k": 1, "C": 1}]}, "parameters": []}})",
      R"({"problem": {"stack": {"bottom": "floating", "elements": []}, "parameters": []}})",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_config(text), ConfigError);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("algorithm ids") {
  CHECK(parse_algorithm_id("HPSO").is_hybrid());
  CHECK(parse_algorithm_id("HQGA-NelderMead").local == LocalAlgorithm::nelder_mead);
  CHECK_FALSE(parse_algorithm_id("FWA").local.has_value());
  CHECK_FALSE(parse_algorithm_id("BFGS").global.has_value());
  for (const char* id : {"HPSO", "HGA-NelderMead", "QGA", "TrustRegion"}) {
    CHECK(default_id(parse_algorithm_id(id)) == id);
  }
  CHECK_THROWS_AS(parse_algorithm_id("HPSO-Newton"), ConfigError);
}

TEST_CASE("built-in GaN/Si campaign config") {
  const auto c = default_gan_si_config();
  CHECK(c.trials == 100);
  REQUIRE(c.algorithms.size() == 1);
  CHECK(c.algorithms[0].id == "HPSO");
  CHECK(c.algorithms[0].budget.max_evals == 30000u);
  REQUIRE(c.problem.truth.has_value());
  CHECK(*c.problem.truth == GanSiTruth{}.as_vector());
  CHECK(c.problem.spots.size() == 2);
  CHECK(c.problem.noise_sigma_deg == 0.5);
}

TEST_CASE("campaign cardinality and CSV shape") {
  auto c = y_config(3);
  const auto r = run_campaign(c);
  CHECK(r.trials.size() == 6);
  const auto rows = read_csv(trials_csv(r));
  REQUIRE(rows.size() == 7);
  CHECK(rows[0][0] == "algorithm");
  CHECK(rows[0].size() == 12);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].size() == 12);
  CHECK(rows[1][0] == "PSO");
  CHECK(rows[6][0] == "HGA");
  CHECK(rows[4][1] == "0");

  c.trials = 100;
  c.algorithms.resize(1);
  c.algorithms[0].budget = Budget::evals(100);
  CHECK(run_campaign(c).trials.size() == 100);
}

TEST_CASE("trials share per-index seeds across algorithms and do not depend on workers") {
  auto c = y_config(4);
  const auto one = run_campaign(c);
  c.workers = 3;
  const auto three = run_campaign(c);
  CHECK(trials_csv(one) == trials_csv(three));
  CHECK(summary_json(one) == summary_json(three));
  for (const auto& t : one.trials) CHECK(t.seed == derive_seed(11, t.trial));
}

TEST_CASE("exported reports are byte-identical across reruns") {
  const auto c = y_config(5);
  const auto a = scratch_dir("rerun_a"), b = scratch_dir("rerun_b");
  export_report(run_campaign(c), a);
  export_report(run_campaign(c), b);
  for (const char* f : {"trials.csv", "summary.json", "hist_x1.csv", "hist_f_final.csv"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK_THROWS_AS(export_report(run_campaign(c), "/proc/fdtrfit_cannot_write"), Error);
}

TEST_CASE("summary.json is recomputable from trials.csv") {
  auto c = y_config(9);
  const auto r = run_campaign(c);
  const auto summary = nlohmann::json::parse(summary_json(r));
  const auto rows = read_csv(trials_csv(r));
  CHECK(summary["deterministic"] == true);
  CHECK(summary["master_seed"] == 11);
  for (const auto& alg : summary["algorithms"]) {
    const std::string name = alg["algorithm"];
    std::vector<double> f;
    double evals = 0.0;
    int successes = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i][0] != name) continue;
      f.push_back(std::strtod(rows[i][4].c_str(), nullptr));
      evals += std::strtod(rows[i][5].c_str(), nullptr);
      successes += rows[i][9] == "1";
    }
    REQUIRE(f.size() == 9);
    CHECK(alg["trials"] == 9);
    CHECK(alg["successes"] == successes);
    CHECK(alg["success_rate"].get<double>() == successes / 9.0);
    CHECK(alg["mean_evals"].get<double>() == doctest::Approx(evals / 9.0).epsilon(1e-15));
    for (double p : {0.0, 0.025, 0.25, 0.5, 0.75, 0.975, 1.0}) {
      std::ostringstream key;
      key << p;
      CAPTURE(key.str());
      REQUIRE(alg["f_final_quantiles"].contains(key.str()));
      CHECK(alg["f_final_quantiles"][key.str()].get<double>() ==
            doctest::Approx(oracle::quantile(f, p)).epsilon(1e-14));
    }
  }
  // The JSON numbers themselves round-trip exactly.
  for (std::size_t a = 0; a < r.summaries.size(); ++a) {
    for (const auto& [p, v] : r.summaries[a].f_quantiles) {
      std::ostringstream key;
      key << p;
      CHECK(summary["algorithms"][a]["f_final_quantiles"][key.str()].get<double>() == v);
    }
  }
}

TEST_CASE("wall-time budgets mark the report non-deterministic") {
  auto c = y_config(1);
  c.algorithms[0].budget = Budget{std::nullopt, 0.05, std::nullopt};
  CHECK_FALSE(run_campaign(c).deterministic);
}

TEST_CASE("success rate") {
  TrialReport r;
  SuccessRule rule;
  rule.target_fitness = 1e-6;
  CHECK(success_rate(r, rule, std::nullopt) == 0.0);
  for (std::size_t i = 0; i < 4; ++i) {
    TrialRecord t;
    t.algorithm = "A";
    t.trial = i;
    t.f_final = 0.0;
    t.params = {1.0, 2.0};
    r.trials.push_back(t);
  }
  CHECK(success_rate(r, rule, std::nullopt) == 1.0);
  r.trials[1].f_final = 1e-3;
  CHECK(success_rate(r, rule, std::nullopt) == 0.75);
  rule.relative_band = 0.01;
  const std::vector<double> truth{1.0, 2.0};
  r.trials[2].params[1] = 2.03;
  CHECK(success_rate(r, rule, truth) == 0.5);
  CHECK(success_rate(r, rule, truth, "B") == 0.0);
  r.trials[3].f_final = std::numeric_limits<double>::quiet_NaN();
  CHECK(success_rate(r, rule, truth) == 0.25);
}

TEST_CASE("quantiles match the sorting oracle") {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(1 + rng() % 30);
    for (double& x : v) x = standard_normal(rng);
    for (double p : {0.0, 0.1, 0.5, 0.975, 1.0}) {
      CHECK(quantile(v, p) == doctest::Approx(oracle::quantile(v, p)).epsilon(1e-14));
    }
  }
  CHECK(quantile({3.0, 1.0, 2.0, 4.0}, 0.5) == 2.5);
}

TEST_CASE("histogram binning contract") {
  const auto h = histogram({0.0, 1.0, 2.0, 3.0, 4.0}, 4);
  REQUIRE(h.edges.size() == 5);
  CHECK(h.edges.front() == 0.0);
  CHECK(h.edges.back() == 4.0);
  CHECK(h.counts == std::vector<std::size_t>{1, 1, 1, 2});

  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> v(1 + rng() % 200);
    for (double& x : v) x = std::exp(standard_normal(rng));
    const std::size_t bins = 1 + rng() % 15;
    const auto g = histogram(v, bins);
    REQUIRE(g.counts.size() == bins);
    CHECK(g.edges.front() == *std::min_element(v.begin(), v.end()));
    CHECK(g.edges.back() == *std::max_element(v.begin(), v.end()));
    std::size_t total = 0;
    for (auto c : g.counts) total += c;
    CHECK(total == v.size());
  }
  const auto same = histogram({2.0, 2.0, 2.0}, 3);
  std::size_t total = 0;
  for (auto c : same.counts) total += c;
  CHECK(total == 3);
  const auto with_nan = histogram({1.0, std::numeric_limits<double>::quiet_NaN(), 2.0}, 2);
  CHECK(with_nan.counts == std::vector<std::size_t>{1, 1});
}

TEST_CASE("plateau counting") {
  std::vector<double> v;
  for (int i = 0; i < 6; ++i) v.push_back(1e-8 * (1 + 0.1 * i));
  CHECK(count_plateaus(v) == 1);
  for (int i = 0; i < 6; ++i) v.push_back(1.0 + 0.2 * i);
  CHECK(count_plateaus(v) == 2);
  for (int i = 0; i < 3; ++i) v.push_back(1e4 * (1 + i));
  CHECK(count_plateaus(v) == 2);
  CHECK(count_plateaus({}) == 0);
  CHECK(count_plateaus({0.0, 0.0, 0.0, 0.0, 0.0, -1.0}) == 0);
}

TEST_CASE("failing trials are recorded and the campaign continues") {
  auto c = y_config(3);
  auto problem = CampaignProblem::from_spec(c.problem);
  problem.objective.f = [](std::span<const double>) -> double { throw NumericalError("model blew up"); };
  const auto r = run_campaign(c, problem);
  CHECK(r.trials.size() == 6);
  for (const auto& t : r.trials) {
    CHECK(t.status == "failed");
    CHECK(t.error.find("model blew up") != std::string::npos);
    CHECK_FALSE(t.success);
  }
  CHECK(r.summaries[0].failures == 3);
  CHECK(summary_json(r).find("model blew up") != std::string::npos);
}

TEST_CASE("HPSO has the highest success rate on GaN/Si at a tight equal budget") {
  // Short switch so the global stage decides the basin; 200 local evals each.
  auto c = parse_config(R"({"problem": {"preset": "gan_si", "data": {"noise_sigma_deg": 0}},
    "algorithms": [
      {"global": "PSO", "local": "BFGS", "budget": {"max_evals": 500}, "local_max_evals": 200},
      {"global": "GA", "local": "BFGS", "budget": {"max_evals": 500}, "local_max_evals": 200},
      {"global": "QGA", "local": "BFGS", "budget": {"max_evals": 500}, "local_max_evals": 200},
      {"global": "FWA", "local": "BFGS", "budget": {"max_evals": 500}, "local_max_evals": 200}],
    "trials": 40, "seed": 2024})");
  const auto r = run_campaign(c);
  const auto rule = effective_success_rule(c, CampaignProblem::from_spec(c.problem));
  double hpso = 0.0, best_other = 0.0;
  for (const auto& s : r.summaries) {
    MESSAGE(s.algorithm << " success " << s.success_rate);
    CHECK(s.success_rate == success_rate(r, rule, c.problem.truth, s.algorithm));
    if (s.algorithm == "HPSO") {
      hpso = s.success_rate;
    } else {
      best_other = std::max(best_other, s.success_rate);
    }
  }
  CHECK(hpso > best_other);
}

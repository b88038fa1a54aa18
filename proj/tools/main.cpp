#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdtrfit/campaign.hpp"
#include "fdtrfit/config.hpp"
#include "fdtrfit/error.hpp"
#include "fdtrfit/identifiability.hpp"
#include "fdtrfit/report.hpp"
#include "fdtrfit/test_functions.hpp"

namespace fs = std::filesystem;
using namespace fdtrfit;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out;
  std::optional<std::string> algo;
  std::optional<std::size_t> budget_evals;
  std::optional<double> budget_seconds;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> grid;
  bool traces = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "master seed (fit: the run seed; synth: the noise seed)");
  cmd->add_option("--trials", o.trials, "trials per algorithm")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--algo", o.algo, "comma-separated algorithm ids, e.g. HPSO,PSO,BFGS");
  cmd->add_option("--budget-evals", o.budget_evals, "evaluation budget of the global stage")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--budget-seconds", o.budget_seconds, "wall-time budget of the global stage")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
}

std::vector<std::string> split_ids(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw ConfigError("--algo: no algorithm ids given");
  return out;
}

void apply_budget(AlgorithmSpec& a, const Options& o) {
  if (!o.budget_evals && !o.budget_seconds) return;
  a.budget.max_evals = o.budget_evals;
  a.budget.max_seconds = o.budget_seconds;
}

CampaignConfig load(const Options& o, CampaignConfig fallback) {
  CampaignConfig cfg = o.config.empty() ? std::move(fallback) : load_config(o.config);
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.trials) cfg.trials = *o.trials;
  if (o.out) cfg.out_dir = *o.out;
  if (o.workers) cfg.workers = *o.workers;
  if (o.traces) cfg.write_traces = true;
  if (o.algo) {
    cfg.algorithms.clear();
    for (const auto& id : split_ids(*o.algo)) cfg.algorithms.push_back(parse_algorithm_id(id));
  }
  for (auto& a : cfg.algorithms) apply_budget(a, o);
  cfg.validate();
  return cfg;
}

std::string g(double v, int prec = 10) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

void print_summary(const TrialReport& r) {
  std::printf("%-16s %7s %9s %14s %14s %10s\n", "algorithm", "trials", "success", "f_median", "f_best",
              "evals");
  for (const auto& s : r.summaries) {
    const double med = s.f_quantiles.empty() ? NAN : s.f_quantiles[3].second;
    const double best = s.f_quantiles.empty() ? NAN : s.f_quantiles[0].second;
    std::printf("%-16s %7zu %8.1f%% %14.8g %14.8g %10.0f\n", s.algorithm.c_str(), s.trials,
                100.0 * s.success_rate, med, best, s.mean_evals);
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

int cmd_campaign(const Options& o) {
  const CampaignConfig cfg = load(o, default_gan_si_config());
  const auto t0 = std::chrono::steady_clock::now();
  const TrialReport r = run_campaign(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  export_report(r, cfg.out_dir);
  print_summary(r);
  std::printf("%zu trials in %.1f s, report in %s\n", r.trials.size(), secs, cfg.out_dir.string().c_str());
  return 0;
}

int cmd_fit(const Options& o) {
  CampaignConfig cfg = load(o, default_gan_si_config());
  const CampaignProblem problem = CampaignProblem::from_spec(cfg.problem);
  const std::uint64_t seed = o.seed.value_or(1);
  const SuccessRule rule = effective_success_rule(cfg, problem);
  int rc = 0;
  TrialReport report;
  report.param_names = problem.names;
  report.master_seed = seed;
  for (const auto& a : cfg.algorithms) {
    TrialRecord t = run_trial(a, problem, cfg.params, seed, cfg.write_traces);
    t.success = is_success(t, rule, problem.truth);
    std::printf("%s  status=%s  f=%s  evals=%zu\n", t.algorithm.c_str(), t.status.c_str(),
                g(t.f_final, 12).c_str(), t.evals);
    if (!t.error.empty()) {
      std::fprintf(stderr, "%s: %s\n", t.algorithm.c_str(), t.error.c_str());
      rc = 2;
    }
    for (std::size_t k = 0; k < problem.names.size(); ++k) {
      std::printf("  %-10s %s", problem.names[k].c_str(), g(t.params[k]).c_str());
      if (problem.truth) std::printf("   (truth %s)", g((*problem.truth)[k]).c_str());
      std::printf("\n");
    }
    report.trials.push_back(std::move(t));
  }
  if (o.out) {
    write_text(fs::path(*o.out) / "trials.csv", trials_csv(report));
    std::printf("written %s\n", (fs::path(*o.out) / "trials.csv").string().c_str());
  }
  return rc;
}

CampaignConfig y_suite() {
  CampaignConfig cfg = parse_config(R"({"problem": {"benchmark": "Y"}, "algorithms": ["PSO"]})");
  cfg.algorithms.clear();
  for (const char* id : {"PSO", "GA", "QGA", "FWA"}) {
    AlgorithmSpec a = parse_algorithm_id(id);
    a.budget = Budget::evals(6000);
    cfg.algorithms.push_back(a);
  }
  for (const char* id : {"HPSO", "HGA", "HQGA", "HFWA"}) {
    AlgorithmSpec a = parse_algorithm_id(id);
    a.budget = Budget::evals(5000);
    a.local_max_evals = 1000;
    cfg.algorithms.push_back(a);
  }
  cfg.out_dir = "bench";
  return cfg;
}

// First evaluation count at which the trace reaches `target`; the global
// trace is counted in evaluations, the local stage only by the trial total.
std::optional<std::size_t> evals_to_target(const TrialRecord& t, double target) {
  for (const auto& row : t.trace) {
    if (row[0] == "global" && std::stod(row[2]) <= target) return std::stoull(row[1]);
  }
  if (std::isfinite(t.f_final) && t.f_final <= target) return t.evals;
  return std::nullopt;
}

void bench_campaign(CampaignConfig cfg, const fs::path& dir) {
  cfg.write_traces = true;
  const BenchmarkProblem b = *benchmark_by_name(cfg.problem.benchmark);
  const auto t0 = std::chrono::steady_clock::now();
  const GridMinimum m = grid_enumerate(b, cfg.grid_points, cfg.workers);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s oracle on %zu x %zu grid: min %.10g at (%.6f, %.6f) [%.1f s]\n", b.name.c_str(),
              cfg.grid_points, cfg.grid_points, m.value, m.location[0], m.location[1], secs);

  const CampaignProblem problem = CampaignProblem::from_spec(cfg.problem);
  const SuccessRule rule = effective_success_rule(cfg, problem);
  TrialReport r = run_campaign(cfg, problem);

  const double target = rule.target_fitness.value_or(m.value + 1e-6);
  std::string csv = "algorithm,trial,seed,f_final,evals,evals_to_target,ratio_to_global_min\n";
  for (auto& t : r.trials) {
    const auto hit = evals_to_target(t, target);
    csv += t.algorithm + ',' + std::to_string(t.trial) + ',' + std::to_string(t.seed) + ',' + g(t.f_final, 17) +
           ',' + std::to_string(t.evals) + ',' + (hit ? std::to_string(*hit) : "") + ',' +
           g(t.f_final / m.value, 17) + '\n';
    t.trace.clear();
  }
  export_report(r, dir);

  std::string oracle = "problem,grid_points,x1,x2,value\n";
  oracle += b.name + ',' + std::to_string(cfg.grid_points) + ',' + g(m.location[0], 17) + ',' +
            g(m.location[1], 17) + ',' + g(m.value, 17) + '\n';
  write_text(dir / "oracle.csv", oracle);
  write_text(dir / "comparison.csv", csv);
  print_summary(r);
}

void bench_z_basins(const fs::path& dir) {
  const BenchmarkProblem z = benchmark_z();
  HybridObjective obj{z.f, z.residuals, {}};
  std::string csv = "algorithm,x0_1,x0_2,f_final,x1,x2,iterations,evals,status\n";
  for (const SearchVector& x0 : {SearchVector{1.0, 1.0}, SearchVector{-2.5, -2.5}}) {
    for (auto alg : {LocalAlgorithm::bfgs, LocalAlgorithm::nelder_mead, LocalAlgorithm::trust_region}) {
      const LocalResult r = run_local(alg, obj, x0, 1e-6, 1000);
      // Trust region reports the residual sum Z + 1.
      const double f = alg == LocalAlgorithm::trust_region ? z.f(r.x) : r.f;
      std::printf("Z from (%g, %g)  %-12s f=%.10f at (%.6f, %.6f)\n", x0[0], x0[1], to_string(alg).c_str(), f,
                  r.x[0], r.x[1]);
      csv += to_string(alg) + ',' + g(x0[0]) + ',' + g(x0[1]) + ',' + g(f, 17) + ',' + g(r.x[0], 17) + ',' +
             g(r.x[1], 17) + ',' + std::to_string(r.iterations) + ',' + std::to_string(r.evals) + ',' +
             to_string(r.status) + '\n';
    }
  }
  write_text(dir / "z_basins.csv", csv);
}

int cmd_bench(const Options& o) {
  const fs::path root = o.out.value_or("bench");
  if (!o.config.empty()) {
    CampaignConfig cfg = load(o, {});
    if (!cfg.problem.is_benchmark()) throw ConfigError("bench needs a benchmark problem (\"Y\" or \"Z\")");
    if (o.grid) cfg.grid_points = *o.grid;
    bench_campaign(cfg, root);
    return 0;
  }
  CampaignConfig y = load(o, y_suite());
  if (o.grid) y.grid_points = *o.grid;
  bench_campaign(y, root / "Y");

  const BenchmarkProblem z = benchmark_z();
  const GridMinimum m = grid_enumerate(z, o.grid.value_or(2000), o.workers.value_or(1));
  std::printf("Z oracle: min %.10g at (%.6f, %.6f)\n", m.value, m.location[0], m.location[1]);
  write_text(root / "Z" / "oracle.csv", "problem,grid_points,x1,x2,value\nZ," +
                                            std::to_string(o.grid.value_or(2000)) + ',' + g(m.location[0], 17) +
                                            ',' + g(m.location[1], 17) + ',' + g(m.value, 17) + '\n');
  bench_z_basins(root / "Z");
  return 0;
}

int cmd_sense(const Options& o) {
  const CampaignConfig cfg = load(o, default_gan_si_config());
  if (cfg.problem.is_benchmark()) throw ConfigError("sense needs an FDTR problem");
  const FitProblem p = cfg.problem.build_fdtr();
  std::optional<SampleStack> at;
  if (cfg.problem.truth) {
    at = resolve(p.stack(), p.binding(), p.space(), *cfg.problem.truth);
  }
  const SampleStack* nominal = at ? &*at : nullptr;

  std::vector<std::string> names;
  for (const auto& [name, target] : p.binding().entries()) names.push_back(name);

  const fs::path dir = o.out.value_or("sense");
  std::string csv = "parameter,dataset,frequency_hz,S_deg\n";
  std::printf("%-10s %14s\n", "parameter", "max|S| (deg)");
  for (const auto& name : names) {
    const SensitivityCurve c = sensitivity(p, name, cfg.sensitivity_step, nominal);
    double peak = 0.0;
    for (std::size_t i = 0; i < c.S.size(); ++i) {
      peak = std::max(peak, std::abs(c.S[i]));
      csv += name + ',' + std::to_string(c.dataset[i]) + ',' + g(c.freqs[i], 17) + ',' + g(c.S[i], 17) + '\n';
    }
    std::printf("%-10s %14.6g\n", name.c_str(), peak);
  }
  write_text(dir / "sensitivity.csv", csv);

  const std::vector<std::string> fit = p.space().fit_names();
  const IdentifiabilityReport rep = identifiability_svd(p, fit, cfg.sensitivity_step, nominal);
  std::string svd = "index,sigma";
  for (const auto& n : fit) svd += ",v_" + n;
  svd += '\n';
  std::printf("\nsingular values over %s\n", [&] {
    std::string s;
    for (const auto& n : fit) s += (s.empty() ? "" : ", ") + n;
    return s;
  }().c_str());
  for (Eigen::Index j = 0; j < rep.singular_values.size(); ++j) {
    std::printf("  sigma_%ld = %.6g   direction [", static_cast<long>(j + 1), rep.singular_values[j]);
    svd += std::to_string(j + 1) + ',' + g(rep.singular_values[j], 17);
    for (Eigen::Index i = 0; i < rep.directions.rows(); ++i) {
      std::printf("%s%+.3f", i ? " " : "", rep.directions(i, j));
      svd += ',' + g(rep.directions(i, j), 17);
    }
    std::printf("]\n");
    svd += '\n';
  }
  std::printf("  condition number %.6g\n", rep.condition_number);
  write_text(dir / "svd.csv", svd);
  std::printf("written %s and %s\n", (dir / "sensitivity.csv").string().c_str(), (dir / "svd.csv").string().c_str());
  return 0;
}

int cmd_synth(const Options& o) {
  CampaignConfig cfg = load(o, default_gan_si_config());
  if (cfg.problem.is_benchmark()) throw ConfigError("synth needs an FDTR problem");
  if (!cfg.problem.truth) throw ConfigError("synth needs truth values in problem.data.truth");
  const std::uint64_t seed = o.seed.value_or(cfg.problem.data_seed);
  const FitProblem tmpl = FitProblem(cfg.problem.stack, cfg.problem.binding, cfg.problem.space,
                                     cfg.problem.templates(), cfg.problem.quadrature);
  const auto sets = synthesize(tmpl, *cfg.problem.truth, cfg.problem.noise_sigma_deg, seed);
  const fs::path dir = o.out.value_or("synth");
  fs::create_directories(dir);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "spot%zu_%.3gum.csv", i, sets[i].spot.r_pump * 1e6);
    write_measurement_csv(dir / name, sets[i]);
    std::printf("written %s (%zu points)\n", (dir / name).string().c_str(), sets[i].phase_deg.size());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid global/local fitting of FDTR phase data"};
  app.require_subcommand(1);
  Options o;

  auto* fit = app.add_subcommand("fit", "single run of each configured algorithm");
  auto* campaign = app.add_subcommand("campaign", "seeded multi-trial campaign with CSV/JSON report");
  auto* bench = app.add_subcommand("bench", "grid oracle and algorithm comparison on the Y and Z test functions");
  auto* sense = app.add_subcommand("sense", "phase sensitivities and SVD of the fit Jacobian");
  auto* synth = app.add_subcommand("synth", "write synthetic phase datasets");
  for (auto* c : {fit, campaign, bench, sense, synth}) add_common(c, o);
  for (auto* c : {fit, campaign}) c->add_flag("--traces", o.traces, "write per-trial convergence traces");
  bench->add_option("--grid", o.grid, "oracle grid points per axis")->check(CLI::Range(2, 100000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*fit) return cmd_fit(o);
    if (*campaign) return cmd_campaign(o);
    if (*bench) return cmd_bench(o);
    if (*sense) return cmd_sense(o);
    if (*synth) return cmd_synth(o);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}

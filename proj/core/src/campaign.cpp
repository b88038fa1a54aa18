#include "fdtrfit/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "fdtrfit/error.hpp"
#include "fdtrfit/test_functions.hpp"

namespace fdtrfit {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void append_global_trace(std::vector<std::vector<std::string>>& rows, const RunResult& r) {
  for (const auto& p : r.trace) rows.push_back({"global", std::to_string(p.evals), num(p.best)});
}

void append_local_trace(std::vector<std::vector<std::string>>& rows, const LocalResult& r) {
  for (const auto& p : r.trace) rows.push_back({"local", std::to_string(p.iteration), num(p.f)});
}

}  // namespace

CampaignProblem CampaignProblem::from_fit_problem(std::shared_ptr<const FitProblem> p,
                                                  std::optional<std::vector<double>> truth) {
  CampaignProblem c;
  c.fdtr = p;
  c.objective.f = [p](std::span<const double> v) { return p->fitness(v); };
  c.objective.local_f = [p](std::span<const double> v) {
    try {
      return p->fitness(v);
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  c.objective.residuals = [p](std::span<const double> v) { return p->residuals(v); };
  c.box = p->space().box();
  c.names = p->space().fit_names();
  c.to_physical = [p](std::span<const double> v) { return p->space().to_physical(v); };
  c.truth = std::move(truth);
  return c;
}

CampaignProblem CampaignProblem::from_spec(const ProblemSpec& spec) {
  if (spec.is_benchmark()) {
    const auto b = *benchmark_by_name(spec.benchmark);
    CampaignProblem c;
    c.objective.f = b.f;
    c.objective.residuals = b.residuals;
    c.box = b.box;
    c.names = {"x1", "x2"};
    c.to_physical = [](std::span<const double> v) { return std::vector<double>(v.begin(), v.end()); };
    return c;
  }
  auto p = std::make_shared<const FitProblem>(spec.build_fdtr());
  return from_fit_problem(std::move(p), spec.files.empty() ? spec.truth : std::nullopt);
}

SuccessRule effective_success_rule(const CampaignConfig& cfg, const CampaignProblem& problem) {
  SuccessRule r = cfg.success;
  if (!r.target_fitness) {
    if (problem.fdtr && problem.truth) {
      r.target_fitness = default_target_fitness(*problem.fdtr, *problem.truth);
    } else if (cfg.problem.is_benchmark()) {
      r.target_fitness = benchmark_by_name(cfg.problem.benchmark)->known_min->value + 1e-6;
    }
  }
  if (!r.relative_band && problem.truth) r.relative_band = 0.02;
  return r;
}

TrialRecord run_trial(const AlgorithmSpec& alg, const CampaignProblem& problem, const GlobalParams& params,
                      std::uint64_t seed, bool keep_trace) {
  TrialRecord t;
  t.algorithm = alg.id;
  t.seed = seed;
  try {
    SearchVector x;
    if (alg.is_hybrid()) {
      HybridConfig h;
      h.global_alg = *alg.global;
      h.local_alg = *alg.local;
      h.switch_budget = alg.budget;
      h.local_tol = alg.local_tol;
      h.local_max_iter = alg.local_max_iter;
      h.local_max_evals = alg.local_max_evals;
      h.global_params = params;
      h.global_params.workers = 1;
      const auto r = run_hybrid(h, problem.objective, problem.box, seed);
      x = r.x_final;
      t.f_final = r.f_final;
      t.evals = r.total_evals;
      t.status = to_string(r.local_part.status);
      t.switch_evals = r.global_part.evals;
      t.switch_f = r.global_part.best_f;
      t.clamped = r.clamped;
      if (keep_trace) {
        append_global_trace(t.trace, r.global_part);
        append_local_trace(t.trace, r.local_part);
      }
    } else if (alg.global) {
      GlobalParams gp = params;
      gp.workers = 1;
      const auto r = run_global(*alg.global, problem.objective.f, problem.box, alg.budget, seed, gp);
      x = r.best_x;
      t.f_final = r.best_f;
      t.evals = r.evals;
      t.status = to_string(r.terminated_by);
      if (keep_trace) append_global_trace(t.trace, r);
    } else {
      Rng rng(seed);
      SearchVector x0(problem.box.dim());
      for (std::size_t k = 0; k < x0.size(); ++k) x0[k] = uniform(rng, problem.box.lower()[k], problem.box.upper()[k]);
      const auto r = run_local(*alg.local, problem.objective, x0, alg.local_tol, alg.local_max_iter,
                               alg.local_max_evals);
      x = r.x;
      t.f_final = r.f;
      t.evals = r.evals;
      t.status = to_string(r.status);
      if (!problem.box.contains(x)) {
        const SearchVector inside = problem.box.constrain(x, BoundMode::clamp);
        for (std::size_t k = 0; k < x.size(); ++k) {
          if (std::abs(inside[k] - x[k]) > 1e-6) t.clamped = true;
        }
        x = inside;
        t.f_final = problem.objective.for_local()(x);
        ++t.evals;
      } else if (*alg.local == LocalAlgorithm::trust_region) {
        t.f_final = problem.objective.for_local()(x);
        ++t.evals;
      }
      if (keep_trace) append_local_trace(t.trace, r);
    }
    t.params = problem.to_physical(x);
  } catch (const std::exception& e) {
    t.status = "failed";
    t.error = e.what();
    t.f_final = std::numeric_limits<double>::quiet_NaN();
    t.params.assign(problem.names.size(), std::numeric_limits<double>::quiet_NaN());
  }
  return t;
}

bool is_success(const TrialRecord& t, const SuccessRule& rule, const std::optional<std::vector<double>>& truth) {
  if (t.status == "failed" || !std::isfinite(t.f_final)) return false;
  if (rule.target_fitness && !(t.f_final <= *rule.target_fitness)) return false;
  if (rule.relative_band && truth) {
    for (std::size_t k = 0; k < truth->size(); ++k) {
      if (!(std::abs(t.params[k] / (*truth)[k] - 1.0) <= *rule.relative_band)) return false;
    }
  }
  return true;
}

double success_rate(const TrialReport& report, const SuccessRule& rule,
                    const std::optional<std::vector<double>>& truth, const std::string& algorithm) {
  std::size_t n = 0;
  std::size_t ok = 0;
  for (const auto& t : report.trials) {
    if (!algorithm.empty() && t.algorithm != algorithm) continue;
    ++n;
    if (is_success(t, rule, truth)) ++ok;
  }
  return n == 0 ? 0.0 : static_cast<double>(ok) / static_cast<double>(n);
}

double quantile(std::vector<double> v, double p) {
  if (v.empty()) throw ContractError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ContractError("quantile probability must be in [0, 1]");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Histogram histogram(const std::vector<double>& values, std::size_t bins) {
  if (bins == 0) throw ContractError("histogram needs at least one bin");
  Histogram h;
  h.counts.assign(bins, 0);
  std::vector<double> v;
  for (double x : values) {
    if (std::isfinite(x)) v.push_back(x);
  }
  if (v.empty()) {
    h.edges.assign(bins + 1, 0.0);
    return h;
  }
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  const double lo = *mn;
  const double hi = *mx;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    h.edges[i] = i == bins ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  for (double x : v) {
    std::size_t b = bins - 1;
    // Right-open bins: the first edge strictly above x closes the bin.
    const auto it = std::upper_bound(h.edges.begin(), h.edges.end() - 1, x);
    if (it != h.edges.end() - 1) b = static_cast<std::size_t>(it - h.edges.begin()) - 1;
    ++h.counts[b];
  }
  return h;
}

std::size_t count_plateaus(std::vector<double> values, double ratio, std::size_t min_members) {
  std::erase_if(values, [](double v) { return !(v > 0.0) || !std::isfinite(v); });
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  std::size_t groups = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= values.size(); ++i) {
    if (i == values.size() || values[i] > ratio * values[i - 1]) {
      if (run >= min_members) ++groups;
      run = 1;
    } else {
      ++run;
    }
  }
  return groups;
}

TrialReport run_campaign(const CampaignConfig& cfg) {
  cfg.validate();
  return run_campaign(cfg, CampaignProblem::from_spec(cfg.problem));
}

TrialReport run_campaign(const CampaignConfig& cfg, const CampaignProblem& problem) {
  cfg.validate();
  const SuccessRule rule = effective_success_rule(cfg, problem);
  const std::size_t n_alg = cfg.algorithms.size();
  const std::size_t jobs = n_alg * cfg.trials;

  TrialReport report;
  report.param_names = problem.names;
  report.target_fitness = rule.target_fitness;
  report.relative_band = problem.truth ? rule.relative_band : std::nullopt;
  report.master_seed = cfg.master_seed;
  report.trials.resize(jobs);
  for (const auto& a : cfg.algorithms) {
    if (a.global && !a.budget.deterministic()) report.deterministic = false;
  }

  auto work = [&](std::size_t job) {
    const std::size_t a = job / cfg.trials;
    const std::size_t i = job % cfg.trials;
    TrialRecord t = run_trial(cfg.algorithms[a], problem, cfg.params, derive_seed(cfg.master_seed, i),
                              cfg.write_traces);
    t.trial = i;
    t.success = is_success(t, rule, problem.truth);
    report.trials[job] = std::move(t);
  };
  const std::size_t threads = std::clamp<std::size_t>(cfg.workers, 1, jobs);
  if (threads == 1) {
    for (std::size_t j = 0; j < jobs; ++j) work(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < jobs; j = next++) work(j);
      });
    }
  }

  static constexpr double kProbs[] = {0.0, 0.025, 0.25, 0.5, 0.75, 0.975, 1.0};
  for (std::size_t a = 0; a < n_alg; ++a) {
    AlgorithmSummary s;
    s.algorithm = cfg.algorithms[a].id;
    s.trials = cfg.trials;
    std::vector<double> f;
    std::vector<std::vector<double>> params(problem.names.size());
    double evals = 0.0;
    for (std::size_t i = 0; i < cfg.trials; ++i) {
      const auto& t = report.trials[a * cfg.trials + i];
      if (t.success) ++s.successes;
      if (t.status == "failed") ++s.failures;
      if (std::isfinite(t.f_final)) f.push_back(t.f_final);
      for (std::size_t k = 0; k < params.size(); ++k) params[k].push_back(t.params[k]);
      evals += static_cast<double>(t.evals);
    }
    s.success_rate = static_cast<double>(s.successes) / static_cast<double>(s.trials);
    s.mean_evals = evals / static_cast<double>(s.trials);
    if (!f.empty()) {
      for (double p : kProbs) s.f_quantiles.emplace_back(p, quantile(f, p));
    }
    s.f_plateaus = count_plateaus(f);
    for (std::size_t k = 0; k < params.size(); ++k) {
      s.histograms.emplace_back(problem.names[k], histogram(params[k], cfg.histogram_bins));
    }
    s.histograms.emplace_back("f_final", histogram(f, cfg.histogram_bins));
    report.summaries.push_back(std::move(s));
  }
  return report;
}

}  // namespace fdtrfit

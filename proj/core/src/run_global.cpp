#include <algorithm>
#include <cctype>

#include "fdtrfit/error.hpp"
#include "fdtrfit/global_opt.hpp"

namespace fdtrfit {

std::string to_string(GlobalAlgorithm a) {
  switch (a) {
    case GlobalAlgorithm::ga: return "GA";
    case GlobalAlgorithm::qga: return "QGA";
    case GlobalAlgorithm::pso: return "PSO";
    case GlobalAlgorithm::fwa: return "FWA";
  }
  return "unknown";
}

std::optional<GlobalAlgorithm> parse_global_algorithm(const std::string& s) {
  std::string l(s);
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  if (l == "ga") return GlobalAlgorithm::ga;
  if (l == "qga") return GlobalAlgorithm::qga;
  if (l == "pso") return GlobalAlgorithm::pso;
  if (l == "fwa") return GlobalAlgorithm::fwa;
  return std::nullopt;
}

namespace {

void drive(GlobalAlgorithm alg, const Box& box, Evaluator& eval, Rng& rng, const GlobalParams& gp) {
  switch (alg) {
    case GlobalAlgorithm::pso: {
      auto s = pso_init(gp.pso, box, eval, rng);
      while (!eval.should_stop()) pso_step(s, gp.pso, box, eval, rng);
      break;
    }
    case GlobalAlgorithm::ga: {
      auto pop = ga_init(gp.ga, box, eval, rng);
      while (!eval.should_stop()) ga_generation(pop, gp.ga, box, eval, rng);
      break;
    }
    case GlobalAlgorithm::qga: {
      auto pop = qga_init(gp.qga, box.dim());
      do {
        qga_generation(pop, gp.qga, box, eval, rng);
      } while (!eval.should_stop());
      break;
    }
    case GlobalAlgorithm::fwa: {
      auto pop = fwa_init(gp.fwa, box, eval, rng);
      while (!eval.should_stop()) fwa_generation(pop, gp.fwa, box, eval, rng);
      break;
    }
  }
}

}  // namespace

RunResult run_global(GlobalAlgorithm alg, const ObjectiveFn& f, const Box& box, const Budget& budget,
                     std::uint64_t seed, const GlobalParams& params) {
  budget.validate();
  if (box.dim() == 0) throw ContractError("run_global: search box has no dimensions");
  Evaluator eval(f, budget, params.workers);
  Rng rng(seed);
  try {
    drive(alg, box, eval, rng, params);
  } catch (const ConfigError&) {
    throw;
  } catch (const ContractError&) {
    throw;
  } catch (const std::exception& e) {
    throw NumericalError(to_string(alg) + " run aborted after " + std::to_string(eval.evals()) +
                         " evaluations: " + e.what());
  }
  RunResult r;
  r.best_x = eval.best_point();
  r.best_f = eval.best_fitness();
  r.evals = eval.evals();
  r.trace = eval.trace();
  r.terminated_by = *eval.reason();
  return r;
}

}  // namespace fdtrfit

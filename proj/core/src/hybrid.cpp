#include "fdtrfit/hybrid.hpp"

#include <cmath>

#include "fdtrfit/error.hpp"

namespace fdtrfit {

namespace {

template <class F>
auto tagged(const char* stage, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(stage) + ": " + e.what());
  } catch (const ContractError& e) {
    throw ContractError(std::string(stage) + ": " + e.what());
  } catch (const std::exception& e) {
    throw NumericalError(std::string(stage) + ": " + e.what());
  }
}

}  // namespace

void HybridConfig::validate() const {
  switch_budget.validate();
  if (!(local_tol > 0.0)) throw ConfigError("hybrid: local tolerance must be positive");
}

std::string HybridConfig::label() const {
  std::string s = "H" + to_string(global_alg);
  if (local_alg != LocalAlgorithm::bfgs) s += "-" + to_string(local_alg);
  return s;
}

LocalResult run_local(LocalAlgorithm alg, const HybridObjective& obj, std::span<const double> x0,
                      double tol, std::size_t max_iter, std::optional<std::size_t> max_evals) {
  switch (alg) {
    case LocalAlgorithm::bfgs: {
      BfgsOptions o;
      o.tol = tol;
      o.max_iter = max_iter;
      o.max_evals = max_evals;
      return bfgs_minimize(obj.for_local(), x0, o);
    }
    case LocalAlgorithm::nelder_mead: {
      NelderMeadOptions o;
      o.tol = tol;
      o.max_iter = max_iter;
      o.max_evals = max_evals;
      return nelder_mead_minimize(obj.for_local(), x0, o);
    }
    case LocalAlgorithm::trust_region: {
      if (!obj.residuals) throw ConfigError("trust_region needs a residual function");
      TrustRegionOptions o;
      o.tol = tol;
      o.max_iter = max_iter;
      o.max_evals = max_evals;
      return trust_region_lsq(obj.residuals, x0, o);
    }
  }
  throw ContractError("unknown local algorithm");
}

HybridResult run_hybrid(const HybridConfig& cfg, const HybridObjective& obj, const Box& box,
                        std::uint64_t seed) {
  cfg.validate();
  HybridResult out;
  out.global_part = tagged("global stage", [&] {
    return run_global(cfg.global_alg, obj.f, box, cfg.switch_budget, seed, cfg.global_params);
  });
  out.local_part = tagged("local stage", [&] {
    return run_local(cfg.local_alg, obj, out.global_part.best_x, cfg.local_tol, cfg.local_max_iter,
                     cfg.local_max_evals);
  });
  SearchVector x_local = out.local_part.x;
  double local_f = out.local_part.f;
  if (!box.contains(x_local)) {
    const SearchVector inside = box.constrain(x_local, BoundMode::clamp);
    for (std::size_t k = 0; k < inside.size(); ++k) {
      if (std::abs(inside[k] - x_local[k]) > 1e-6) out.clamped = true;
    }
    x_local = inside;
    local_f = obj.for_local()(x_local);
    ++out.local_part.evals;
  } else if (cfg.local_alg == LocalAlgorithm::trust_region) {
    // Sum of squares may differ from obj.f by a constant; compare on obj.f.
    local_f = obj.for_local()(x_local);
    ++out.local_part.evals;
  }
  out.total_evals = out.global_part.evals + out.local_part.evals;
  if (local_f <= out.global_part.best_f) {
    out.x_final = std::move(x_local);
    out.f_final = local_f;
    out.local_improved = local_f < out.global_part.best_f;
  } else {
    out.x_final = out.global_part.best_x;
    out.f_final = out.global_part.best_f;
  }
  return out;
}

}  // namespace fdtrfit

#include "fdtrfit/identifiability.hpp"

#include <cmath>
#include <limits>

#include "fdtrfit/error.hpp"

namespace fdtrfit {

namespace {

/// Multiplies the bound field by `factor`; for `k` both directions scale.
SampleStack scaled(const SampleStack& stack, const BindingTarget& t, double factor) {
  SampleStack out = stack;
  if (t.field == Field::k) {
    for (Field f : {Field::kz, Field::kr}) {
      const BindingTarget part{t.element, f};
      write_field(out, part, read_field(stack, part) * factor);
    }
  } else {
    write_field(out, t, read_field(stack, t) * factor);
  }
  return out;
}

}  // namespace

SensitivityCurve sensitivity(const FitProblem& problem, const std::string& param, double rel_step,
                             const SampleStack* at) {
  if (!(rel_step > 0.0)) throw ContractError("sensitivity: rel_step must be positive");
  SensitivityCurve c;
  c.parameter = param;
  for (std::size_t d = 0; d < problem.datasets().size(); ++d) {
    const auto& grid = problem.datasets()[d].grid.freqs();
    c.freqs.insert(c.freqs.end(), grid.begin(), grid.end());
    c.dataset.insert(c.dataset.end(), grid.size(), d);
  }
  c.S.assign(c.freqs.size(), 0.0);

  const BindingTarget* target = problem.binding().find(param);
  if (!target) {
    if (!problem.space().find(param)) throw ConfigError("sensitivity: unknown parameter '" + param + "'");
    return c;
  }
  const SampleStack& base = at ? *at : problem.stack();
  const auto up = problem.simulate_stack(scaled(base, *target, std::exp(rel_step)));
  const auto down = problem.simulate_stack(scaled(base, *target, std::exp(-rel_step)));
  std::size_t k = 0;
  for (std::size_t d = 0; d < up.size(); ++d) {
    for (std::size_t i = 0; i < up[d].size(); ++i) c.S[k++] = (up[d][i] - down[d][i]) / (2.0 * rel_step);
  }
  return c;
}

IdentifiabilityReport svd_report(Eigen::MatrixXd jacobian, std::vector<std::string> params) {
  if (jacobian.cols() == 0) throw ContractError("identifiability: need at least one parameter");
  IdentifiabilityReport r;
  r.params = std::move(params);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jacobian, Eigen::ComputeThinU | Eigen::ComputeThinV);
  r.singular_values = svd.singularValues();
  r.directions = svd.matrixV();
  r.jacobian = std::move(jacobian);
  const double smax = r.singular_values.size() ? r.singular_values(0) : 0.0;
  const double smin = r.singular_values.size() ? r.singular_values(r.singular_values.size() - 1) : 0.0;
  r.degenerate = smax == 0.0;
  r.condition_number = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  return r;
}

IdentifiabilityReport identifiability_svd(const FitProblem& problem,
                                          const std::vector<std::string>& params, double rel_step,
                                          const SampleStack* at) {
  if (params.empty()) throw ContractError("identifiability: need at least one parameter");
  Eigen::MatrixXd J(static_cast<Eigen::Index>(problem.residual_count()),
                    static_cast<Eigen::Index>(params.size()));
  for (std::size_t j = 0; j < params.size(); ++j) {
    const auto c = sensitivity(problem, params[j], rel_step, at);
    J.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(c.S.data(), J.rows());
  }
  return svd_report(std::move(J), params);
}

}  // namespace fdtrfit

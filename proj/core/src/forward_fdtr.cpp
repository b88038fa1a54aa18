#include "fdtrfit/forward_fdtr.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fdtrfit/error.hpp"
#include "fdtr_kernel.hpp"

namespace fdtrfit {

namespace {

using cdouble = std::complex<double>;

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

/// Principal root of (kr lambda^2 + i omega C) / kz; Re q > 0 for omega C > 0.
cdouble wavenumber(const Layer& layer, double lambda, double omega) {
  return std::sqrt(cdouble(layer.kr * lambda * lambda, omega * layer.heat_capacity) / layer.kz);
}

/// tanh(z) for Re z >= 0 without overflow.
cdouble tanh_nonneg(cdouble z) {
  const cdouble e = std::exp(-2.0 * z);
  return (1.0 - e) / (1.0 + e);
}

std::string describe(const SampleStack& stack) {
  std::ostringstream os;
  os.precision(6);
  for (const auto& e : stack.elements()) {
    if (const auto* l = std::get_if<Layer>(&e)) {
      os << l->name << "(kz=" << l->kz << ",kr=" << l->kr << ",C=" << l->heat_capacity
         << ",h=" << l->thickness << ") ";
    } else {
      const auto& i = std::get<Interface>(e);
      os << i.name << "(G=" << i.conductance << ") ";
    }
  }
  return os.str();
}

}  // namespace

void SpotConfig::validate() const {
  if (!(r_pump > 0.0 && r_probe > 0.0)) {
    throw ContractError("spot radii must be positive");
  }
}

FrequencyGrid::FrequencyGrid(std::vector<double> freqs) : freqs_(std::move(freqs)) {
  if (freqs_.empty()) throw ContractError("frequency grid is empty");
  for (std::size_t i = 0; i < freqs_.size(); ++i) {
    if (!(freqs_[i] > 0.0) || !std::isfinite(freqs_[i])) {
      throw ContractError("frequencies must be positive and finite");
    }
    if (i > 0 && !(freqs_[i] > freqs_[i - 1])) {
      throw ContractError("frequencies must be strictly increasing");
    }
  }
}

FrequencyGrid FrequencyGrid::log_spaced(double f_min, double f_max, std::size_t count) {
  if (count == 0) throw ContractError("log_spaced: count must be positive");
  if (count == 1) return FrequencyGrid({f_min});
  if (!(f_min > 0.0 && f_max > f_min)) throw ContractError("log_spaced: need 0 < f_min < f_max");
  std::vector<double> f(count);
  const double a = std::log10(f_min);
  const double b = std::log10(f_max);
  for (std::size_t i = 0; i < count; ++i) {
    f[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  f.front() = f_min;
  f.back() = f_max;
  return FrequencyGrid(std::move(f));
}

void QuadratureSpec::validate() const {
  if (node_count < 16) throw ContractError("quadrature needs at least 16 nodes");
  if (lambda_max_factor < 6.0) throw ContractError("lambda_max_factor must be at least 6");
  if (panels < 1 || node_count % panels != 0) {
    throw ContractError("node_count must be a positive multiple of the panel count");
  }
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) nodes[static_cast<std::size_t>(n / 2)] = 0.0;
}

std::complex<double> fold_impedance(const SampleStack& stack, double lambda, double omega) {
  const auto& elems = stack.elements();
  const auto& bottom = std::get<Layer>(elems.back());
  cdouble q = wavenumber(bottom, lambda, omega);
  cdouble z;
  if (bottom.terminal) {
    z = 1.0 / (bottom.kz * q);
  } else {
    // Adiabatic floor: cosh(qh) / (kz q sinh(qh)).
    z = 1.0 / (bottom.kz * q * tanh_nonneg(q * bottom.thickness));
  }
  for (std::size_t i = elems.size() - 1; i-- > 0;) {
    if (const auto* itf = std::get_if<Interface>(&elems[i])) {
      z += 1.0 / itf->conductance;
      continue;
    }
    const auto& layer = std::get<Layer>(elems[i]);
    q = wavenumber(layer, lambda, omega);
    const cdouble kq = layer.kz * q;
    const cdouble t = tanh_nonneg(q * layer.thickness);
    z = (z + t / kq) / (z * kq * t + 1.0);
  }
  return z;
}

std::complex<double> surface_response(const SampleStack& stack, const SpotConfig& spot, double f,
                                      const QuadratureSpec& quad) {
  PhaseModel model(spot, FrequencyGrid({f}), quad);
  return model.responses(stack).front();
}

std::vector<double> phase_signal(const SampleStack& stack, const SpotConfig& spot,
                                 const FrequencyGrid& grid, const QuadratureSpec& quad) {
  return PhaseModel(spot, grid, quad).phases(stack);
}

std::vector<std::complex<double>> response_curve(const SampleStack& stack, const SpotConfig& spot,
                                                 const FrequencyGrid& grid,
                                                 const QuadratureSpec& quad) {
  return PhaseModel(spot, grid, quad).responses(stack);
}

PhaseModel::PhaseModel(const SpotConfig& spot, FrequencyGrid grid, const QuadratureSpec& quad)
    : spot_(spot), grid_(std::move(grid)), quad_(quad) {
  spot_.validate();
  quad_.validate();
  if (grid_.size() == 0) throw ContractError("PhaseModel: empty frequency grid");

  std::vector<double> x, w;
  const int per_panel = quad_.node_count / quad_.panels;
  gauss_legendre(per_panel, x, w);

  const double lambda_max = quad_.lambda_max_factor / spot_.min_radius();
  const double panel_width = lambda_max / quad_.panels;
  const double gauss = (spot_.r_pump * spot_.r_pump + spot_.r_probe * spot_.r_probe) / 8.0;
  lambda_sq_.reserve(static_cast<std::size_t>(quad_.node_count));
  kernel_.reserve(static_cast<std::size_t>(quad_.node_count));
  for (int p = 0; p < quad_.panels; ++p) {
    const double a = p * panel_width;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double lambda = a + 0.5 * panel_width * (x[j] + 1.0);
      lambda_sq_.push_back(lambda * lambda);
      kernel_.push_back(0.5 * panel_width * w[j] * lambda * std::exp(-gauss * lambda * lambda));
    }
  }
}

void PhaseModel::evaluate(const SampleStack& stack, std::span<std::complex<double>> out) const {
  const std::size_t n = lambda_sq_.size();
  thread_local std::vector<double> zr, zi;
  zr.resize(n);
  zi.resize(n);
  const double* lsq = lambda_sq_.data();
  const auto& elems = stack.elements();
  const auto& bottom = std::get<Layer>(elems.back());

  for (std::size_t fi = 0; fi < grid_.size(); ++fi) {
    const double omega = 2.0 * std::numbers::pi * grid_[fi];
    const double b_bottom = omega * bottom.heat_capacity / bottom.kz;
    if (bottom.terminal) {
      detail::fold_terminal(lsq, zr.data(), zi.data(), n, bottom.kr / bottom.kz, b_bottom, bottom.kz);
    } else {
      detail::fold_adiabatic(lsq, zr.data(), zi.data(), n, bottom.kr / bottom.kz, b_bottom,
                             bottom.kz, bottom.thickness);
    }
    for (std::size_t i = elems.size() - 1; i-- > 0;) {
      if (const auto* itf = std::get_if<Interface>(&elems[i])) {
        const double r = 1.0 / itf->conductance;
        for (std::size_t j = 0; j < n; ++j) zr[j] += r;
        continue;
      }
      const auto& layer = std::get<Layer>(elems[i]);
      detail::fold_layer(lsq, zr.data(), zi.data(), n, layer.kr / layer.kz,
                         omega * layer.heat_capacity / layer.kz, layer.kz, layer.thickness);
    }
    double hr = 0.0;
    double hi = 0.0;
    detail::weighted_sum(kernel_.data(), zr.data(), zi.data(), n, hr, hi);
    if (!std::isfinite(hr) || !std::isfinite(hi)) {
      throw NumericalError("non-finite surface response at f=" + std::to_string(grid_[fi]) +
                           " Hz for stack " + describe(stack));
    }
    out[fi] = {hr, hi};
  }
}

void PhaseModel::phases(const SampleStack& stack, std::span<double> out) const {
  if (out.size() != grid_.size()) throw ContractError("PhaseModel::phases: output size mismatch");
  thread_local std::vector<std::complex<double>> h;
  h.resize(grid_.size());
  evaluate(stack, h);
  for (std::size_t i = 0; i < h.size(); ++i) {
    out[i] = std::atan2(h[i].imag(), h[i].real()) * kRadToDeg;
  }
}

std::vector<double> PhaseModel::phases(const SampleStack& stack) const {
  std::vector<double> out(grid_.size());
  phases(stack, out);
  return out;
}

std::vector<std::complex<double>> PhaseModel::responses(const SampleStack& stack) const {
  std::vector<std::complex<double>> out(grid_.size());
  evaluate(stack, out);
  return out;
}

}  // namespace fdtrfit

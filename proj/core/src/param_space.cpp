#include "fdtrfit/param_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fdtrfit/error.hpp"

namespace fdtrfit {

namespace {

double reflect_into(double x, double lo, double hi) {
  if (x >= lo && x <= hi) return x;
  if (!std::isfinite(x)) return std::isnan(x) ? lo : std::clamp(x, lo, hi);
  const double width = hi - lo;
  if (width <= 0.0) return lo;
  double y = std::fmod(x - lo, 2.0 * width);
  if (y < 0.0) y += 2.0 * width;
  if (y > width) y = 2.0 * width - y;
  return std::clamp(lo + y, lo, hi);
}

}  // namespace

Box::Box(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) {
    throw ContractError("Box: lower and upper bounds differ in length");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i])) {
      throw ContractError("Box: lower bound must be below upper bound on axis " +
                          std::to_string(i));
    }
  }
}

bool Box::contains(std::span<const double> v) const {
  if (v.size() != dim()) return false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= lower_[i] && v[i] <= upper_[i])) return false;
  }
  return true;
}

SearchVector Box::constrain(std::span<const double> v, BoundMode mode) const {
  SearchVector out(v.begin(), v.end());
  constrain_in_place(out, mode);
  return out;
}

void Box::constrain_in_place(std::span<double> v, BoundMode mode) const {
  if (v.size() != dim()) {
    throw ContractError("constrain: expected " + std::to_string(dim()) + " components, got " +
                        std::to_string(v.size()));
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mode == BoundMode::clamp) {
      v[i] = std::isnan(v[i]) ? lower_[i] : std::clamp(v[i], lower_[i], upper_[i]);
    } else {
      v[i] = reflect_into(v[i], lower_[i], upper_[i]);
    }
  }
}

SearchVector Box::decode_bits(std::span<const std::uint8_t> bits, int bits_per_param) const {
  if (bits_per_param < 1 || bits_per_param > 52) {
    throw ContractError("decode_bits: bits per parameter must be in [1, 52]");
  }
  const auto L = static_cast<std::size_t>(bits_per_param);
  if (bits.size() != dim() * L) {
    throw ContractError("decode_bits: expected " + std::to_string(dim() * L) + " bits, got " +
                        std::to_string(bits.size()));
  }
  const double full = std::ldexp(1.0, bits_per_param) - 1.0;
  SearchVector out(dim());
  for (std::size_t p = 0; p < dim(); ++p) {
    std::uint64_t n = 0;
    for (std::size_t b = 0; b < L; ++b) n = (n << 1) | (bits[p * L + b] & 1u);
    out[p] = lower_[p] + static_cast<double>(n) / full * (upper_[p] - lower_[p]);
  }
  return out;
}

ParameterSpace::ParameterSpace(std::vector<ParamDef> defs) : defs_(std::move(defs)) {
  std::set<std::string> names;
  std::vector<double> lo, hi;
  for (std::size_t i = 0; i < defs_.size(); ++i) {
    const ParamDef& d = defs_[i];
    if (d.name.empty()) throw ConfigError("parameter with empty name");
    if (!names.insert(d.name).second) throw ConfigError("duplicate parameter name '" + d.name + "'");
    if (d.role == Role::fixed) {
      if (!d.fixed_value) throw ConfigError("fixed parameter '" + d.name + "' has no value");
      if (d.scale == Scale::log10 && *d.fixed_value <= 0.0) {
        throw ConfigError("log-scaled parameter '" + d.name + "' must be positive");
      }
      continue;
    }
    if (!(d.lower < d.upper)) {
      throw ConfigError("parameter '" + d.name + "' needs lower < upper");
    }
    if (d.scale == Scale::log10 && !(d.lower > 0.0)) {
      throw ConfigError("log-scaled parameter '" + d.name + "' needs a positive lower bound");
    }
    fit_index_.push_back(i);
    if (d.scale == Scale::log10) {
      lo.push_back(std::log10(d.lower));
      hi.push_back(std::log10(d.upper));
    } else {
      lo.push_back(d.lower);
      hi.push_back(d.upper);
    }
  }
  box_ = Box(std::move(lo), std::move(hi));
}

std::vector<std::string> ParameterSpace::fit_names() const {
  std::vector<std::string> out;
  out.reserve(dim());
  for (std::size_t i : fit_index_) out.push_back(defs_[i].name);
  return out;
}

std::optional<std::size_t> ParameterSpace::fit_position(const std::string& name) const {
  for (std::size_t k = 0; k < fit_index_.size(); ++k) {
    if (defs_[fit_index_[k]].name == name) return k;
  }
  return std::nullopt;
}

const ParamDef* ParameterSpace::find(const std::string& name) const {
  for (const ParamDef& d : defs_) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

std::vector<double> ParameterSpace::to_physical(std::span<const double> v) const {
  if (v.size() != dim()) {
    throw ContractError("to_physical: dimension mismatch (expected " + std::to_string(dim()) +
                        ", got " + std::to_string(v.size()) + ")");
  }
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[k] = fit(k).scale == Scale::log10 ? std::pow(10.0, v[k]) : v[k];
  }
  return out;
}

SearchVector ParameterSpace::to_scaled(std::span<const double> physical) const {
  if (physical.size() != dim()) {
    throw ContractError("to_scaled: dimension mismatch (expected " + std::to_string(dim()) +
                        ", got " + std::to_string(physical.size()) + ")");
  }
  SearchVector out(physical.size());
  for (std::size_t k = 0; k < physical.size(); ++k) {
    if (fit(k).scale == Scale::log10) {
      if (!(physical[k] > 0.0)) {
        throw ContractError("to_scaled: '" + fit(k).name + "' must be positive");
      }
      out[k] = std::log10(physical[k]);
    } else {
      out[k] = physical[k];
    }
  }
  return out;
}

}  // namespace fdtrfit

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fdtrfit {

/// Point in an optimizer's internal (scaled) coordinates.
using SearchVector = std::vector<double>;

enum class Scale { linear, log10 };
enum class Role { fit, fixed };
enum class BoundMode { reflect, clamp };

/// Axis-aligned box in scaled coordinates. Shared by every optimizer, so it
/// carries the constraint and bit-decoding rules rather than ParameterSpace.
class Box {
 public:
  Box() = default;
  Box(std::vector<double> lower, std::vector<double> upper);

  std::size_t dim() const noexcept { return lower_.size(); }
  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& upper() const noexcept { return upper_; }
  double width(std::size_t i) const { return upper_[i] - lower_[i]; }

  bool contains(std::span<const double> v) const;

  /// Moves every component inside the box. Reflection folds the overshoot
  /// back across the violated bound, repeating until it lands inside.
  SearchVector constrain(std::span<const double> v, BoundMode mode) const;
  void constrain_in_place(std::span<double> v, BoundMode mode) const;

  /// Maps `dim() * bits_per_param` bits (one byte per bit, big-endian within
  /// each parameter) onto the box: n / (2^L - 1) of the way from lower to upper.
  SearchVector decode_bits(std::span<const std::uint8_t> bits, int bits_per_param) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

struct ParamDef {
  std::string name;
  double lower = 0.0;  // physical units
  double upper = 0.0;
  Scale scale = Scale::linear;
  Role role = Role::fit;
  std::optional<double> fixed_value;
};

/// Ordered set of named parameters. Fit entries define the optimizer vector
/// layout in declaration order; fixed entries carry known model inputs.
class ParameterSpace {
 public:
  ParameterSpace() = default;
  explicit ParameterSpace(std::vector<ParamDef> defs);

  const std::vector<ParamDef>& defs() const noexcept { return defs_; }
  std::size_t dim() const noexcept { return fit_index_.size(); }

  /// Definition of the i-th fit parameter.
  const ParamDef& fit(std::size_t i) const { return defs_[fit_index_[i]]; }
  std::vector<std::string> fit_names() const;

  /// Position of `name` among the fit parameters.
  std::optional<std::size_t> fit_position(const std::string& name) const;
  const ParamDef* find(const std::string& name) const;

  /// Bounds of the fit parameters in scaled coordinates.
  const Box& box() const noexcept { return box_; }

  std::vector<double> to_physical(std::span<const double> v) const;
  SearchVector to_scaled(std::span<const double> physical) const;

  SearchVector decode_bits(std::span<const std::uint8_t> bits, int bits_per_param = 20) const {
    return box_.decode_bits(bits, bits_per_param);
  }
  SearchVector constrain(std::span<const double> v, BoundMode mode) const {
    return box_.constrain(v, mode);
  }

 private:
  std::vector<ParamDef> defs_;
  std::vector<std::size_t> fit_index_;
  Box box_;
};

}  // namespace fdtrfit

#pragma once

#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "fdtrfit/param_space.hpp"

namespace fdtrfit {

/// Homogeneous slab. SI units throughout: W/(m K), J/(m^3 K), m.
struct Layer {
  std::string name;
  double kz = 0.0;
  double kr = 0.0;
  double heat_capacity = 0.0;
  double thickness = 0.0;
  bool terminal = false;  // semi-infinite; thickness ignored
};

/// Thermal boundary conductance between two layers, W/(m^2 K).
struct Interface {
  std::string name;
  double conductance = 0.0;
};

using StackElement = std::variant<Layer, Interface>;

enum class BottomBoundary { semi_infinite, adiabatic };

/// Layers and interfaces from the surface down, alternating and ending with a
/// layer. A terminal (semi-infinite) layer may only appear last.
class SampleStack {
 public:
  SampleStack() = default;
  SampleStack(std::vector<StackElement> elements, BottomBoundary bottom);

  const std::vector<StackElement>& elements() const noexcept { return elements_; }
  BottomBoundary bottom() const noexcept { return bottom_; }

  const StackElement* find(const std::string& name) const;
  StackElement* find(const std::string& name);
  const Layer& layer(const std::string& name) const;
  const Interface& interface(const std::string& name) const;

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;

 private:
  std::vector<StackElement> elements_;
  BottomBoundary bottom_ = BottomBoundary::semi_infinite;
};

/// Stack field a parameter can be bound to. `k` writes both kz and kr.
enum class Field { k, kz, kr, heat_capacity, thickness, conductance };

struct BindingTarget {
  std::string element;
  Field field = Field::k;
};

/// Maps parameter names to stack fields.
class ParameterBinding {
 public:
  ParameterBinding() = default;

  /// Throws ConfigError if the name or the field is already bound.
  void bind(const std::string& param, BindingTarget target);

  const std::vector<std::pair<std::string, BindingTarget>>& entries() const noexcept {
    return entries_;
  }
  const BindingTarget* find(const std::string& param) const;
  bool empty() const noexcept { return entries_.empty(); }

  /// Every target exists in `stack` and fits the element kind.
  void validate(const SampleStack& stack) const;

 private:
  std::vector<std::pair<std::string, BindingTarget>> entries_;
};

Field parse_field(const std::string& text);
std::string to_string(Field field);

/// Reads a bound field. For Field::k the cross-plane value is returned.
double read_field(const SampleStack& stack, const BindingTarget& target);

/// Writes one field on a copy-in-place; value must be positive.
void write_field(SampleStack& stack, const BindingTarget& target, double value);

/// Copy of `stack` with every bound parameter of `space` overwritten: fixed
/// entries take their fixed value, fit entries take `fit_physical` (in
/// ParameterSpace fit order). Parameters without a binding are ignored.
SampleStack resolve(const SampleStack& stack, const ParameterBinding& binding,
                    const ParameterSpace& space, std::span<const double> fit_physical);

/// Copy of `stack` with the named assignments applied through `binding`.
SampleStack resolve(const SampleStack& stack, const ParameterBinding& binding,
                    std::span<const std::pair<std::string, double>> assignments);

/// Nominal parameter values used for synthetic GaN/Si data. These are
/// configuration inputs inside the fit ranges, not measured results.
struct GanSiTruth {
  double g1 = 150e6;
  double k_gan = 130.0;
  double c_gan = 2.64e6;
  double k_algan = 10.0;
  double k_si = 140.0;

  std::vector<double> as_vector() const { return {g1, k_gan, c_gan, k_algan, k_si}; }
};

/// The Al / GaN / AlGaN / Si heterostructure with the five fit parameters
/// (G1, k_GaN, C_GaN, k_AlGaN, k_Si; all log10-scaled) and its fixed inputs.
/// Fit fields in the returned stack hold GanSiTruth defaults.
std::tuple<SampleStack, ParameterSpace, ParameterBinding> build_gan_si_stack();

/// Spot radii of the two GaN/Si measurement configurations, metres.
inline constexpr double kGanSiSpotLarge = 7.4e-6;
inline constexpr double kGanSiSpotSmall = 3.4e-6;

}  // namespace fdtrfit

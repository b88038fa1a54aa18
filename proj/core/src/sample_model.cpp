#include "fdtrfit/sample_model.hpp"

#include <cmath>

#include "fdtrfit/error.hpp"

namespace fdtrfit {

namespace {

const std::string& element_name(const StackElement& e) {
  return std::visit([](const auto& x) -> const std::string& { return x.name; }, e);
}

bool is_layer_field(Field f) { return f != Field::conductance; }

bool fields_overlap(Field a, Field b) {
  if (a == b) return true;
  auto is_k = [](Field f) { return f == Field::k || f == Field::kz || f == Field::kr; };
  return (a == Field::k && is_k(b)) || (b == Field::k && is_k(a));
}

}  // namespace

SampleStack::SampleStack(std::vector<StackElement> elements, BottomBoundary bottom)
    : elements_(std::move(elements)), bottom_(bottom) {
  validate();
}

void SampleStack::validate() const {
  if (elements_.empty()) throw ConfigError("sample stack is empty");
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const bool want_layer = (i % 2 == 0);
    if (want_layer != std::holds_alternative<Layer>(elements_[i])) {
      throw ConfigError("sample stack must alternate layer/interface starting with a layer (element " +
                        std::to_string(i) + " '" + element_name(elements_[i]) + "')");
    }
  }
  if (!std::holds_alternative<Layer>(elements_.back())) {
    throw ConfigError("sample stack must end with a layer");
  }
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const StackElement& e = elements_[i];
    if (element_name(e).empty()) throw ConfigError("stack element with empty name");
    for (std::size_t j = 0; j < i; ++j) {
      if (element_name(elements_[j]) == element_name(e)) {
        throw ConfigError("duplicate stack element name '" + element_name(e) + "'");
      }
    }
    if (const auto* layer = std::get_if<Layer>(&e)) {
      if (!(layer->kz > 0.0 && layer->kr > 0.0 && layer->heat_capacity > 0.0)) {
        throw ConfigError("layer '" + layer->name + "' needs positive kz, kr and C");
      }
      if (layer->terminal && i + 1 != elements_.size()) {
        throw ConfigError("only the last layer may be terminal ('" + layer->name + "')");
      }
      if (!layer->terminal && !(layer->thickness > 0.0)) {
        throw ConfigError("layer '" + layer->name + "' needs a positive thickness");
      }
    } else {
      const auto& itf = std::get<Interface>(e);
      if (!(itf.conductance > 0.0)) {
        throw ConfigError("interface '" + itf.name + "' needs a positive conductance");
      }
    }
  }
  const auto& last = std::get<Layer>(elements_.back());
  if (bottom_ == BottomBoundary::adiabatic && last.terminal) {
    throw ConfigError("adiabatic bottom boundary requires a finite last layer");
  }
  if (bottom_ == BottomBoundary::semi_infinite && !last.terminal) {
    throw ConfigError("semi-infinite bottom boundary requires a terminal last layer");
  }
}

const StackElement* SampleStack::find(const std::string& name) const {
  for (const auto& e : elements_) {
    if (element_name(e) == name) return &e;
  }
  return nullptr;
}

StackElement* SampleStack::find(const std::string& name) {
  for (auto& e : elements_) {
    if (element_name(e) == name) return &e;
  }
  return nullptr;
}

const Layer& SampleStack::layer(const std::string& name) const {
  const StackElement* e = find(name);
  if (!e || !std::holds_alternative<Layer>(*e)) throw ContractError("no layer named '" + name + "'");
  return std::get<Layer>(*e);
}

const Interface& SampleStack::interface(const std::string& name) const {
  const StackElement* e = find(name);
  if (!e || !std::holds_alternative<Interface>(*e)) {
    throw ContractError("no interface named '" + name + "'");
  }
  return std::get<Interface>(*e);
}

Field parse_field(const std::string& text) {
  if (text == "k") return Field::k;
  if (text == "kz") return Field::kz;
  if (text == "kr") return Field::kr;
  if (text == "C") return Field::heat_capacity;
  if (text == "h") return Field::thickness;
  if (text == "G") return Field::conductance;
  throw ConfigError("unknown stack field '" + text + "' (expected k, kz, kr, C, h or G)");
}

std::string to_string(Field field) {
  switch (field) {
    case Field::k: return "k";
    case Field::kz: return "kz";
    case Field::kr: return "kr";
    case Field::heat_capacity: return "C";
    case Field::thickness: return "h";
    case Field::conductance: return "G";
  }
  return "?";
}

void ParameterBinding::bind(const std::string& param, BindingTarget target) {
  for (const auto& [name, existing] : entries_) {
    if (name == param) throw ConfigError("parameter '" + param + "' is bound twice");
    if (existing.element == target.element && fields_overlap(existing.field, target.field)) {
      throw ConfigError("field " + target.element + "." + to_string(target.field) +
                        " is bound by both '" + name + "' and '" + param + "'");
    }
  }
  entries_.emplace_back(param, std::move(target));
}

const BindingTarget* ParameterBinding::find(const std::string& param) const {
  for (const auto& [name, target] : entries_) {
    if (name == param) return &target;
  }
  return nullptr;
}

void ParameterBinding::validate(const SampleStack& stack) const {
  for (const auto& [name, target] : entries_) {
    const StackElement* e = stack.find(target.element);
    if (!e) {
      throw ConfigError("parameter '" + name + "' is bound to missing element '" + target.element + "'");
    }
    const bool layer = std::holds_alternative<Layer>(*e);
    if (layer != is_layer_field(target.field)) {
      throw ConfigError("parameter '" + name + "': field " + to_string(target.field) +
                        " does not exist on element '" + target.element + "'");
    }
  }
}

double read_field(const SampleStack& stack, const BindingTarget& target) {
  const StackElement* e = stack.find(target.element);
  if (!e) throw ContractError("no stack element named '" + target.element + "'");
  if (const auto* layer = std::get_if<Layer>(e)) {
    switch (target.field) {
      case Field::k:
      case Field::kz: return layer->kz;
      case Field::kr: return layer->kr;
      case Field::heat_capacity: return layer->heat_capacity;
      case Field::thickness: return layer->thickness;
      case Field::conductance: break;
    }
  } else if (target.field == Field::conductance) {
    return std::get<Interface>(*e).conductance;
  }
  throw ContractError("field " + to_string(target.field) + " not present on '" + target.element + "'");
}

void write_field(SampleStack& stack, const BindingTarget& target, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ContractError("value for " + target.element + "." + to_string(target.field) +
                        " must be positive and finite (got " + std::to_string(value) + ")");
  }
  StackElement* e = stack.find(target.element);
  if (!e) throw ContractError("no stack element named '" + target.element + "'");
  if (auto* layer = std::get_if<Layer>(e)) {
    switch (target.field) {
      case Field::k: layer->kz = layer->kr = value; return;
      case Field::kz: layer->kz = value; return;
      case Field::kr: layer->kr = value; return;
      case Field::heat_capacity: layer->heat_capacity = value; return;
      case Field::thickness: layer->thickness = value; return;
      case Field::conductance: break;
    }
  } else if (target.field == Field::conductance) {
    std::get<Interface>(*e).conductance = value;
    return;
  }
  throw ContractError("field " + to_string(target.field) + " not present on '" + target.element + "'");
}

SampleStack resolve(const SampleStack& stack, const ParameterBinding& binding,
                    const ParameterSpace& space, std::span<const double> fit_physical) {
  if (fit_physical.size() != space.dim()) {
    throw ContractError("resolve: expected " + std::to_string(space.dim()) + " values, got " +
                        std::to_string(fit_physical.size()));
  }
  SampleStack out = stack;
  std::size_t fit_pos = 0;
  for (const ParamDef& def : space.defs()) {
    const BindingTarget* target = binding.find(def.name);
    if (def.role == Role::fit) {
      const double value = fit_physical[fit_pos++];
      if (!target) throw ContractError("resolve: fit parameter '" + def.name + "' is not bound");
      write_field(out, *target, value);
    } else if (target) {
      write_field(out, *target, *def.fixed_value);
    }
  }
  return out;
}

SampleStack resolve(const SampleStack& stack, const ParameterBinding& binding,
                    std::span<const std::pair<std::string, double>> assignments) {
  SampleStack out = stack;
  for (const auto& [name, value] : assignments) {
    const BindingTarget* target = binding.find(name);
    if (!target) throw ContractError("resolve: parameter '" + name + "' is not bound");
    write_field(out, *target, value);
  }
  return out;
}

std::tuple<SampleStack, ParameterSpace, ParameterBinding> build_gan_si_stack() {
  constexpr double perfect_contact = 1e12;
  const GanSiTruth t;
  auto iso = [](std::string name, double k, double c, double h, bool terminal = false) {
    return Layer{std::move(name), k, k, c, h, terminal};
  };
  SampleStack stack(
      {
          iso("Al", 160.0, 2.44e6, 87.4e-9),
          Interface{"G1", t.g1},
          iso("GaN", t.k_gan, t.c_gan, 1080e-9),
          Interface{"GaN_AlGaN", perfect_contact},
          iso("AlGaN", t.k_algan, 2.6e6, 458e-9),
          Interface{"G2", 80e6},
          iso("Si", t.k_si, 1.665e6, 0.0, true),
      },
      BottomBoundary::semi_infinite);

  auto fit = [](std::string name, double lo, double hi) {
    return ParamDef{std::move(name), lo, hi, Scale::log10, Role::fit, std::nullopt};
  };
  auto fixed = [](std::string name, double value, double uncertainty) {
    return ParamDef{std::move(name), value - uncertainty, value + uncertainty, Scale::log10,
                    Role::fixed, value};
  };
  ParameterSpace space({
      fit("G1", 10e6, 300e6),
      fit("k_GaN", 1.0, 1000.0),
      fit("C_GaN", 0.5e6, 5e6),
      fit("k_AlGaN", 1.0, 500.0),
      fit("k_Si", 1.0, 1000.0),
      fixed("k_Al", 160.0, 16.0),
      fixed("C_Al", 2.44e6, 0.07e6),
      fixed("h_Al", 87.4e-9, 3e-9),
      fixed("h_GaN", 1080e-9, 10e-9),
      fixed("C_AlGaN", 2.6e6, 0.1e6),
      fixed("h_AlGaN", 458e-9, 8e-9),
      fixed("G2", 80e6, 40e6),
      fixed("C_Si", 1.665e6, 0.05e6),
  });

  ParameterBinding binding;
  binding.bind("G1", {"G1", Field::conductance});
  binding.bind("k_GaN", {"GaN", Field::k});
  binding.bind("C_GaN", {"GaN", Field::heat_capacity});
  binding.bind("k_AlGaN", {"AlGaN", Field::k});
  binding.bind("k_Si", {"Si", Field::k});
  binding.bind("k_Al", {"Al", Field::k});
  binding.bind("C_Al", {"Al", Field::heat_capacity});
  binding.bind("h_Al", {"Al", Field::thickness});
  binding.bind("h_GaN", {"GaN", Field::thickness});
  binding.bind("C_AlGaN", {"AlGaN", Field::heat_capacity});
  binding.bind("h_AlGaN", {"AlGaN", Field::thickness});
  binding.bind("G2", {"G2", Field::conductance});
  binding.bind("C_Si", {"Si", Field::heat_capacity});
  binding.validate(stack);

  return {std::move(stack), std::move(space), std::move(binding)};
}

}  // namespace fdtrfit

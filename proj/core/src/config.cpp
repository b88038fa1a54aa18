#include "fdtrfit/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fdtrfit/error.hpp"

namespace fdtrfit {

using nlohmann::json;

namespace {

// Config files use lab units; the model works in SI.
double field_unit(Field f) {
  switch (f) {
    case Field::k:
    case Field::kz:
    case Field::kr: return 1.0;             // W/(m K)
    case Field::heat_capacity: return 1e6;  // MJ/(m^3 K)
    case Field::thickness: return 1e-9;     // nm
    case Field::conductance: return 1e6;    // MW/(m^2 K)
  }
  return 1.0;
}

constexpr double kMicron = 1e-6;

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get<T>(j, key, where);
}

template <class T>
void assign_opt(const json& j, const char* key, const std::string& where, T& target) {
  if (auto v = get_opt<T>(j, key, where)) target = *v;
}

double positive(double v, const std::string& where) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(where + " must be positive and finite");
  return v;
}

SampleStack parse_stack(const json& j) {
  const std::string where = "problem.stack";
  check_keys(j, where, {"bottom", "elements"});
  const std::string bottom = j.value("bottom", "semi_infinite");
  BottomBoundary b;
  if (bottom == "semi_infinite") {
    b = BottomBoundary::semi_infinite;
  } else if (bottom == "adiabatic") {
    b = BottomBoundary::adiabatic;
  } else {
    throw ConfigError(where + ".bottom: expected 'semi_infinite' or 'adiabatic'");
  }
  const auto& elems = j.at("elements");
  if (!elems.is_array()) throw ConfigError(where + ".elements: expected an array");
  std::vector<StackElement> out;
  for (std::size_t i = 0; i < elems.size(); ++i) {
    const auto& e = elems[i];
    const std::string w = where + ".elements[" + std::to_string(i) + "]";
    if (e.contains("layer")) {
      check_keys(e, w, {"layer", "k", "kz", "kr", "C", "h_nm", "terminal"});
      Layer l;
      l.name = get<std::string>(e, "layer", w);
      const auto k = get_opt<double>(e, "k", w);
      const auto kz = get_opt<double>(e, "kz", w);
      const auto kr = get_opt<double>(e, "kr", w);
      if (k && (kz || kr)) throw ConfigError(w + ": give either k or kz/kr");
      if (!k && !(kz && kr)) throw ConfigError(w + ": needs k, or both kz and kr");
      l.kz = positive(k ? *k : *kz, w + ".kz");
      l.kr = positive(k ? *k : *kr, w + ".kr");
      l.heat_capacity = positive(get<double>(e, "C", w), w + ".C") * field_unit(Field::heat_capacity);
      l.terminal = e.value("terminal", false);
      if (e.contains("h_nm")) {
        l.thickness = positive(get<double>(e, "h_nm", w), w + ".h_nm") * field_unit(Field::thickness);
      } else if (!l.terminal) {
        throw ConfigError(w + ": finite layers need h_nm");
      }
      out.emplace_back(std::move(l));
    } else if (e.contains("interface")) {
      check_keys(e, w, {"interface", "G"});
      out.emplace_back(Interface{get<std::string>(e, "interface", w),
                                 positive(get<double>(e, "G", w), w + ".G") * field_unit(Field::conductance)});
    } else {
      throw ConfigError(w + ": expected a 'layer' or an 'interface' entry");
    }
  }
  try {
    return SampleStack(std::move(out), b);
  } catch (const ContractError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

BindingTarget parse_bind(const std::string& text, const std::string& where) {
  const auto dot = text.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == text.size()) {
    throw ConfigError(where + ": bind must look like 'Element.field'");
  }
  try {
    return {text.substr(0, dot), parse_field(text.substr(dot + 1))};
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

void parse_parameters(const json& j, ProblemSpec& p) {
  if (!j.is_array()) throw ConfigError("problem.parameters: expected an array");
  std::vector<ParamDef> defs;
  ParameterBinding binding;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    const std::string w = "problem.parameters[" + std::to_string(i) + "]";
    check_keys(e, w, {"name", "bind", "min", "max", "scale", "fixed"});
    ParamDef d;
    d.name = get<std::string>(e, "name", w);
    double unit = 1.0;
    if (e.contains("bind")) {
      const auto target = parse_bind(get<std::string>(e, "bind", w), w);
      unit = field_unit(target.field);
      binding.bind(d.name, target);
    }
    d.lower = get<double>(e, "min", w) * unit;
    d.upper = get<double>(e, "max", w) * unit;
    const std::string scale = e.value("scale", "log10");
    if (scale == "log10") {
      d.scale = Scale::log10;
    } else if (scale == "linear") {
      d.scale = Scale::linear;
    } else {
      throw ConfigError(w + ".scale: expected 'log10' or 'linear'");
    }
    if (auto fixed = get_opt<double>(e, "fixed", w)) {
      d.role = Role::fixed;
      d.fixed_value = *fixed * unit;
    }
    defs.push_back(std::move(d));
  }
  try {
    p.space = ParameterSpace(std::move(defs));
    binding.validate(p.stack);
  } catch (const ContractError& e) {
    throw ConfigError(std::string("problem.parameters: ") + e.what());
  }
  p.binding = std::move(binding);
}

SpotConfig parse_spot(const json& j, const std::string& w) {
  if (j.is_number()) return SpotConfig::same(positive(j.get<double>(), w) * kMicron);
  check_keys(j, w, {"pump_um", "probe_um"});
  return SpotConfig{positive(get<double>(j, "pump_um", w), w + ".pump_um") * kMicron,
                    positive(get<double>(j, "probe_um", w), w + ".probe_um") * kMicron};
}

double unit_for(const ProblemSpec& p, const std::string& name) {
  const BindingTarget* t = p.binding.find(name);
  return t ? field_unit(t->field) : 1.0;
}

void parse_data(const json& j, ProblemSpec& p) {
  const std::string where = "problem.data";
  check_keys(j, where, {"spots_um", "frequency", "truth", "noise_sigma_deg", "seed", "files"});
  if (j.contains("spots_um")) {
    p.spots.clear();
    const auto& s = j.at("spots_um");
    if (!s.is_array() || s.empty()) throw ConfigError(where + ".spots_um: expected a non-empty array");
    for (std::size_t i = 0; i < s.size(); ++i) {
      p.spots.push_back(parse_spot(s[i], where + ".spots_um[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("frequency")) {
    const auto& f = j.at("frequency");
    const std::string w = where + ".frequency";
    check_keys(f, w, {"min_hz", "max_hz", "points"});
    assign_opt(f, "min_hz", w, p.f_min_hz);
    assign_opt(f, "max_hz", w, p.f_max_hz);
    assign_opt(f, "points", w, p.points);
    if (!(p.f_min_hz > 0.0 && p.f_max_hz > p.f_min_hz) || p.points < 2) {
      throw ConfigError(w + ": need 0 < min_hz < max_hz and points >= 2");
    }
  }
  if (j.contains("truth")) {
    const auto& t = j.at("truth");
    if (!t.is_object()) throw ConfigError(where + ".truth: expected an object of name: value");
    std::vector<double> truth(p.space.dim());
    std::vector<bool> seen(p.space.dim(), false);
    for (const auto& [name, value] : t.items()) {
      const auto pos = p.space.fit_position(name);
      if (!pos) throw ConfigError(where + ".truth: '" + name + "' is not a fit parameter");
      if (!value.is_number()) throw ConfigError(where + ".truth." + name + ": expected a number");
      truth[*pos] = value.get<double>() * unit_for(p, name);
      seen[*pos] = true;
    }
    for (std::size_t k = 0; k < seen.size(); ++k) {
      if (!seen[k]) throw ConfigError(where + ".truth: missing '" + p.space.fit(k).name + "'");
    }
    p.truth = std::move(truth);
  }
  assign_opt(j, "noise_sigma_deg", where, p.noise_sigma_deg);
  if (!(p.noise_sigma_deg >= 0.0)) throw ConfigError(where + ".noise_sigma_deg must be non-negative");
  assign_opt(j, "seed", where, p.data_seed);
  if (j.contains("files")) {
    const auto& files = j.at("files");
    if (!files.is_array()) throw ConfigError(where + ".files: expected an array");
    for (std::size_t i = 0; i < files.size(); ++i) {
      const std::string w = where + ".files[" + std::to_string(i) + "]";
      check_keys(files[i], w, {"path", "spot_um"});
      p.files.push_back({get<std::string>(files[i], "path", w), parse_spot(files[i].at("spot_um"), w + ".spot_um")});
    }
  }
}

ProblemSpec parse_problem(const json& j, const std::filesystem::path& base) {
  check_keys(j, "problem", {"benchmark", "preset", "stack", "parameters", "data", "quadrature"});
  ProblemSpec p;
  if (j.contains("benchmark")) {
    p.benchmark = get<std::string>(j, "benchmark", "problem");
    if (p.benchmark != "Y" && p.benchmark != "Z") throw ConfigError("problem.benchmark: expected 'Y' or 'Z'");
    if (j.size() != 1) throw ConfigError("problem: a benchmark takes no other problem keys");
    return p;
  }
  if (j.contains("preset")) {
    if (get<std::string>(j, "preset", "problem") != "gan_si") throw ConfigError("problem.preset: only 'gan_si' is known");
    if (j.contains("stack") || j.contains("parameters")) {
      throw ConfigError("problem: 'preset' replaces 'stack' and 'parameters'");
    }
    std::tie(p.stack, p.space, p.binding) = build_gan_si_stack();
    p.spots = {SpotConfig::same(kGanSiSpotLarge), SpotConfig::same(kGanSiSpotSmall)};
    p.truth = GanSiTruth{}.as_vector();
  } else {
    if (!j.contains("stack") || !j.contains("parameters")) {
      throw ConfigError("problem: needs 'benchmark', 'preset', or 'stack' with 'parameters'");
    }
    p.stack = parse_stack(j.at("stack"));
    parse_parameters(j.at("parameters"), p);
  }
  if (p.space.dim() == 0) throw ConfigError("problem.parameters: no fit parameters");
  if (j.contains("data")) parse_data(j.at("data"), p);
  for (auto& f : p.files) {
    if (f.path.is_relative()) f.path = base / f.path;
  }
  if (p.files.empty() && !p.truth) throw ConfigError("problem.data: synthetic data needs 'truth' (or give 'files')");
  if (p.files.empty() && p.spots.empty()) throw ConfigError("problem.data: synthetic data needs 'spots_um'");
  if (j.contains("quadrature")) {
    const auto& q = j.at("quadrature");
    check_keys(q, "problem.quadrature", {"nodes", "lambda_max_factor", "panels"});
    assign_opt(q, "nodes", "problem.quadrature", p.quadrature.node_count);
    assign_opt(q, "lambda_max_factor", "problem.quadrature", p.quadrature.lambda_max_factor);
    assign_opt(q, "panels", "problem.quadrature", p.quadrature.panels);
    try {
      p.quadrature.validate();
    } catch (const ContractError& e) {
      throw ConfigError(std::string("problem.quadrature: ") + e.what());
    }
  }
  return p;
}

Budget parse_budget(const json& j, const std::string& w) {
  check_keys(j, w, {"max_evals", "max_seconds", "target_fitness"});
  Budget b{get_opt<std::size_t>(j, "max_evals", w), get_opt<double>(j, "max_seconds", w),
           get_opt<double>(j, "target_fitness", w)};
  try {
    b.validate();
  } catch (const ContractError& e) {
    throw ConfigError(w + ": " + e.what());
  }
  return b;
}

AlgorithmSpec parse_algorithm(const json& j, const std::string& w) {
  if (j.is_string()) return parse_algorithm_id(j.get<std::string>());
  check_keys(j, w, {"id", "global", "local", "budget", "local_tol", "local_max_iter", "local_max_evals"});
  AlgorithmSpec a;
  if (auto g = get_opt<std::string>(j, "global", w)) {
    a.global = parse_global_algorithm(*g);
    if (!a.global) throw ConfigError(w + ".global: unknown algorithm '" + *g + "'");
  }
  if (auto l = get_opt<std::string>(j, "local", w)) {
    a.local = parse_local_algorithm(*l);
    if (!a.local) throw ConfigError(w + ".local: unknown algorithm '" + *l + "'");
  }
  if (j.contains("budget")) a.budget = parse_budget(j.at("budget"), w + ".budget");
  assign_opt(j, "local_tol", w, a.local_tol);
  assign_opt(j, "local_max_iter", w, a.local_max_iter);
  a.local_max_evals = get_opt<std::size_t>(j, "local_max_evals", w);
  a.id = j.contains("id") ? get<std::string>(j, "id", w) : default_id(a);
  try {
    a.validate();
  } catch (const Error& e) {
    throw ConfigError(w + ": " + e.what());
  }
  return a;
}

void parse_hyperparameters(const json& j, GlobalParams& gp) {
  const std::string w = "hyperparameters";
  check_keys(j, w, {"pso", "ga", "qga", "fwa"});
  if (j.contains("pso")) {
    const auto& p = j.at("pso");
    check_keys(p, w + ".pso", {"particles", "inertia", "c1", "c2", "initial_velocity"});
    assign_opt(p, "particles", w + ".pso", gp.pso.particles);
    assign_opt(p, "inertia", w + ".pso", gp.pso.inertia);
    assign_opt(p, "c1", w + ".pso", gp.pso.c1);
    assign_opt(p, "c2", w + ".pso", gp.pso.c2);
    assign_opt(p, "initial_velocity", w + ".pso", gp.pso.initial_velocity);
    gp.pso.validate();
  }
  if (j.contains("ga")) {
    const auto& p = j.at("ga");
    check_keys(p, w + ".ga", {"population", "crossover_rate", "mutation_rate", "bits_per_dim", "elite", "tournament"});
    assign_opt(p, "population", w + ".ga", gp.ga.population);
    assign_opt(p, "crossover_rate", w + ".ga", gp.ga.crossover_rate);
    gp.ga.mutation_rate = get_opt<double>(p, "mutation_rate", w + ".ga");
    assign_opt(p, "bits_per_dim", w + ".ga", gp.ga.bits_per_dim);
    assign_opt(p, "elite", w + ".ga", gp.ga.elite);
    assign_opt(p, "tournament", w + ".ga", gp.ga.tournament);
    gp.ga.validate();
  }
  if (j.contains("qga")) {
    const auto& p = j.at("qga");
    check_keys(p, w + ".qga", {"population", "theta", "ratio_cap", "best_floor", "bits_per_dim"});
    assign_opt(p, "population", w + ".qga", gp.qga.population);
    assign_opt(p, "theta", w + ".qga", gp.qga.theta);
    assign_opt(p, "ratio_cap", w + ".qga", gp.qga.ratio_cap);
    assign_opt(p, "best_floor", w + ".qga", gp.qga.best_floor);
    assign_opt(p, "bits_per_dim", w + ".qga", gp.qga.bits_per_dim);
    gp.qga.validate();
  }
  if (j.contains("fwa")) {
    const auto& p = j.at("fwa");
    check_keys(p, w + ".fwa", {"fireworks", "sparks", "amplitude", "gaussian_sparks", "min_sparks", "max_sparks_fraction"});
    assign_opt(p, "fireworks", w + ".fwa", gp.fwa.fireworks);
    assign_opt(p, "sparks", w + ".fwa", gp.fwa.sparks);
    assign_opt(p, "amplitude", w + ".fwa", gp.fwa.amplitude);
    assign_opt(p, "gaussian_sparks", w + ".fwa", gp.fwa.gaussian_sparks);
    assign_opt(p, "min_sparks", w + ".fwa", gp.fwa.min_sparks);
    assign_opt(p, "max_sparks_fraction", w + ".fwa", gp.fwa.max_sparks_fraction);
    gp.fwa.validate();
  }
}

}  // namespace

void AlgorithmSpec::validate() const {
  if (!global && !local) throw ConfigError("algorithm '" + id + "' has neither a global nor a local stage");
  if (global) budget.validate();
  if (!(local_tol > 0.0)) throw ConfigError("algorithm '" + id + "': local_tol must be positive");
  if (id.empty()) throw ConfigError("algorithm id is empty");
}

std::string default_id(const AlgorithmSpec& a) {
  if (a.is_hybrid()) {
    HybridConfig h;
    h.global_alg = *a.global;
    h.local_alg = *a.local;
    return h.label();
  }
  if (a.global) return to_string(*a.global);
  return to_string(*a.local);
}

AlgorithmSpec parse_algorithm_id(const std::string& id) {
  AlgorithmSpec a;
  std::string head = id;
  std::string tail;
  if (const auto dash = id.find('-'); dash != std::string::npos) {
    head = id.substr(0, dash);
    tail = id.substr(dash + 1);
  }
  if (auto g = parse_global_algorithm(head)) {
    a.global = g;
  } else if (head.size() > 1 && (head[0] == 'H' || head[0] == 'h') && parse_global_algorithm(head.substr(1))) {
    a.global = parse_global_algorithm(head.substr(1));
    a.local = tail.empty() ? std::optional(LocalAlgorithm::bfgs) : parse_local_algorithm(tail);
    if (!a.local) throw ConfigError("unknown local algorithm in '" + id + "'");
    tail.clear();
  } else if (auto l = parse_local_algorithm(id)) {
    a.local = l;
    tail.clear();
  } else {
    throw ConfigError("unknown algorithm '" + id + "'");
  }
  if (!tail.empty()) throw ConfigError("unknown algorithm '" + id + "'");
  a.id = default_id(a);
  return a;
}

std::vector<MeasurementSet> ProblemSpec::templates() const {
  const auto grid = FrequencyGrid::log_spaced(f_min_hz, f_max_hz, points);
  std::vector<MeasurementSet> out;
  for (const auto& s : spots) out.push_back({s, grid, std::vector<double>(grid.size(), 0.0), 0.0});
  return out;
}

FitProblem ProblemSpec::build_fdtr() const {
  if (is_benchmark()) throw ContractError("build_fdtr called on a benchmark problem");
  if (!files.empty()) {
    std::vector<MeasurementSet> sets;
    for (const auto& f : files) sets.push_back(read_measurement_csv(f.path, f.spot, noise_sigma_deg));
    return FitProblem(stack, binding, space, std::move(sets), quadrature);
  }
  FitProblem tmpl(stack, binding, space, templates(), quadrature);
  try {
    return tmpl.with_datasets(synthesize(tmpl, *truth, noise_sigma_deg, data_seed));
  } catch (const ContractError& e) {
    throw ConfigError(std::string("problem.data: ") + e.what());
  }
}

void CampaignConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (algorithms.empty()) throw ConfigError("algorithms: at least one entry is required");
  std::set<std::string> ids;
  for (const auto& a : algorithms) {
    a.validate();
    if (!ids.insert(a.id).second) throw ConfigError("algorithms: duplicate id '" + a.id + "'");
    if (a.local == LocalAlgorithm::trust_region && problem.benchmark == "Y") {
      throw ConfigError("algorithm '" + a.id + "': the Y benchmark has no residual form");
    }
  }
  if (histogram_bins < 1) throw ConfigError("histogram_bins must be at least 1");
  if (grid_points < 2) throw ConfigError("grid_points must be at least 2");
  if (success.relative_band && !(*success.relative_band > 0.0)) {
    throw ConfigError("success.relative_band must be positive");
  }
}

CampaignConfig parse_config(const std::string& text, const std::filesystem::path& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config", {"problem", "algorithms", "trials", "seed", "success", "output", "workers",
                           "hyperparameters", "traces", "histogram_bins", "grid_points", "sensitivity_step"});
  CampaignConfig c;
  if (!j.contains("problem")) throw ConfigError("config: missing 'problem'");
  c.problem = parse_problem(j.at("problem"), base);
  if (j.contains("algorithms")) {
    const auto& algs = j.at("algorithms");
    if (!algs.is_array()) throw ConfigError("algorithms: expected an array");
    for (std::size_t i = 0; i < algs.size(); ++i) {
      c.algorithms.push_back(parse_algorithm(algs[i], "algorithms[" + std::to_string(i) + "]"));
    }
  } else {
    c.algorithms.push_back(parse_algorithm_id("HPSO"));
  }
  assign_opt(j, "trials", "config", c.trials);
  assign_opt(j, "seed", "config", c.master_seed);
  assign_opt(j, "workers", "config", c.workers);
  assign_opt(j, "traces", "config", c.write_traces);
  assign_opt(j, "histogram_bins", "config", c.histogram_bins);
  assign_opt(j, "grid_points", "config", c.grid_points);
  assign_opt(j, "sensitivity_step", "config", c.sensitivity_step);
  if (auto out = get_opt<std::string>(j, "output", "config")) {
    c.out_dir = std::filesystem::path(*out).is_relative() ? base / *out : std::filesystem::path(*out);
  }
  if (j.contains("success")) {
    const auto& s = j.at("success");
    check_keys(s, "success", {"target_fitness", "relative_band"});
    c.success.target_fitness = get_opt<double>(s, "target_fitness", "success");
    c.success.relative_band = get_opt<double>(s, "relative_band", "success");
  }
  try {
    if (j.contains("hyperparameters")) parse_hyperparameters(j.at("hyperparameters"), c.params);
  } catch (const ContractError& e) {
    throw ConfigError(std::string("hyperparameters: ") + e.what());
  }
  c.validate();
  return c;
}

CampaignConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

CampaignConfig default_gan_si_config() {
  return parse_config(R"({"problem": {"preset": "gan_si"}, "algorithms": ["HPSO"]})");
}

}  // namespace fdtrfit

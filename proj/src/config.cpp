#include "hardyspec/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "hardyspec/error.hpp"

namespace hardyspec {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorKind::Validation, "config: " + what);
}

void allow_keys(const json& obj, const std::string& where, std::set<std::string> keys) {
  if (!obj.is_object()) invalid(where + " must be an object");
  for (const auto& [k, v] : obj.items())
    if (!keys.count(k)) invalid("unknown key '" + k + "' in " + where);
}

template <class T>
T get(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key) || obj[key].is_null()) return fallback;
  try {
    return obj[key].get<T>();
  } catch (const json::exception&) {
    invalid(std::string("bad type for '") + key + "'");
  }
}

void positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) invalid(std::string(what) + " must be positive");
}

}  // namespace

RunConfig parse_config(const json& j) {
  allow_keys(j, "config",
             {"model", "sectors", "basis", "mesh", "quadrature", "perturbation", "evolution",
              "lambdas", "beta_lambdas", "check", "output_dir", "seed", "fault_injection"});
  RunConfig c;
  if (!j.contains("model")) invalid("missing 'model'");
  const auto& m = j["model"];
  allow_keys(m, "model", {"N", "s", "mu", "mu_margin"});
  const int N = get<int>(m, "N", 3);
  const double s = get<double>(m, "s", 0.5);
  const double mu = get<double>(m, "mu", 0.0);
  std::optional<double> margin;
  if (m.contains("mu_margin") && !m["mu_margin"].is_null()) margin = get<double>(m, "mu_margin", 0.0);
  try {
    c.params = ModelParams::make(N, s, mu, margin);
  } catch (const Error& e) {
    invalid(e.what());
  }
  if (const auto report = validate_params(c.params); !report.accepted()) {
    std::string all;
    for (const auto& f : report.failures) all += (all.empty() ? "" : "; ") + f;
    invalid(all);
  }

  if (j.contains("sectors")) {
    if (!j["sectors"].is_array() || j["sectors"].empty()) invalid("'sectors' must be a nonempty list");
    c.sectors.clear();
    for (const auto& sec : j["sectors"]) {
      allow_keys(sec, "sectors[]", {"l", "modes"});
      SectorRequest r{get<int>(sec, "l", 0), get<int>(sec, "modes", 1)};
      if (r.l < 0 || r.modes < 1) invalid("sector needs l >= 0 and modes >= 1");
      c.sectors.push_back(r);
    }
  }
  if (j.contains("basis")) {
    allow_keys(j["basis"], "basis", {"n_max", "j_max"});
    c.n_max = get<int>(j["basis"], "n_max", c.n_max);
    c.j_max = get<int>(j["basis"], "j_max", c.j_max);
    if (c.n_max < 0 || c.j_max < 0) invalid("basis needs n_max >= 0 and j_max >= 0");
  }
  if (j.contains("mesh")) {
    allow_keys(j["mesh"], "mesh", {"elements", "grading", "levels"});
    c.elements = get<int>(j["mesh"], "elements", c.elements);
    c.levels = get<int>(j["mesh"], "levels", c.levels);
    if (j["mesh"].contains("grading") && !j["mesh"]["grading"].is_null()) {
      c.grading = get<double>(j["mesh"], "grading", 1.0);
      if (!(*c.grading >= 1.0)) invalid("mesh grading must be >= 1");
    }
    if (c.elements < 2) invalid("mesh needs at least 2 elements");
    if (c.levels < 1 || c.levels > 6) invalid("mesh levels must lie in [1, 6]");
  }
  c.quadrature_order = get<int>(j, "quadrature", c.quadrature_order);
  if (c.quadrature_order < 8 || c.quadrature_order > 200) invalid("quadrature order must lie in [8, 200]");

  if (j.contains("perturbation") && !j["perturbation"].is_null()) {
    const auto& p = j["perturbation"];
    allow_keys(p, "perturbation", {"A", "B", "epsilon", "b", "C_g"});
    PerturbationSpec h;
    h.amplitude_A = get<double>(p, "A", 0.0);
    h.amplitude_B = get<double>(p, "B", 0.0);
    h.epsilon = get<double>(p, "epsilon", h.epsilon);
    h.time_slope = get<double>(p, "b", 0.0);
    h.C_g = get<double>(p, "C_g", h.C_g);
    try {
      check_perturbation(h, c.params.s);
    } catch (const Error& e) {
      invalid(e.what());
    }
    c.pert = h;
  }

  if (j.contains("evolution") && !j["evolution"].is_null()) {
    const auto& e = j["evolution"];
    allow_keys(e, "evolution",
               {"t_start", "t_end", "rtol", "sample_ratio", "max_log_step", "initial", "spillover"});
    EvolutionBlock b;
    b.t_start = get<double>(e, "t_start", b.t_start);
    b.t_end = get<double>(e, "t_end", b.t_end);
    b.rtol = get<double>(e, "rtol", b.rtol);
    b.sample_ratio = get<double>(e, "sample_ratio", b.sample_ratio);
    b.max_log_step = get<double>(e, "max_log_step", b.max_log_step);
    b.spillover = get<bool>(e, "spillover", b.spillover);
    positive(b.t_start, "t_start");
    positive(b.t_end, "t_end");
    if (!(b.t_end < b.t_start)) invalid("t_end must be smaller than t_start");
    if (!(b.rtol > 1e-14 && b.rtol < 1e-3)) invalid("rtol must lie in (1e-14, 1e-3)");
    if (!(b.sample_ratio > 1.0)) invalid("sample_ratio must exceed 1");
    positive(b.max_log_step, "max_log_step");
    if (e.contains("initial")) {
      const auto& init = e["initial"];
      allow_keys(init, "evolution.initial", {"coefficients", "seed"});
      if (init.contains("seed")) b.initial_seed = get<std::uint64_t>(init, "seed", 0);
      if (init.contains("coefficients")) {
        if (!init["coefficients"].is_array()) invalid("initial coefficients must be a list");
        for (const auto& x : init["coefficients"]) {
          allow_keys(x, "initial coefficient", {"n", "j", "value"});
          InitialCoefficient ic{get<int>(x, "n", 0), get<int>(x, "j", 1), get<double>(x, "value", 0.0)};
          if (!std::isfinite(ic.value)) invalid("initial coefficient must be finite");
          b.coefficients.push_back(ic);
        }
      }
    }
    c.evolution = b;
  }

  auto real_list = [&](const char* key) {
    std::vector<double> out;
    if (!j.contains(key)) return out;
    if (!j[key].is_array()) invalid(std::string("'") + key + "' must be a list");
    for (const auto& v : j[key]) {
      if (!v.is_number()) invalid(std::string("'") + key + "' entries must be numbers");
      out.push_back(v.get<double>());
      positive(out.back(), key);
    }
    return out;
  };
  c.lambdas = real_list("lambdas");
  c.beta_lambdas = real_list("beta_lambdas");
  if (j.contains("check")) {
    allow_keys(j["check"], "check", {"samples"});
    c.check_samples = get<int>(j["check"], "samples", c.check_samples);
    if (c.check_samples < 1) invalid("check samples must be >= 1");
  }
  c.output_dir = get<std::string>(j, "output_dir", c.output_dir);
  c.seed = get<std::uint64_t>(j, "seed", c.seed);
  if (j.contains("fault_injection")) {
    allow_keys(j["fault_injection"], "fault_injection", {"norm_const_scale"});
    c.norm_const_scale = get<double>(j["fault_injection"], "norm_const_scale", 1.0);
    positive(c.norm_const_scale, "norm_const_scale");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    invalid(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json j;
  j["model"] = {{"N", c.params.N}, {"s", c.params.s}, {"mu", c.params.mu}, {"mu_margin", c.params.mu_margin}};
  j["sectors"] = json::array();
  for (const auto& s : c.sectors) j["sectors"].push_back({{"l", s.l}, {"modes", s.modes}});
  j["basis"] = {{"n_max", c.n_max}, {"j_max", c.j_max}};
  j["mesh"] = {{"elements", c.elements}, {"levels", c.levels}};
  if (c.grading) j["mesh"]["grading"] = *c.grading;
  j["quadrature"] = c.quadrature_order;
  if (c.pert)
    j["perturbation"] = {{"A", c.pert->amplitude_A}, {"B", c.pert->amplitude_B},
                         {"epsilon", c.pert->epsilon}, {"b", c.pert->time_slope}, {"C_g", c.pert->C_g}};
  else
    j["perturbation"] = nullptr;
  if (c.evolution) {
    const auto& e = *c.evolution;
    j["evolution"] = {{"t_start", e.t_start}, {"t_end", e.t_end}, {"rtol", e.rtol},
                      {"sample_ratio", e.sample_ratio}, {"max_log_step", e.max_log_step},
                      {"spillover", e.spillover}};
    json init = json::object();
    if (!e.coefficients.empty()) {
      init["coefficients"] = json::array();
      for (const auto& x : e.coefficients)
        init["coefficients"].push_back({{"n", x.n}, {"j", x.j}, {"value", x.value}});
    }
    if (e.initial_seed) init["seed"] = *e.initial_seed;
    j["evolution"]["initial"] = init;
  }
  j["lambdas"] = c.lambdas;
  j["beta_lambdas"] = c.beta_lambdas;
  j["check"] = {{"samples", c.check_samples}};
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  if (c.norm_const_scale != 1.0) j["fault_injection"] = {{"norm_const_scale", c.norm_const_scale}};
  return j;
}

}  // namespace hardyspec

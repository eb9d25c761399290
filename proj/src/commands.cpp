#include "hardyspec/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "hardyspec/error.hpp"
#include "hardyspec/forms.hpp"
#include "hardyspec/kernels.hpp"

namespace hardyspec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kTimeConvention =
    "backward time: the singular point is t -> 0+, evolution runs from t_start down to t_end";

// Errors raised while evolving are reported as evolution failures unless they
// are configuration problems.
template <class F>
auto evolution_stage(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Validation || e.kind() == ErrorKind::Evolution) throw;
    throw Error(ErrorKind::Evolution, e.what());
  }
}

template <class F>
auto spectral_stage(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Validation) throw;
    throw Error(ErrorKind::Convergence, e.what());
  }
}

json element_json(const OUBasisElement& e) {
  return {{"n", e.n},         {"j", e.j},         {"l", e.l},
          {"nu", e.nu},       {"alpha", e.alpha}, {"a", e.a},
          {"gamma", e.gamma}, {"norm_const", e.norm_const}, {"equator_trace", e.equator_trace}};
}

void write_json(const fs::path& path, const json& j) { write_atomic(path, j.dump(2) + "\n"); }

const EvolutionBlock& evolution_block(const RunConfig& config) {
  if (!config.evolution) throw Error(ErrorKind::Validation, "config: missing 'evolution' block");
  return *config.evolution;
}

struct EvolutionRun {
  Pipeline pipeline;
  EvolutionConfig config;
  std::unique_ptr<CouplingOperator> coupling;
  EvolutionResult result;
  FrequencyLimit limit;
};

EvolutionRun run_evolution(const RunConfig& config) {
  EvolutionRun run;
  run.pipeline = build_pipeline(config);
  run.config = make_evolution_config(config, run.pipeline);
  evolution_stage([&] {
    run.coupling = std::make_unique<CouplingOperator>(*run.pipeline.table, run.config.pert,
                                                      run.config.quadrature_order);
    run.result = evolve(run.config, *run.coupling);
    run.limit = frequency_limit(run.result.trace, *run.pipeline.table);
    return 0;
  });
  return run;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Validation, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorKind::Validation, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

Pipeline build_pipeline(const RunConfig& config, int n_max_extra) {
  return spectral_stage([&] {
    Pipeline p;
    p.angular = std::make_shared<AngularSpectrum>(solve_angular_spectrum(
        config.params, config.sectors, config.elements, config.levels, config.grading));
    auto table = build_spectrum(p.angular, config.n_max + n_max_extra, config.j_max);
    if (config.norm_const_scale != 1.0)
      for (auto& e : table.elements) e.norm_const *= config.norm_const_scale;
    p.table = std::make_shared<const SpectrumTable>(std::move(table));
    return p;
  });
}

EvolutionConfig make_evolution_config(const RunConfig& config, const Pipeline& pipeline) {
  const auto& block = evolution_block(config);
  const auto& table = *pipeline.table;
  EvolutionConfig ec;
  ec.params = config.params;
  ec.table = pipeline.table;
  ec.pert = config.pert;
  ec.t_start = block.t_start;
  ec.t_end = block.t_end;
  ec.control = {block.rtol, block.max_log_step, block.sample_ratio};
  ec.quadrature_order = config.quadrature_order;
  ec.initial = Eigen::VectorXd::Zero(table.size());
  if (block.coefficients.empty()) {
    std::mt19937_64 rng(block.initial_seed.value_or(config.seed));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < ec.initial.size(); ++i) ec.initial[i] = normal(rng);
  } else {
    for (const auto& c : block.coefficients) {
      const int idx = table.find(c.n, c.j);
      if (idx < 0)
        throw Error(ErrorKind::Validation, "config: initial coefficient (n=" + std::to_string(c.n) +
                                               ", j=" + std::to_string(c.j) + ") is not in the basis");
      ec.initial[idx] = c.value;
    }
  }
  validate_evolution_config(ec);
  return ec;
}

int cmd_spectrum(const RunConfig& config) {
  const auto pipeline = build_pipeline(config);
  const auto& table = *pipeline.table;
  const fs::path dir = config.output_dir;

  std::ostringstream csv;
  csv << "n,j,l,nu,alpha,gamma,group,equator_trace\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& e = table.elements[i];
    csv << e.n << ',' << e.j << ',' << e.l << ',' << format_number(e.nu) << ','
        << format_number(e.alpha) << ',' << format_number(e.gamma) << ','
        << table.group_of(static_cast<int>(i)) << ',' << format_number(e.equator_trace) << '\n';
  }
  write_atomic(dir / "spectrum.csv", csv.str());

  json j;
  j["model"] = {{"N", config.params.N}, {"s", config.params.s}, {"mu", config.params.mu},
                {"kappa_s", config.params.kappa_s}, {"lambda_Ns", config.params.lambda_Ns},
                {"hardy_bound", config.params.hardy_bound()}};
  j["angular"] = json::array();
  for (std::size_t k = 0; k < pipeline.angular->ranking.size(); ++k) {
    const auto& m = pipeline.angular->ranked(k);
    j["angular"].push_back({{"k", k + 1},
                            {"l", m.l},
                            {"nu", m.nu},
                            {"nu_error", m.nu_error},
                            {"equator_trace", m.equator_trace},
                            {"harmonic_multiplicity", harmonic_multiplicity(config.params.N, m.l)}});
  }
  j["elements"] = json::array();
  for (const auto& e : table.elements) j["elements"].push_back(element_json(e));
  j["groups"] = json::array();
  for (std::size_t g = 0; g < table.groups.size(); ++g)
    j["groups"].push_back({{"gamma", table.group_gamma[g]}, {"members", table.groups[g]}});
  write_json(dir / "basis.json", j);
  return kExitOk;
}

int cmd_evolve(const RunConfig& config) {
  evolution_block(config);
  const auto run = run_evolution(config);
  const auto& table = *run.pipeline.table;
  const auto& trace = run.result.trace;
  const fs::path dir = config.output_dir;

  std::ostringstream csv;
  csv << "t,H,D,N\n";
  for (const auto& s : trace.samples)
    csv << format_number(s.t) << ',' << format_number(s.H) << ',' << format_number(s.D) << ','
        << format_number(s.N) << '\n';
  write_atomic(dir / "trace.csv", csv.str());

  json states;
  states["time_convention"] = kTimeConvention;
  states["elements"] = json::array();
  for (const auto& e : table.elements)
    states["elements"].push_back({{"n", e.n}, {"j", e.j}, {"gamma", e.gamma}});
  states["states"] = json::array();
  for (const auto& s : run.result.states) {
    std::vector<double> c(s.coeffs.data(), s.coeffs.data() + s.coeffs.size());
    states["states"].push_back({{"t", s.t}, {"coeffs", c}});
  }
  write_json(dir / "states.json", states);

  const double t_end = trace.samples.back().t;
  const double t_hi = std::min(100.0 * t_end, trace.samples.front().t);
  json summary;
  summary["time_convention"] = kTimeConvention;
  summary["accepted_steps"] = run.result.accepted_steps;
  summary["rejected_steps"] = run.result.rejected_steps;
  summary["samples"] = trace.samples.size();
  summary["lower_bound_violations"] = trace.lower_bound_violations;
  summary["h_prime_defect"] = verify_h_prime(trace);
  const auto& L = run.limit;
  summary["frequency_limit"] = {{"gamma_limit", L.gamma_limit},
                                {"final_N", L.final_N},
                                {"extrapolated", L.extrapolated},
                                {"cauchy_variation", L.cauchy_variation},
                                {"cauchy_ok", L.cauchy_ok},
                                {"nearest_gamma", L.nearest_gamma},
                                {"nearest_group", L.nearest_group},
                                {"distance", L.distance}};
  if (!L.cauchy_ok)
    std::cerr << "warning: N varies by " << L.cauchy_variation << " over the last decade\n";
  try {
    const auto fit = fit_vanishing_order(trace, t_end, t_hi);
    summary["vanishing_order"] = {{"gamma_fit", fit.gamma_fit}, {"residual", fit.residual},
                                  {"ratio", fit.ratio},         {"t_lo", t_end},
                                  {"t_hi", t_hi}};
  } catch (const Error& e) {
    summary["vanishing_order"] = {{"error", e.what()}};
  }
  if (config.evolution->spillover) {
    const auto enriched = build_pipeline(config, 2);
    auto ec = run.config;
    ec.table = enriched.table;
    ec.initial = Eigen::VectorXd::Zero(enriched.table->size());
    for (std::size_t i = 0; i < table.size(); ++i)
      ec.initial[enriched.table->find(table.elements[i].n, table.elements[i].j)] = run.config.initial[i];
    const auto lim = evolution_stage([&] {
      return frequency_limit(evolve(ec).trace, *enriched.table);
    });
    summary["spillover"] = {{"n_max", config.n_max + 2},
                            {"gamma_limit", lim.gamma_limit},
                            {"difference", std::abs(lim.gamma_limit - L.gamma_limit)}};
  }
  write_json(dir / "summary.json", summary);
  return kExitOk;
}

int cmd_blowup(const RunConfig& config) {
  const auto& block = evolution_block(config);
  if (config.lambdas.empty()) throw Error(ErrorKind::Validation, "config: 'lambdas' must be nonempty");
  std::vector<double> Lambdas = config.beta_lambdas;
  if (Lambdas.empty())
    for (double f : {0.8, 0.4, 0.2, 0.1}) Lambdas.push_back(f * std::sqrt(block.t_start));
  const auto run = run_evolution(config);
  const auto& table = *run.pipeline.table;
  const fs::path dir = config.output_dir;

  std::vector<BetaResult> betas;
  evolution_stage([&] {
    for (double L : Lambdas)
      betas.push_back(beta_coefficients(run.result, run.config, *run.coupling, run.limit, L));
    return 0;
  });

  json j;
  j["time_convention"] = kTimeConvention;
  j["gamma"] = betas.front().gamma;
  j["gamma_limit"] = run.limit.gamma_limit;
  j["elements"] = json::array();
  for (int i : betas.front().elements)
    j["elements"].push_back({{"n", table.elements[i].n}, {"j", table.elements[i].j}});
  j["grid"] = json::array();
  double spread = 0.0, largest = 0.0;
  for (const auto& b : betas) {
    j["grid"].push_back({{"Lambda", b.Lambda}, {"beta", b.beta}, {"tail", b.tail}});
    for (double v : b.beta) largest = std::max(largest, std::abs(v));
  }
  for (std::size_t i = 0; i < betas.front().beta.size(); ++i) {
    double lo = betas.front().beta[i], hi = lo;
    for (const auto& b : betas) {
      lo = std::min(lo, b.beta[i]);
      hi = std::max(hi, b.beta[i]);
    }
    spread = std::max(spread, hi - lo);
  }
  j["relative_spread"] = largest > 0.0 ? spread / largest : 0.0;
  j["nonzero"] = largest > 0.0;
  write_json(dir / "beta.json", j);

  const auto forms = spectral_stage([&] { return assemble_forms(table, config.quadrature_order); });
  const auto tau = default_tau_grid();
  std::ostringstream csv;
  csv << "lambda,err_L,err_H\n";
  evolution_stage([&] {
    for (double lambda : config.lambdas) {
      const auto e = blowup_profile_error(run.result, betas.front(), forms.h_gram(), lambda, tau);
      csv << format_number(lambda) << ',' << format_number(e.err_L) << ','
          << format_number(e.err_H) << '\n';
    }
    return 0;
  });
  write_atomic(dir / "profile_errors.csv", csv.str());
  return kExitOk;
}

int cmd_check(const RunConfig& config) {
  const auto pipeline = build_pipeline(config);
  const auto& table = *pipeline.table;
  const auto& params = config.params;
  json items = json::array();
  std::vector<std::string> failed;
  auto item = [&](const std::string& name, double value, double threshold, bool pass) {
    items.push_back({{"name", name}, {"value", value}, {"threshold", threshold}, {"passed", pass}});
    if (!pass) failed.push_back(name);
  };

  const double floor = -params.half_gap() * params.half_gap();
  item("first_eigenvalue_bound", pipeline.angular->ranked(0).nu, floor,
       pipeline.angular->ranked(0).nu > floor);

  const auto forms = spectral_stage([&] { return assemble_forms(table, config.quadrature_order); });
  const auto gram = gram_check(forms.mass, table);
  item("gram_check", gram.max_deviation, 1e-8, gram.max_deviation <= 1e-8);
  const double norm = normalization_check(table, config.quadrature_order);
  item("normalization_check", norm, 1e-10, norm <= 1e-10);

  std::vector<SeparableFunction> tests;
  for (std::size_t i = 0; i < table.size(); ++i) tests.push_back(as_separable(table, i));
  double worst = 0.0, worst_budget = 0.0;
  bool residual_ok = true;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto r = eigen_residual_check(table, i, tests, config.quadrature_order);
    if (r.max_residual / r.budget > (worst_budget > 0 ? worst / worst_budget : 0.0)) {
      worst = r.max_residual;
      worst_budget = r.budget;
    }
    residual_ok = residual_ok && r.within_budget();
  }
  item("eigen_residual", worst, worst_budget, residual_ok);

  double coercivity = 0.0;
  bool coercive = true;
  try {
    coercivity = coercivity_estimate(forms, params);
  } catch (const Error&) {
    coercive = false;
  }
  item("coercivity", coercivity, 0.0, coercive);

  const auto family = random_combinations(table.size(), config.check_samples, config.seed);
  const auto report = [&](const InequalityReport& r, double value) {
    item(r.name, value, -1e-9, r.holds);
  };
  const auto hext = hardy_extended_check(forms, params, family);
  report(hext, hext.min_relative_slack);
  const auto hfrac = hardy_frac_check(forms, params, family);
  report(hfrac, hfrac.min_relative_slack);
  const auto trace = trace_constant_estimate(forms, family);
  item("trace_constant", trace.sup_ratio, 0.0, trace.holds);
  const auto sphere = sphere_trace_check(*pipeline.angular, config.check_samples, config.seed);
  report(sphere, sphere.min_relative_slack);

  RunConfig with_evolution = config;
  if (!with_evolution.evolution) with_evolution.evolution = EvolutionBlock{};
  with_evolution.evolution->spillover = false;
  const auto ec = make_evolution_config(with_evolution, pipeline);
  const auto result = evolution_stage([&] { return evolve(ec); });
  const double defect = verify_h_prime(result.trace);
  const double budget = config.pert ? 1e-5 : 1e-6;
  item("h_prime", defect, budget, defect <= budget);
  item("frequency_lower_bound", static_cast<double>(result.trace.lower_bound_violations), 0.0,
       result.trace.lower_bound_violations == 0);

  json out;
  out["passed"] = failed.empty();
  out["failed"] = failed;
  out["items"] = items;
  write_json(fs::path(config.output_dir) / "report.json", out);
  if (failed.empty()) return kExitOk;
  std::cerr << "check failed:";
  for (const auto& f : failed) std::cerr << ' ' << f;
  std::cerr << '\n';
  return kExitPropertyFailure;
}

int run_command(const std::string& name, const CommandOptions& options) {
  try {
    set_thread_count(options.jobs);
    auto config = load_config(options.config);
    if (options.output) config.output_dir = options.output->string();
    if (options.seed) config.seed = *options.seed;
    if (name == "spectrum") return cmd_spectrum(config);
    if (name == "evolve") return cmd_evolve(config);
    if (name == "blowup") return cmd_blowup(config);
    if (name == "check") return cmd_check(config);
    std::cerr << "error: unknown command '" << name << "'\n";
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::Validation:
      case ErrorKind::Parameter:
        return kExitValidation;
      case ErrorKind::Evolution:
        return kExitEvolution;
      default:
        return kExitSpectral;
    }
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error [io]: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSpectral;
  }
}

}  // namespace hardyspec

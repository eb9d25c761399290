#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "hardyspec/error.hpp"
#include "hardyspec/evolution.hpp"
#include "hardyspec/forms.hpp"
#include "hardyspec/quadrature.hpp"

using namespace hardyspec;
using doctest::Approx;

namespace {

const ModelParams p0 = ModelParams::make(3, 0.5, 0.0);

// Decoupled table carrying only the exponents; enough for unperturbed runs.
std::shared_ptr<const SpectrumTable> synthetic(std::vector<double> gammas) {
  auto t = std::make_shared<SpectrumTable>();
  t->params = p0;
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    OUBasisElement e;
    e.n = static_cast<int>(i);
    e.gamma = gammas[i];
    t->elements.push_back(e);
    t->groups.push_back({static_cast<int>(i)});
    t->group_gamma.push_back(gammas[i]);
  }
  return t;
}

std::shared_ptr<const SpectrumTable> real_table(int n_max = 4) {
  const std::vector<SectorRequest> req{{0, 2}, {1, 2}};
  auto ang = std::make_shared<AngularSpectrum>(solve_angular_spectrum(p0, req, 400, 3));
  return std::make_shared<const SpectrumTable>(build_spectrum(ang, n_max, 4));
}

EvolutionConfig config_for(std::shared_ptr<const SpectrumTable> table, Eigen::VectorXd c0, double t_end) {
  EvolutionConfig c;
  c.params = p0;
  c.table = std::move(table);
  c.initial = std::move(c0);
  c.t_end = t_end;
  return c;
}

}  // namespace

TEST_CASE("height, energy and frequency") {
  const std::vector<double> g{0.5, 1.5};
  SpectralState st{0.25, Eigen::Vector2d(1.0, 0.0)};
  const Eigen::MatrixXd M0 = Eigen::MatrixXd::Zero(2, 2);
  CHECK(height(st) == 1.0);
  CHECK(st.t * dirichlet(st, M0, g) == Approx(0.5));
  CHECK(frequency(st, M0, g) == Approx(0.5));
  st.coeffs = Eigen::Vector2d(1.0, 1.0);
  CHECK(frequency(st, M0, g) == Approx(1.0));
  const Eigen::Matrix2d M{{0.1, 0.0}, {0.0, 0.0}};
  CHECK(frequency(st, M, g) == Approx(0.95));
  st.coeffs.setZero();
  CHECK_THROWS_AS(frequency(st, M0, g), Error);
}

TEST_CASE("config validation") {
  auto c = config_for(synthetic({0.5}), Eigen::VectorXd::Ones(1), 1e-3);
  CHECK_NOTHROW(validate_evolution_config(c));
  auto bad = c;
  bad.t_end = 2.0;
  CHECK_THROWS_AS(validate_evolution_config(bad), Error);
  bad = c;
  bad.control.rtol = 1e-15;
  CHECK_THROWS_AS(validate_evolution_config(bad), Error);
  bad = c;
  bad.initial = Eigen::VectorXd::Ones(2);
  CHECK_THROWS_AS(validate_evolution_config(bad), Error);
}

TEST_CASE("single decoupled mode") {
  const auto c = config_for(synthetic({0.75}), Eigen::VectorXd::Constant(1, 2.0), 1e-4);
  const auto run = evolve(c);
  double worst = 0.0;
  for (const auto& st : run.states)
    worst = std::max(worst, std::abs(st.coeffs[0] / (2.0 * std::pow(st.t, 0.75)) - 1.0));
  CHECK(worst <= 1e-9);
  for (const auto& s : run.trace.samples) CHECK(s.N == Approx(0.75).epsilon(1e-12));
  CHECK(verify_h_prime(run.trace) <= 1e-6);
  const auto fit = fit_vanishing_order(run.trace, 1e-4, 1.0);
  CHECK(fit.gamma_fit == Approx(0.75).epsilon(1e-8));
  CHECK(fit.ratio <= 1.0 + 1e-6);
  CHECK(run.trace.samples.front().t == 1.0);
  CHECK(run.trace.samples.back().t == Approx(1e-4).epsilon(1e-14));
  CHECK(std::abs(std::log(run.trace.samples[1].t) + std::log(1.01)) < 1e-12);
}

TEST_CASE("two decoupled modes") {
  const auto c = config_for(synthetic({0.5, 1.5}), Eigen::Vector2d(1.0, 1.0), 1e-4);
  const auto run = evolve(c);
  const auto near = std::min_element(run.trace.samples.begin(), run.trace.samples.end(),
                                     [](const auto& a, const auto& b) {
                                       return std::abs(std::log(a.t / 0.01)) < std::abs(std::log(b.t / 0.01));
                                     });
  const double t = near->t;
  CHECK(near->N == Approx((0.5 * t + 1.5 * t * t * t) / (t + t * t * t)).epsilon(1e-9));
  const auto exact = std::find_if(run.trace.samples.begin(), run.trace.samples.end(),
                                  [](const auto& s) { return std::abs(s.t - 0.01) < 1e-9; });
  if (exact != run.trace.samples.end()) CHECK(exact->N == Approx(0.5000999900009999).epsilon(1e-9));
  CHECK(verify_h_prime(run.trace) <= 1e-6);
  for (std::size_t k = 1; k < run.trace.samples.size(); ++k)
    CHECK(run.trace.samples[k - 1].N - run.trace.samples[k].N >= -1e-9);
  const auto fit = fit_vanishing_order(run.trace, 1e-4, 1e-3);
  CHECK(fit.gamma_fit == Approx(0.5).epsilon(1e-3));
  const auto L = frequency_limit(run.trace, *c.table);
  CHECK(L.nearest_gamma == 0.5);
  CHECK(L.distance <= 1e-6);

  const auto orth = evolve(config_for(synthetic({0.5, 1.5}), Eigen::Vector2d(0.0, 1.0), 1e-4));
  CHECK(frequency_limit(orth.trace, *c.table).nearest_gamma == 1.5);
  CHECK_THROWS_AS(fit_vanishing_order(run.trace, 0.5, 0.501), Error);
}

TEST_CASE("coupling matrix") {
  const auto table = real_table(2);
  CHECK(CouplingOperator(*table, std::nullopt)(0.3).norm() == 0.0);

  // B term for the constant element against a graded radial quadrature
  PerturbationSpec h;
  h.amplitude_B = 0.7;
  const double t = 0.37;
  const auto M = coupling_matrix(*table, h, t);
  const auto& e0 = table->elements[0];
  const double f0 = table->mode(e0).f_values[0];
  const double S = sphere_area(3);
  const double oracle = trace_gaussian_integral(
      [&](double r) {
        const double y = eval_radial(e0, r) * f0;
        return std::sqrt(t) * perturbation_eval(h, 0.5, std::sqrt(t) * r, t) * y * y / S;
      },
      p0, 2.0 - 2.0 * e0.alpha);
  CHECK(M(0, 0) == Approx(oracle).epsilon(1e-8));
  CHECK((M - M.transpose()).norm() == 0.0);

  // singular term, off-diagonal pair in the l = 0 sector
  PerturbationSpec a;
  a.amplitude_A = 0.1;
  a.epsilon = 0.5;
  a.time_slope = 0.4;
  const auto Ma = coupling_matrix(*table, a, t);
  const int i = table->find(1, 3);
  const auto& ei = table->elements[i];
  const double fi = table->mode(ei).f_values[0];
  const double oracle_a = trace_gaussian_integral(
      [&](double r) {
        return std::sqrt(t) * perturbation_eval(a, 0.5, std::sqrt(t) * r, t) * eval_radial(e0, r) * f0 *
               eval_radial(ei, r) * fi / S;
      },
      p0, 2.0 - e0.alpha - ei.alpha - 1.0 + 0.5);
  CHECK(Ma(0, i) == Approx(oracle_a).epsilon(1e-8));
  // different sectors never couple
  CHECK(Ma(0, table->find(0, 2)) == 0.0);

  const CouplingOperator op(*table, a);
  CHECK((op.evaluate_serial(t).array() == op.evaluate_parallel(t).array()).all());
  CHECK(op.decay_exponent() == 0.25);

  // |M_ab| <= C (t^s + t^{eps/2}) ||Y_a||_H ||Y_b||_H with one constant over a time grid
  const auto forms = assemble_forms(*table);
  const auto hg = forms.h_gram();
  PerturbationSpec bounded;
  bounded.amplitude_B = 1.0;
  bounded.epsilon = 0.5;
  double cmax = 0.0, cmin = 1e300;
  for (double tt : {1e-6, 1e-4, 1e-2, 1.0}) {
    const auto Mb = coupling_matrix(*table, bounded, tt);
    double c = 0.0;
    for (Eigen::Index x = 0; x < Mb.rows(); ++x)
      for (Eigen::Index y = 0; y < Mb.cols(); ++y)
        c = std::max(c, std::abs(Mb(x, y)) / ((std::sqrt(tt) + std::pow(tt, 0.25)) *
                                             std::sqrt(hg(x, x) * hg(y, y))));
    cmax = std::max(cmax, c);
    cmin = std::min(cmin, c);
  }
  CHECK(std::isfinite(cmax));
  CHECK(cmax < 10.0);
}

TEST_CASE("perturbed evolution") {
  const auto table = real_table(4);
  std::mt19937_64 rng(20221210);
  std::normal_distribution<double> normal;
  Eigen::VectorXd c0(table->size());
  for (auto i = 0; i < c0.size(); ++i) c0[i] = normal(rng);

  auto c = config_for(table, c0, 1e-3);
  const auto free_run = evolve(c);
  PerturbationSpec h;
  h.amplitude_A = 1e-3;
  h.epsilon = 0.5;
  c.pert = h;
  const auto small = evolve(c);
  h.amplitude_A = 5e-4;
  c.pert = h;
  const auto half = evolve(c);
  const double d1 = (small.states.back().coeffs - free_run.states.back().coeffs).norm() /
                    free_run.states.back().coeffs.norm();
  const double d2 = (half.states.back().coeffs - free_run.states.back().coeffs).norm() /
                    free_run.states.back().coeffs.norm();
  CHECK(d1 < 1e-2);
  CHECK(d1 > 1e-5);
  CHECK(d1 / d2 == Approx(2.0).epsilon(0.01));

  h.amplitude_A = 0.1;
  c.pert = h;
  c.t_end = 1e-6;
  const auto run = evolve(c);
  CHECK(verify_h_prime(run.trace) <= 1e-5);
  CHECK(run.trace.lower_bound_violations == 0);
  for (const auto& s : run.trace.samples) CHECK(s.H > 0.0);

  // energy identity at stored states
  const CouplingOperator op(*table, h);
  const auto g = table->gammas();
  for (std::size_t k = 0; k < run.states.size(); k += 97) {
    const auto& st = run.states[k];
    const auto M = op(st.t);
    double td = -st.coeffs.dot(M * st.coeffs);
    for (std::size_t i = 0; i < g.size(); ++i) td += g[i] * st.coeffs[i] * st.coeffs[i];
    CHECK(st.t * run.trace.samples[k].D == Approx(td).epsilon(1e-12).scale(std::abs(td) + 1e-300));
  }
}

TEST_CASE("state interpolation and beta") {
  const auto table = synthetic({0.5, 1.5});
  const auto c = config_for(table, Eigen::Vector2d(2.0, -1.0), 1e-4);
  const auto run = evolve(c);
  const double t = 0.0123456;
  const auto v = state_at(run, t);
  CHECK(v[0] == Approx(2.0 * std::pow(t, 0.5)).epsilon(1e-9));
  CHECK(v[1] == Approx(-std::pow(t, 1.5)).epsilon(1e-9));
  CHECK_THROWS_AS(state_at(run, 1e-5), Error);

  const auto L = frequency_limit(run.trace, *table);
  const CouplingOperator none(*table, std::nullopt);
  for (double Lambda : {0.9, 0.5, 0.1, 0.02}) {
    const auto b = beta_coefficients(run, c, none, L, Lambda);
    REQUIRE(b.beta.size() == 1);
    CHECK(b.beta[0] == Approx(2.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(beta_coefficients(run, c, none, L, 1e-3), Error);

  // errors come from the gamma = 1.5 mode only: lambda^2 * sup tau^1.5 and the H integral
  const auto b = beta_coefficients(run, c, none, L, 0.5);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  const auto grid = default_tau_grid();
  const auto e1 = blowup_profile_error(run, b, I, 0.1, grid);
  const auto e2 = blowup_profile_error(run, b, I, 0.05, grid);
  CHECK(e1.err_L == Approx(0.01).epsilon(1e-8));
  CHECK(e1.err_H == Approx(0.01 * std::sqrt((1.0 - 1e-4) / 4.0)).epsilon(1e-6));
  CHECK(e1.err_L / e2.err_L == Approx(4.0).epsilon(1e-8));
}

TEST_CASE("backward uniqueness") {
  const auto table = real_table(3);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  Eigen::VectorXd c0(table->size());
  for (auto i = 0; i < c0.size(); ++i) c0[i] = normal(rng);
  auto c = config_for(table, c0, 1e-4);
  PerturbationSpec h;
  h.amplitude_A = 0.1;
  h.epsilon = 0.5;
  c.pert = h;
  const auto r = backward_uniqueness_check(c);
  CHECK(r.positive);
  CHECK(r.zero_stays_zero);
  CHECK(r.min_H > 0.0);
}

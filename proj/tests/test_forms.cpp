#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "hardyspec/error.hpp"
#include "hardyspec/forms.hpp"
#include "hardyspec/kernels.hpp"

using namespace hardyspec;
using doctest::Approx;

namespace {

const ModelParams p0 = ModelParams::make(3, 0.5, 0.0);

SpectrumTable make_table(const ModelParams& p, int n_max = 6) {
  const std::vector<SectorRequest> req{{0, 2}, {1, 2}};
  auto ang = std::make_shared<AngularSpectrum>(solve_angular_spectrum(p, req, 400, 3));
  return build_spectrum(ang, n_max, 4);
}

}  // namespace

TEST_CASE("parallel kernels match the serial reference bitwise") {
  const auto entry = [](std::size_t a, std::size_t b) { return std::sin(1.0 + a) * std::cos(0.5 * b) + a * b; };
  const auto s = assemble_symmetric_serial(37, entry);
  const auto p = assemble_symmetric_parallel(37, entry);
  CHECK((s.array() == p.array()).all());
  CHECK((s - s.transpose()).norm() == 0.0);
  const auto f = [](std::size_t i) { return std::exp(-0.1 * i); };
  CHECK(evaluate_family_serial(101, f) == evaluate_family_parallel(101, f));
  CHECK_THROWS_AS(assemble_symmetric_parallel(5, [](std::size_t, std::size_t) -> double {
                    throw Error(ErrorKind::Domain, "boom");
                  }),
                  Error);

  const auto table = make_table(p0, 3);
  const auto fs = assemble_forms(table, 64, Execution::Serial);
  const auto fp = assemble_forms(table, 64, Execution::Parallel);
  CHECK((fs.mass.array() == fp.mass.array()).all());
  CHECK((fs.gradient.array() == fp.gradient.array()).all());
  CHECK((fs.trace_hardy.array() == fp.trace_hardy.array()).all());
}

TEST_CASE("gram and normalization") {
  const auto table = make_table(p0);
  const auto forms = assemble_forms(table);
  const auto g = gram_check(forms.mass, table);
  CHECK(g.max_deviation <= 1e-8);
  CHECK(g.max_diagonal_error <= 1e-10);
  CHECK(g.max_cross_sector <= 1e-12);
  CHECK(normalization_check(table) <= 1e-10);
  // B(Y, Y) = gamma on the normalized eigenbasis, up to the angular mesh error
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& e = table.elements[i];
    CHECK(std::abs(forms.gradient(i, i) - p0.mu * forms.trace_hardy(i, i) - e.gamma) <= 1e-8 + e.nu_error);
  }
}

TEST_CASE("weak eigen residual") {
  for (double frac : {0.0, 0.5}) {
    const auto p = ModelParams::make(3, 0.5, frac * p0.hardy_bound());
    const auto table = make_table(p, 4);
    std::vector<SeparableFunction> tests;
    for (std::size_t i = 0; i < table.size(); ++i) tests.push_back(as_separable(table, i));
    for (std::size_t i = 0; i < table.size(); ++i) {
      const auto r = eigen_residual_check(table, i, tests);
      CHECK(r.within_budget());
    }
  }
}

TEST_CASE("coercivity") {
  std::vector<double> est;
  for (double frac : {0.0, 0.5, 0.9}) {
    const auto p = ModelParams::make(3, 0.5, frac * p0.hardy_bound());
    est.push_back(coercivity_estimate(assemble_forms(make_table(p, 4)), p));
  }
  CHECK(est[0] == Approx(1.0).epsilon(1e-9));
  CHECK(est[1] > 0.0);
  CHECK(est[1] < 1.0);
  CHECK(est[2] < est[1]);
}

TEST_CASE("inequalities on random combinations") {
  for (double frac : {0.0, 0.9}) {
    const auto p = ModelParams::make(3, 0.5, frac * p0.hardy_bound());
    const auto table = make_table(p);
    const auto forms = assemble_forms(table);
    const auto family = random_combinations(table.size(), 100, 20221210);
    CHECK(hardy_extended_check(forms, p, family).holds);
    CHECK(hardy_frac_check(forms, p, family).holds);
    const auto trace = trace_constant_estimate(forms, family);
    CHECK(std::isfinite(trace.sup_ratio));
    CHECK(trace.sup_ratio > 0.0);
    CHECK(sphere_trace_check(*table.angular, 100, 20221210).holds);
  }
}

TEST_CASE("random family is reproducible") {
  const auto a = random_combinations(5, 3, 7);
  const auto b = random_combinations(5, 3, 7);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i].array() == b[i].array()).all());
}

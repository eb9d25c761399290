#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "hardyspec/error.hpp"
#include "hardyspec/quadrature.hpp"
#include "hardyspec/spherical_spectrum.hpp"

using namespace hardyspec;
using doctest::Approx;

namespace {
const ModelParams p0 = ModelParams::make(3, 0.5, 0.0);
}

TEST_CASE("sector problem") {
  const auto sp = SectorProblem::make(p0, 2, 64);
  CHECK(sp.mesh.front() == 0.0);
  CHECK(sp.mesh.back() == Approx(M_PI / 2).epsilon(1e-15));
  CHECK(sp.mesh.size() == 65);
  CHECK(sp.lambda_l == 6.0);
  CHECK(sp.dofs() == 64);
  CHECK(SectorProblem::make(p0, 0, 64).dofs() == 65);
  CHECK_NOTHROW(check_sector_problem(sp));
  auto bad = sp;
  bad.mesh.resize(8);
  CHECK_THROWS_AS(check_sector_problem(bad), Error);
}

TEST_CASE("sector matrices") {
  const auto sp = SectorProblem::make(p0, 0, 200);
  const auto m = assemble_sector(sp);
  const std::vector<double> ones(sp.dofs(), 1.0);
  for (double v : m.stiffness.apply(ones)) CHECK(std::abs(v) < 1e-12);
  CHECK(m.mass.quad(ones, ones) == Approx(sector_measure(p0)).epsilon(1e-12));

  const auto pm = ModelParams::make(3, 0.5, 0.3);
  const auto mm = assemble_sector(SectorProblem::make(pm, 0, 200));
  CHECK(mm.stiffness.diag[0] == Approx(m.stiffness.diag[0] - 0.3).epsilon(1e-14));
  for (std::size_t i = 1; i < mm.stiffness.diag.size(); ++i) CHECK(mm.stiffness.diag[i] == m.stiffness.diag[i]);
  CHECK(mm.stiffness.off == m.stiffness.off);
  CHECK(mm.stiffness_no_mu.diag == m.stiffness.diag);
}

TEST_CASE("eigenvalues at mu = 0") {
  const auto s0 = solve_sector(SectorProblem::make(p0, 0, 400), 3);
  CHECK(std::abs(s0[0].nu) < 1e-8);
  CHECK(s0[1].nu == Approx(8.0).epsilon(1e-3));
  CHECK(s0[2].nu == Approx(24.0).epsilon(1e-3));
  const auto s1 = solve_sector(SectorProblem::make(p0, 1, 400), 2);
  CHECK(s1[0].nu == Approx(3.0).epsilon(1e-3));
  CHECK(s1[1].nu == Approx(15.0).epsilon(1e-3));

  const auto refined = solve_sector_refined(p0, 0, 3, 400, 3);
  CHECK(refined.modes[1].nu == Approx(8.0).epsilon(1e-8));
  CHECK(refined.modes[2].nu == Approx(24.0).epsilon(1e-8));
  CHECK(refined.modes[1].nu_error > 0.0);

  // the constant mode has f(0) = (int w)^{-1/2}
  CHECK(refined.modes[0].f_values[0] == Approx(1.0 / std::sqrt(sector_measure(p0))).epsilon(1e-9));
  // B-normalized profiles
  for (const auto& mode : refined.modes) {
    const std::span<const double> f(mode.f_values.data(), refined.problem.dofs());
    CHECK(refined.matrices.mass.quad(f, f) == Approx(1.0).epsilon(1e-9));
    CHECK(mode.f_values[0] >= 0.0);
  }
}

TEST_CASE("eigenvalues for other s") {
  // nu = k^2 + k (N - 2s) for even k in the l = 0 sector
  for (double s : {0.3, 0.7}) {
    const auto p = ModelParams::make(3, s, 0.0);
    const auto r = solve_sector_refined(p, 0, 2, 400, 3);
    CHECK(r.modes[1].nu == Approx(4 + 2 * (3 - 2 * s)).epsilon(1e-6));
  }
}

TEST_CASE("hardy coupling lowers the first eigenvalue") {
  const auto pm = ModelParams::make(3, 0.5, 0.05);
  const auto r = solve_sector_refined(pm, 0, 2, 400, 3);
  CHECK(r.modes[0].nu < 0.0);
  CHECK(r.modes[0].nu > -pm.half_gap() * pm.half_gap());
}

TEST_CASE("equator trace") {
  const auto a = solve_sector(SectorProblem::make(p0, 1, 200), 1);
  const auto b = solve_sector(SectorProblem::make(p0, 1, 400), 1);
  // the nu = 3 mode of the l = 1 sector is cos(phi) normalized
  const double exact = 1.0 / std::sqrt(0.5 * std::beta(0.5, 2.5));
  CHECK(equator_trace(b[0]) == Approx(exact).epsilon(1e-4));
  CHECK(std::abs(equator_trace(a[0]) - equator_trace(b[0])) <= 1e-4 * equator_trace(b[0]));
}

TEST_CASE("angular spectrum ranking") {
  const std::vector<SectorRequest> req{{0, 3}, {1, 2}, {2, 2}};
  const auto spec = solve_angular_spectrum(p0, req, 400, 3);
  std::vector<double> nus;
  for (std::size_t k = 0; k < spec.ranking.size(); ++k) nus.push_back(spec.ranked(k).nu);
  CHECK(std::is_sorted(nus.begin(), nus.end()));
  CHECK(spec.ranked(0).l == 0);
  CHECK(spec.ranked(1).l == 1);
  CHECK(spec.sector_of_l(2) == 2);
}

TEST_CASE("sphere trace inequality") {
  const auto r = solve_sector_refined(p0, 0, 1, 200, 1);
  const std::vector<double> ones(r.problem.mesh.size(), 1.0);
  const double slack = sphere_trace_inequality_check(r, ones);
  CHECK(slack == Approx(p0.half_gap() * p0.half_gap() * sector_measure(p0) - p0.hardy_bound()).epsilon(1e-10));
  CHECK(slack > 0.0);
  const auto vanishing = nodal_interpolant(r.problem, [](double phi) { return std::sin(phi); });
  CHECK(vanishing[0] == 0.0);
  CHECK(sphere_trace_inequality_check(r, vanishing) > 0.0);
}

TEST_CASE("harmonic multiplicity") {
  CHECK(harmonic_multiplicity(3, 0) == 1);
  CHECK(harmonic_multiplicity(3, 2) == 5);
  CHECK(harmonic_multiplicity(4, 1) == 4);
  CHECK(harmonic_multiplicity(2, 3) == 2);
}

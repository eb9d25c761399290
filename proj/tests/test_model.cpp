#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hardyspec/error.hpp"
#include "hardyspec/model.hpp"

using namespace hardyspec;
using doctest::Approx;

TEST_CASE("hardy constants") {
  const auto c3 = compute_constants(3, 0.5);
  CHECK(c3.kappa_s == Approx(1.0).epsilon(1e-14));
  CHECK(c3.lambda_Ns == Approx(2.0 / M_PI).epsilon(1e-13));
  CHECK(compute_constants(2, 0.5).lambda_Ns == Approx(0.228473290522231812687).epsilon(1e-13));
  CHECK(compute_constants(4, 0.5).lambda_Ns == Approx(1.09421980761323831942).epsilon(1e-13));
  CHECK(compute_constants(3, 0.3).kappa_s == Approx(0.572540458568311777).epsilon(1e-13));
  CHECK(compute_constants(3, 0.7).kappa_s == Approx(1.746601458525024853).epsilon(1e-13));
  const auto c = compute_constants(3, 0.3);
  CHECK(c.kappa_s * c.lambda_Ns == Approx(0.446864972746230735652).epsilon(1e-13));
  CHECK_THROWS_AS(compute_constants(1, 0.6), Error);
}

TEST_CASE("parameter validation") {
  CHECK(validate_params(ModelParams::make(3, 0.5, 0.0)).accepted());
  CHECK_THROWS_AS(ModelParams::make(1, 0.6, 0.0), Error);
  const auto p0 = ModelParams::make(3, 0.5, 0.0);
  CHECK(p0.mu_margin == Approx(1e-6 * p0.hardy_bound()));
  const auto at_bound = ModelParams::make(3, 0.5, p0.hardy_bound());
  const auto report = validate_params(at_bound);
  REQUIRE_FALSE(report.accepted());
  CHECK(report.failures.front().find("margin") != std::string::npos);
  CHECK(validate_params(ModelParams::make(3, 0.5, 0.95 * p0.hardy_bound())).accepted());
  // the coupling may be negative without bound
  CHECK(validate_params(ModelParams::make(3, 0.5, -10.0)).accepted());
  CHECK(p0.half_gap() == 1.0);
  CHECK(p0.shift() == 1.0);
}

TEST_CASE("sphere area") {
  CHECK(sphere_area(1) == Approx(2.0));
  CHECK(sphere_area(2) == Approx(2 * M_PI));
  CHECK(sphere_area(3) == Approx(4 * M_PI));
}

TEST_CASE("perturbation evaluation") {
  PerturbationSpec h;
  h.amplitude_B = 1.0;
  CHECK(perturbation_eval(h, 0.5, 0.0, 3.0) == 1.0);
  PerturbationSpec g;
  g.amplitude_A = 1.0;
  g.epsilon = 0.5;
  CHECK(perturbation_eval(g, 0.5, 1.0, 0.0) == Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK_THROWS_AS(perturbation_eval(g, 0.5, 0.0, 0.0), Error);
  PerturbationSpec f{1.0, 2.0, 0.5, 1.0, 1.0};
  CHECK(perturbation_eval(f, 0.5, 4.0, 0.5) == Approx(4.22006905197221679e-7).epsilon(1e-14));

  PerturbationSpec bad;
  bad.epsilon = 1.0;
  CHECK_THROWS_AS(check_perturbation(bad, 0.5), Error);
  CHECK_NOTHROW(check_perturbation(g, 0.5));
}

TEST_CASE("subhomogeneous bound") {
  std::vector<RadialTimePoint> grid;
  for (int i = 1; i <= 400; ++i)
    for (double t : {0.0, 0.5, 1.0}) grid.push_back({0.005 * i, t});
  PerturbationSpec h;
  h.amplitude_A = 1.0;
  CHECK(check_subhomogeneous_bound(h, 0.5, grid).holds);

  // B = 5: the ratio 5 e^{-r^2} / (1 + r^{-1/2}) peaks near r = 0.392 at 1.6509
  PerturbationSpec b5;
  b5.amplitude_B = 5.0;
  const auto r5 = check_subhomogeneous_bound(b5, 0.5, grid);
  CHECK_FALSE(r5.holds);
  CHECK(r5.max_ratio == Approx(1.65094).epsilon(1e-4));
  CHECK(r5.r_at_max == Approx(0.39).epsilon(0.03));

  PerturbationSpec a2;
  a2.amplitude_A = 2.0;
  const std::vector<RadialTimePoint> one{{0.1, 0.0}};
  const auto r2 = check_subhomogeneous_bound(a2, 0.5, one);
  CHECK_FALSE(r2.holds);
  CHECK(r2.max_ratio == Approx(1.50437463683850407).epsilon(1e-13));
}

TEST_CASE("gaussian kernel") {
  const auto p = ModelParams::make(3, 0.5, 0.0);
  const GaussianKernel G(p);
  CHECK(G.dimension() == 4);
  const std::vector<double> z{0.3, -0.2, 0.5, 0.7};
  const double t = 0.8;
  const double r2 = 0.09 + 0.04 + 0.25 + 0.49;
  CHECK(G.value(z, t) == Approx(std::pow(t, -2.0) * std::exp(-r2 / (4 * t))).epsilon(1e-14));
  const auto grad = G.gradient(z, t);
  for (std::size_t i = 0; i < z.size(); ++i) {
    auto zp = z, zm = z;
    const double h = 1e-5;
    zp[i] += h;
    zm[i] -= h;
    const double fd = (G.value(zp, t) - G.value(zm, t)) / (2 * h);
    CHECK(grad[i] == Approx(-z[i] / (2 * t) * G.value(z, t)).epsilon(1e-10));
    CHECK(grad[i] == Approx(fd).epsilon(1e-8));
  }
  const double h = 1e-5;
  const double fd = (G.value(z, t + h) - G.value(z, t - h)) / (2 * h);
  CHECK(G.time_derivative(z, t) == Approx(fd).epsilon(1e-8));
  CHECK_THROWS_AS(G.value(z, 0.0), Error);
}

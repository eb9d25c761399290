#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hardyspec/error.hpp"
#include "hardyspec/special_functions.hpp"

using namespace hardyspec;
using doctest::Approx;

TEST_CASE("gamma") {
  CHECK(gamma_fn(1.0) == 1.0);
  CHECK(gamma_fn(0.5) == Approx(std::sqrt(M_PI)).epsilon(1e-15));
  CHECK(gamma_fn(5.0) == Approx(24.0).epsilon(1e-15));
  CHECK(gamma_fn(-2.5) == Approx(-0.94530872048294188123).epsilon(1e-14));
  CHECK_THROWS_AS(gamma_fn(0.0), Error);
  CHECK_THROWS_AS(gamma_fn(-3.0), Error);
  CHECK_THROWS_AS(gamma_fn(200.0), Error);
  CHECK(rgamma_fn(-2.0) == 0.0);
  CHECK(rgamma_fn(4.0) == Approx(1.0 / 6.0));
}

TEST_CASE("pochhammer and binomial") {
  CHECK(pochhammer(7.3, 0) == 1.0);
  CHECK(pochhammer(2.0, 3) == 24.0);
  CHECK(pochhammer(-2.0, 3) == 0.0);
  CHECK(binom_shifted(3, 0.5) == Approx(std::tgamma(4.5) / (6.0 * std::tgamma(1.5))).epsilon(1e-14));
  CHECK(binom_shifted(0, 2.7) == 1.0);
}

TEST_CASE("kummer M") {
  CHECK(kummer_m(0.3, 1.7, 0.0) == 1.0);
  CHECK(kummer_m(1.3, 1.3, 2.0) == Approx(std::exp(2.0)).epsilon(1e-14));
  CHECK(kummer_m(-1.0, 3.0, 1.5) == Approx(0.5).epsilon(1e-15));
  CHECK(kummer_m(0.7, 0.7, 60.0) == Approx(std::exp(60.0)).epsilon(1e-11));
  // M(1, 2, t) = (e^t - 1) / t on both sides of the series/asymptotic switch
  for (double t : {10.0, 49.0, 51.0, 80.0})
    CHECK(kummer_m(1.0, 2.0, t) == Approx(std::expm1(t) / t).epsilon(1e-11));
}

TEST_CASE("tricomi T") {
  CHECK(tricomi_t(0.0, 1.5, 2.0) == Approx(1.0).epsilon(1e-14));
  CHECK(tricomi_t(1.0, 1.5, 4.0) == Approx(0.226338524990587289681).epsilon(1e-9));
  // t^{b-1} T(c, b, t) -> Gamma(b-1) / Gamma(c) as t -> 0+
  const double t = 1e-8;
  CHECK(std::pow(t, 0.7) * tricomi_t(0.3, 1.7, t) ==
        Approx(0.433907406674608244580876).epsilon(1e-10));
  CHECK_THROWS_AS(tricomi_t(0.3, 2.0, 1.0), Error);
}

TEST_CASE("laguerre and P") {
  CHECK(laguerre_gen(0, 0.4, 3.0) == 1.0);
  CHECK(laguerre_gen(1, 2.0, 3.0) == 0.0);
  CHECK(laguerre_gen(2, 0.5, 1.0) ==
        Approx(binom_shifted(2, 0.5) * kummer_m(-2.0, 1.5, 1.0)).epsilon(1e-12));
  CHECK(p_poly(0, 2.1, 5.0) == 1.0);
  CHECK(p_poly(1, 2.5, 1.0) == Approx(0.6).epsilon(1e-15));
  CHECK(p_poly(3, 2.3, 1.7) == Approx(laguerre_gen(3, 1.3, 1.7) / binom_shifted(3, 1.3)).epsilon(1e-12));
  const double h = 1e-6;
  CHECK(p_poly_derivative(3, 2.3, 1.7) ==
        Approx((p_poly(3, 2.3, 1.7 + h) - p_poly(3, 2.3, 1.7 - h)) / (2 * h)).epsilon(1e-8));
  CHECK(laguerre_gen_derivative(4, 0.3, 2.2) == Approx(-laguerre_gen(3, 1.3, 2.2)).epsilon(1e-14));
}

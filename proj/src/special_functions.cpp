#include "hardyspec/special_functions.hpp"

#include <cmath>
#include <limits>

#include "hardyspec/error.hpp"

namespace hardyspec {

namespace {

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// Large-t expansion M ~ Gamma(b)/Gamma(c) e^t t^{c-b} sum_k (b-c)_k (1-c)_k / (k! t^k).
// Returns NaN when the asymptotic series does not settle to double precision.
double kummer_asymptotic(double c, double b, double t) {
  long double sum = 1.0L, term = 1.0L;
  for (int k = 0; k < 200; ++k) {
    const long double next = term * (b - c + k) * (1.0 - c + k) / ((k + 1.0L) * t);
    if (std::abs(next) >= std::abs(term) && k > 0) return std::numeric_limits<double>::quiet_NaN();
    term = next;
    sum += term;
    if (std::abs(term) <= 1e-18L * std::abs(sum)) {
      const long double log_pref = std::lgamma(b) - std::lgamma(c) + t + (c - b) * std::log(t);
      const double sign_b = std::tgamma(b) < 0 ? -1.0 : 1.0;
      const double sign_c = std::tgamma(c) < 0 ? -1.0 : 1.0;
      return static_cast<double>(sign_b * sign_c * std::exp(log_pref) * sum);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double kummer_series(double c, double b, double t) {
  long double sum = 1.0L, term = 1.0L;
  for (int n = 0; n < 100000; ++n) {
    term *= (c + n) / (b + n) * t / (n + 1.0L);
    sum += term;
    if (term == 0.0L) break;
    // past the turning point the terms decrease geometrically
    if (n > c && std::abs(term) <= 1e-19L * std::abs(sum)) break;
  }
  if (!std::isfinite(static_cast<double>(sum)))
    throw Error(ErrorKind::Overflow, "kummer_m overflow");
  return static_cast<double>(sum);
}

}  // namespace

double gamma_fn(double x) {
  if (std::isnan(x)) throw Error(ErrorKind::Domain, "gamma_fn of NaN");
  if (is_nonpositive_integer(x)) throw Error(ErrorKind::Pole, "gamma_fn pole at non-positive integer");
  const double g = std::tgamma(x);
  if (!std::isfinite(g)) throw Error(ErrorKind::Overflow, "gamma_fn overflow");
  return g;
}

double rgamma_fn(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  if (x > 171.0) return 0.0;
  return 1.0 / std::tgamma(x);
}

double pochhammer(double x, int i) {
  double out = 1.0;
  for (int j = 0; j < i; ++j) out *= x + j;
  return out;
}

double binom_shifted(int n, double a) {
  double out = 1.0;
  for (int i = 1; i <= n; ++i) out *= (a + i) / i;
  return out;
}

double kummer_m(double c, double b, double t) {
  if (is_nonpositive_integer(b)) throw Error(ErrorKind::Parameter, "kummer_m: b is a non-positive integer");
  if (t < 0.0) throw Error(ErrorKind::Domain, "kummer_m needs t >= 0");
  if (t == 0.0) return 1.0;
  if (t > 50.0 && !is_nonpositive_integer(c)) {
    const double v = kummer_asymptotic(c, b, t);
    if (std::isfinite(v)) return v;
  }
  return kummer_series(c, b, t);
}

double tricomi_t(double c, double b, double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::Domain, "tricomi_t needs t > 0");
  if (b == std::floor(b)) throw Error(ErrorKind::Parameter, "tricomi_t: integer b is not supported");
  if (!(b > 1.0)) throw Error(ErrorKind::Parameter, "tricomi_t needs b > 1");
  if (is_nonpositive_integer(c)) {
    // polynomial case: T(-n, b, t) = (-1)^n (b)_n M(-n, b, t)
    const int n = static_cast<int>(-c);
    return (n % 2 ? -1.0 : 1.0) * pochhammer(b, n) * kummer_m(c, b, t);
  }
  if (t > 30.0) {
    long double sum = 1.0L, term = 1.0L;
    bool settled = false;
    for (int k = 0; k < 200; ++k) {
      const long double next = -term * (c + k) * (c - b + 1.0 + k) / ((k + 1.0L) * t);
      if (std::abs(next) >= std::abs(term)) break;
      term = next;
      sum += term;
      if (std::abs(term) <= 1e-18L * std::abs(sum)) {
        settled = true;
        break;
      }
    }
    if (settled) return static_cast<double>(std::pow(static_cast<long double>(t), -c) * sum);
  }
  const double first = gamma_fn(1.0 - b) * rgamma_fn(c - b + 1.0) * kummer_m(c, b, t);
  const double second =
      gamma_fn(b - 1.0) * rgamma_fn(c) * std::pow(t, 1.0 - b) * kummer_m(c - b + 1.0, 2.0 - b, t);
  return first + second;
}

double laguerre_gen(int n, double a, double t) {
  if (n < 0) throw Error(ErrorKind::Domain, "laguerre_gen needs n >= 0");
  if (n == 0) return 1.0;
  double prev = 1.0, cur = 1.0 + a - t;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + a - t) * cur - (k + a) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double laguerre_gen_derivative(int n, double a, double t) {
  return n == 0 ? 0.0 : -laguerre_gen(n - 1, a + 1.0, t);
}

// The finite sum equals binom(n+a, n)^{-1} L_n^a(t) with a = b - 1; the
// recurrence avoids the cancellation of the monomial form at large t.
double p_poly(int n, double b_param, double t) {
  const double a = b_param - 1.0;
  return laguerre_gen(n, a, t) / binom_shifted(n, a);
}

double p_poly_derivative(int n, double b_param, double t) {
  const double a = b_param - 1.0;
  return laguerre_gen_derivative(n, a, t) / binom_shifted(n, a);
}

}  // namespace hardyspec

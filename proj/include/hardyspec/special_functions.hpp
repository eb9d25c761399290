#pragma once

namespace hardyspec {

/// Gamma function. Throws Pole at non-positive integers and Overflow when
/// the result exceeds the double range.
double gamma_fn(double x);

/// 1/Gamma(x), with zeros at the non-positive integers.
double rgamma_fn(double x);

/// Rising factorial (x)_i = x (x+1) ... (x+i-1), (x)_0 = 1.
double pochhammer(double x, int i);

/// Generalized binomial coefficient binom(n + a, n).
double binom_shifted(int n, double a);

/// Kummer confluent hypergeometric function M(c, b, t) for t >= 0.
double kummer_m(double c, double b, double t);

/// Tricomi confluent hypergeometric function T(c, b, t) (often written U)
/// for t > 0 and non-integer b > 1, from the two-term Kummer connection.
double tricomi_t(double c, double b, double t);

/// Generalized Laguerre polynomial L_n^a(t) by the three-term recurrence.
double laguerre_gen(int n, double a, double t);

/// Derivative d/dt L_n^a(t) = -L_{n-1}^{a+1}(t).
double laguerre_gen_derivative(int n, double a, double t);

/// Radial polynomial of the Ornstein-Uhlenbeck eigenfunctions,
///   P_n(t) = sum_{i=0}^{n} (-n)_i / (b)_i * t^i / i!,
/// with b = b_param = (N+2-2s)/2 - alpha_j.
double p_poly(int n, double b_param, double t);

/// d/dt P_n(t).
double p_poly_derivative(int n, double b_param, double t);

}  // namespace hardyspec

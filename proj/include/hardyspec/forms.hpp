#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hardyspec/kernels.hpp"
#include "hardyspec/ou_spectrum.hpp"

namespace hardyspec {

/// U(z) = r^{-alpha} Q(r^2/4) f(phi) Y_l(omega) on one harmonic sector.
struct SeparableFunction {
  int sector = 0;  // index into AngularSpectrum::sectors
  double alpha = 0.0;
  std::function<double(double)> Q;
  std::function<double(double)> dQ;
  std::vector<double> f;  // nodal profile on the sector mesh
};

SeparableFunction as_separable(const SpectrumTable& table, std::size_t element);

/// All weighted integrals of a pair (Gaussian weight y^{1-2s} G on the half
/// space, G(x,0) on the boundary).
struct PairForms {
  double mass = 0.0;            // int y^{1-2s} U V G
  double gradient = 0.0;        // int y^{1-2s} grad U . grad V G
  double inverse_square = 0.0;  // int y^{1-2s} U V |z|^{-2} G
  double square = 0.0;          // int y^{1-2s} U V |z|^2 G
  double trace_hardy = 0.0;     // int |x|^{-2s} Tr U Tr V G(x,0)
  double trace_mass = 0.0;      // int Tr U Tr V G(x,0)
};

/// Radial integrals by generalized Gauss-Laguerre of the given order, angular
/// integrals with the sector's finite element matrices. Zero across sectors.
PairForms pair_forms(const AngularSpectrum& angular, const SeparableFunction& u,
                     const SeparableFunction& v, int order);

struct FormMatrices {
  Eigen::MatrixXd mass;
  Eigen::MatrixXd gradient;
  Eigen::MatrixXd inverse_square;
  Eigen::MatrixXd square;
  Eigen::MatrixXd trace_hardy;
  Eigen::MatrixXd trace_mass;

  /// Gram matrix of the H norm: gradient + mass.
  Eigen::MatrixXd h_gram() const { return gradient + mass; }
};

FormMatrices assemble_forms(const SpectrumTable& table, int order = 64,
                            Execution exec = Execution::Parallel);

struct GramReport {
  double max_deviation = 0.0;  // max |G_ab - delta_ab|
  double max_offdiagonal = 0.0;
  double max_diagonal_error = 0.0;
  double max_cross_sector = 0.0;
};

GramReport gram_check(const SpectrumTable& table, int order = 64,
                      Execution exec = Execution::Parallel);
GramReport gram_check(const Eigen::MatrixXd& gram, const SpectrumTable& table);

/// Largest relative gap between the closed-form normalization constant and the
/// quadrature value of ||Y_{n,j}||_L.
double normalization_check(const SpectrumTable& table, int order = 64);

struct ResidualReport {
  double max_residual = 0.0;
  double budget = 0.0;
  bool within_budget() const { return max_residual <= budget; }
};

/// max over tests of |a(Y,V) - mu T(Y,V) - gamma <Y,V>_L| / (||Y||_H ||V||_H).
/// Budget: 1e-8 + 10 * |nu_j - nu_j(finest mesh)|.
ResidualReport eigen_residual_check(const SpectrumTable& table, std::size_t element,
                                    const std::vector<SeparableFunction>& tests, int order = 64);

/// Minimal generalized Rayleigh quotient of
///   [gradient - mu trace_hardy + c mass] / [gradient + c mass],  c = (N+2-2s)/4.
double coercivity_estimate(const FormMatrices& forms, const ModelParams& params);

/// Seeded standard normal coefficient vectors.
std::vector<Eigen::VectorXd> random_combinations(std::size_t dimension, std::size_t count,
                                                 std::uint64_t seed);

struct InequalityReport {
  std::string name;
  std::size_t samples = 0;
  double min_relative_slack = 0.0;  // min (rhs - lhs) / rhs
  double sup_ratio = 0.0;           // max lhs / rhs
  bool holds = false;               // slack >= -1e-9 * rhs for every sample
};

/// int V^2/|z|^2 + int |z|^2 V^2 / (4 (N-2s)^2)
///   <= 4/(N-2s)^2 int |grad V|^2 + (N+2-2s)/(N-2s)^2 int V^2.
InequalityReport hardy_extended_check(const FormMatrices& forms, const ModelParams& params,
                                      const std::vector<Eigen::VectorXd>& family,
                                      Execution exec = Execution::Parallel);

/// kappa_s Lambda_{N,s} int |Tr V|^2 |x|^{-2s} + 1/16 int |z|^2 V^2
///   <= int |grad V|^2 + (N+2-2s)/4 int V^2.
InequalityReport hardy_frac_check(const FormMatrices& forms, const ModelParams& params,
                                  const std::vector<Eigen::VectorXd>& family,
                                  Execution exec = Execution::Parallel);

/// Empirical sup of int |Tr V|^2 G(x,0) / ||V||_H^2 (estimate of K_{N,s}).
InequalityReport trace_constant_estimate(const FormMatrices& forms,
                                         const std::vector<Eigen::VectorXd>& family,
                                         Execution exec = Execution::Parallel);

/// Sphere trace inequality on random combinations of each sector's angular
/// profiles plus random polynomials in cos(phi).
InequalityReport sphere_trace_check(const AngularSpectrum& angular, std::size_t count,
                                    std::uint64_t seed, Execution exec = Execution::Parallel);

}  // namespace hardyspec

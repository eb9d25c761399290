#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hardyspec/model.hpp"

namespace hardyspec {

struct TridiagEigen {
  std::vector<double> eigenvalues;       // ascending
  std::vector<double> first_components;  // first entry of each unit eigenvector
};

/// Eigenvalues and first eigenvector components of a symmetric tridiagonal
/// matrix (implicit QL with Wilkinson shifts). Throws Convergence after 60
/// sweeps on a single eigenvalue.
TridiagEigen symtridiag_eigen(std::span<const double> diagonal,
                              std::span<const double> offdiagonal);

enum class WeightKind { Jacobi, GeneralizedLaguerre };

/// Gauss rule for (1-x)^alpha (1+x)^beta on (-1,1) or t^alpha e^{-t} on (0,inf).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  WeightKind kind = WeightKind::Jacobi;
  double alpha = 0.0;
  double beta = 0.0;
  int order = 0;

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

QuadratureRule gauss_jacobi_rule(int order, double alpha, double beta);
QuadratureRule gauss_legendre_rule(int order);
QuadratureRule gauss_laguerre_rule(int order, double a);

/// Maps a Jacobi rule onto [lo, hi]; the caller is responsible for the
/// weight's Jacobian (returned weights absorb ((hi-lo)/2)^{1+alpha+beta}).
QuadratureRule map_to_interval(const QuadratureRule& rule, double lo, double hi);

/// int_0^inf r^p F(r^2/4) e^{-r^2/4} dr = 2^p int_0^inf t^{(p-1)/2} F(t) e^{-t} dt.
/// Exact for polynomial F of degree <= 2*order-1. Throws Parameter if p <= -1.
double radial_moment(double p, const std::function<double(double)>& F, int order);

/// Integral over R^{N+1}_+ of y^{1-2s} |z|^{-2 sigma} F(|z|^2/4) psi(z/|z|) G(z) dz,
/// with the angular factor already integrated to angular_value.
double halfspace_gaussian_integral(const std::function<double(double)>& F,
                                   double angular_value, const ModelParams& params,
                                   double sigma, int order);

/// |S^{N-1}| * int_0^inf radial(r) r^{N-1} e^{-r^2/4} dr by graded composite
/// Gauss rules on [0, R]; the first panel absorbs r^{singular_power} (the total
/// power near zero including r^{N-1}) with a Gauss-Jacobi weight. R grows until
/// the tail estimate drops below 1e-14 of the partial sum.
double trace_gaussian_integral(const std::function<double(double)>& radial,
                               const ModelParams& params, double singular_power,
                               int order = 20, double grading = 2.0, int panels = 40);

/// Weighted half-sphere measure of the sector reduction:
/// int_0^{pi/2} sin(phi)^{1-2s} cos(phi)^{N-1} dphi = B(1-s, N/2) / 2.
double sector_measure(const ModelParams& params);

}  // namespace hardyspec

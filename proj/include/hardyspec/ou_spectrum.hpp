#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "hardyspec/spherical_spectrum.hpp"

namespace hardyspec {

struct Alpha {
  double value = 0.0;
  bool near_degenerate = false;  // radicand below 1e-8 * ((N-2s)/2)^2
};

/// alpha = (N-2s)/2 - sqrt(((N-2s)/2)^2 + nu). Throws Domain when the radicand is <= 0.
Alpha alpha_exponent(double nu, const ModelParams& params);

/// ||Y_{n,j}||_L with a = sqrt(((N-2s)/2)^2 + nu_j):
///   ||Y||^2 = 2^{N+1-2s-2 alpha} binom(n+a, n)^{-2} Gamma(n+a+1) / n!.
double normalization_constant(int n, double a, double alpha, const ModelParams& params);

struct OUBasisElement {
  int n = 0;
  int j = 1;       // global angular rank (1-based)
  int l = 0;
  int sector = 0;  // index into AngularSpectrum::sectors
  int mode = 0;    // index into that sector's modes
  double nu = 0.0;
  double nu_error = 0.0;
  double alpha = 0.0;
  double a = 0.0;
  double gamma = 0.0;
  double norm_const = 1.0;
  double equator_trace = 0.0;

  /// Second parameter of P_{j,n}: (N+2-2s)/2 - alpha = a + 1.
  double b_param() const { return a + 1.0; }
};

struct SpectrumTable {
  ModelParams params;
  std::shared_ptr<const AngularSpectrum> angular;
  std::vector<OUBasisElement> elements;  // ascending in gamma
  std::vector<std::vector<int>> groups;  // element indices sharing gamma up to tie_tolerance
  std::vector<double> group_gamma;       // mean gamma of each group
  double tie_tolerance = 1e-8;

  std::size_t size() const { return elements.size(); }
  const SectorSolution& sector(const OUBasisElement& e) const { return angular->sectors.at(e.sector); }
  const AngularMode& mode(const OUBasisElement& e) const { return sector(e).modes.at(e.mode); }
  int group_of(int element) const;
  /// Index of the element with the given (n, j), or -1.
  int find(int n, int j) const;
  std::vector<double> gammas() const;
};

/// Elements (n, j) with n <= n_max over the first j_max angular modes by global rank
/// (all modes when j_max <= 0), grouped by gamma.
SpectrumTable build_spectrum(std::shared_ptr<const AngularSpectrum> angular, int n_max,
                             int j_max = 0, double tie_tolerance = 1e-8);

/// Multiplicity #{(n, j) in the table : gamma + alpha_j / 2 = n} for a group.
int group_multiplicity(const SpectrumTable& table, double gamma);

/// Normalized eigenfunction r^{-alpha} P(r^2/4) f(phi) Y_l / norm at a point of
/// its sector. For l = 0 the harmonic is the constant |S^{N-1}|^{-1/2}; l >= 1
/// needs the value of the unit-normalized harmonic at the point.
double eval_eigenfunction(const SpectrumTable& table, const OUBasisElement& element, double r,
                          double phi, std::optional<double> harmonic_value = std::nullopt);

/// Radial factor r^{-alpha} P(r^2/4) / norm of the trace, without f(0) and harmonic.
double eval_radial(const OUBasisElement& element, double r);

}  // namespace hardyspec

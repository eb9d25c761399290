#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hardyspec/model.hpp"

namespace hardyspec {

/// Symmetric tridiagonal matrix stored by diagonals.
struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> off;  // off[i] couples i and i+1

  std::size_t size() const { return diag.size(); }
  std::vector<double> apply(std::span<const double> x) const;
  double quad(std::span<const double> x, std::span<const double> y) const;
};

/// One harmonic sector of the weighted half-sphere eigenproblem, written in the
/// latitude phi in [0, pi/2] measured from the equator (phi = 0 is the boundary
/// S^{N-1}). With psi = f(phi) Y_l(omega) the weak form reduces to
///   int w (f' g' + lambda_l f g / cos^2) - mu f(0) g(0) = nu int w f g,
///   w(phi) = sin(phi)^{1-2s} cos(phi)^{N-1},  lambda_l = l (l + N - 2).
struct SectorProblem {
  ModelParams params;
  int l = 0;
  std::vector<double> mesh;
  double lambda_l = 0.0;

  /// Graded mesh phi_i = (pi/2) (i/M)^{grading}; the default grading is
  /// 1 / min(1, 2s).
  static SectorProblem make(const ModelParams& params, int l, int elements,
                            std::optional<double> grading = std::nullopt);

  /// l = 0 keeps the pole node (natural condition); l >= 1 drops it.
  std::size_t dofs() const { return l == 0 ? mesh.size() : mesh.size() - 1; }
};

/// Throws Validation if the mesh or l is inconsistent.
void check_sector_problem(const SectorProblem& problem);

struct SectorMatrices {
  SymTridiag stiffness;        // includes the -mu e0 e0^T boundary term
  SymTridiag stiffness_no_mu;  // gradient + harmonic potential only
  SymTridiag mass;
};

SectorMatrices assemble_sector(const SectorProblem& problem);

struct AngularMode {
  int index_k = 0;      // global rank across sectors (1-based), 0 if unranked
  int l = 0;
  int sector_rank = 0;  // 0-based position inside its sector
  double nu = 0.0;           // eigenvalue used downstream (extrapolated when refined)
  double nu_discrete = 0.0;  // eigenvalue on the mesh carrying f_values
  double nu_error = 0.0;     // |nu - nu_discrete|
  std::vector<double> f_values;  // nodal values on the full mesh (pole value 0 for l >= 1)
  double equator_trace = 0.0;
  double sphere_norm = 0.0;
};

/// Lowest `count` eigenpairs of A f = nu B f, B-normalized, ascending,
/// signed so that f(0) >= 0.
std::vector<AngularMode> solve_sector(const SectorProblem& problem, int count);
std::vector<AngularMode> solve_sector(const SectorProblem& problem,
                                      const SectorMatrices& matrices, int count);

double equator_trace(const AngularMode& mode);

/// Solved sector: finest-mesh problem and matrices plus its modes.
struct SectorSolution {
  SectorProblem problem;
  SectorMatrices matrices;
  std::vector<AngularMode> modes;
  int refinement_levels = 1;
};

/// Solves on meshes M, 2M, ..., 2^{levels-1} M and extrapolates nu from the
/// last three meshes with the observed convergence order.
SectorSolution solve_sector_refined(const ModelParams& params, int l, int count,
                                    int elements, int levels,
                                    std::optional<double> grading = std::nullopt);

struct SectorRequest {
  int l = 0;
  int modes = 1;
};

struct AngularSpectrum {
  ModelParams params;
  std::vector<SectorSolution> sectors;
  /// (sector index, mode index) ordered by (nu, l); index_k is the position + 1.
  std::vector<std::pair<int, int>> ranking;

  const AngularMode& ranked(std::size_t k) const {
    const auto& [si, mi] = ranking.at(k);
    return sectors.at(si).modes.at(mi);
  }
  int sector_of_l(int l) const;
};

/// Sector solves run in parallel when threads > 1.
AngularSpectrum solve_angular_spectrum(const ModelParams& params,
                                       std::span<const SectorRequest> sectors,
                                       int elements, int levels,
                                       std::optional<double> grading = std::nullopt);

/// Piecewise-linear evaluation of nodal values on the mesh.
double interpolate_profile(std::span<const double> mesh, std::span<const double> values,
                           double phi);
double interpolate_profile_derivative(std::span<const double> mesh,
                                      std::span<const double> values, double phi);

/// Slack of the sphere trace inequality
///   kappa_s Lambda_{N,s} f(0)^2 <= ((N-2s)/2)^2 int w f^2 + int w (f'^2 + lambda_l f^2/cos^2)
/// for a P1 function on the sector mesh (harmonic factor unit-normalized).
double sphere_trace_inequality_check(const SectorSolution& sector,
                                     std::span<const double> f_values);

/// Nodal interpolant of an analytic profile on the sector's dofs (pole value
/// forced to zero for l >= 1).
std::vector<double> nodal_interpolant(const SectorProblem& problem,
                                      const std::function<double(double)>& profile);

/// Dimension of the space of degree-l spherical harmonics on S^{N-1}.
int harmonic_multiplicity(int N, int l);

}  // namespace hardyspec

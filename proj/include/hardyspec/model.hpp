#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hardyspec {

/// Problem parameters (N, s, mu) with the derived Hardy constants.
///
/// kappa_s = Gamma(1-s) / (2^{2s-1} Gamma(s)) and
/// lambda_Ns = 2^{2s} Gamma^2((N+2s)/4) / Gamma^2((N-2s)/4);
/// the admissible couplings are mu < kappa_s * lambda_Ns.
struct ModelParams {
  int N = 3;
  double s = 0.5;
  double mu = 0.0;
  double kappa_s = 1.0;
  double lambda_Ns = 0.0;
  double mu_margin = 0.0;

  /// Builds the parameter set, filling the derived constants. A missing
  /// margin defaults to 1e-6 * kappa_s * lambda_Ns. Throws on N <= 2s or
  /// s outside (0,1); the mu bound is left to validate_params.
  static ModelParams make(int N, double s, double mu,
                          std::optional<double> mu_margin = std::nullopt);

  double hardy_bound() const { return kappa_s * lambda_Ns; }
  /// (N - 2s) / 2
  double half_gap() const { return 0.5 * (N - 2.0 * s); }
  /// (N + 2 - 2s) / 4
  double shift() const { return 0.25 * (N + 2.0 - 2.0 * s); }
};

struct HardyConstants {
  double kappa_s;
  double lambda_Ns;
};

HardyConstants compute_constants(int N, double s);

struct ValidationReport {
  std::vector<std::string> failures;
  bool accepted() const { return failures.empty(); }
};

ValidationReport validate_params(const ModelParams& params);

/// Surface area of the unit sphere S^{N-1} in R^N (2 for N = 1).
double sphere_area(int N);

/// Radial perturbation h(r, t) = (1 + b t) [A r^{-2s+eps} + B] exp(-r^2).
struct PerturbationSpec {
  double amplitude_A = 0.0;
  double amplitude_B = 0.0;
  double epsilon = 0.5;
  double time_slope = 0.0;
  double C_g = 1.0;
};

/// Throws Parameter when epsilon is outside (0, 2s).
void check_perturbation(const PerturbationSpec& spec, double s);

double perturbation_eval(const PerturbationSpec& spec, double s, double r, double t);

struct BoundCheck {
  bool holds = true;
  double max_ratio = 0.0;
  double r_at_max = 0.0;
  double t_at_max = 0.0;
};

struct RadialTimePoint {
  double r;
  double t;
};

BoundCheck check_subhomogeneous_bound(const PerturbationSpec& spec, double s,
                                      std::span<const RadialTimePoint> grid);

/// Backward heat kernel of the extension problem on R^{N+1}_+:
/// G_s(z, t) = t^{-(N+2-2s)/2} exp(-|z|^2 / (4t)).
class GaussianKernel {
 public:
  explicit GaussianKernel(const ModelParams& params) : params_(params) {}

  double value(std::span<const double> z, double t) const;
  /// grad G_s(z, t) = -(z / 2t) G_s(z, t)
  std::vector<double> gradient(std::span<const double> z, double t) const;
  /// dG_s/dt from the closed form.
  double time_derivative(std::span<const double> z, double t) const;
  /// G(z) = G_s(z, 1)
  double unit(std::span<const double> z) const { return value(z, 1.0); }

  int dimension() const { return params_.N + 1; }

 private:
  ModelParams params_;
};

}  // namespace hardyspec

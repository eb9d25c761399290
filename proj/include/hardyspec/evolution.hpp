#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hardyspec/kernels.hpp"
#include "hardyspec/model.hpp"
#include "hardyspec/ou_spectrum.hpp"

namespace hardyspec {

struct SpectralState {
  double t = 1.0;
  Eigen::VectorXd coeffs;
};

struct FrequencySample {
  double t = 0.0;
  double H = 0.0;
  double D = 0.0;
  double N = 0.0;  // NaN where H = 0
};

struct FrequencyTrace {
  std::vector<FrequencySample> samples;  // ordered from t_start down to t_end
  std::optional<double> gamma_limit;
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  std::size_t lower_bound_violations = 0;  // samples with N <= -(N+2-2s)/4
};

struct StepControl {
  double rtol = 1e-10;
  double max_log_step = 0.05;
  double sample_ratio = 1.01;
};

struct EvolutionConfig {
  ModelParams params;
  std::shared_ptr<const SpectrumTable> table;
  std::optional<PerturbationSpec> pert;
  double t_start = 1.0;
  double t_end = 1e-4;
  Eigen::VectorXd initial;
  StepControl control;
  int quadrature_order = 64;
};

/// Throws Validation on an inconsistent configuration.
void validate_evolution_config(const EvolutionConfig& config);

/// Boundary coupling M_ab(t) = int t^s h(sqrt(t) x, t) Tr Y_a Tr Y_b G(x,0) dx.
/// With the radial family each entry reduces to
///   2^p (1+4t)^{-(p+1)/2} int u^{(p-1)/2} Q_a(u/(1+4t)) Q_b(u/(1+4t)) e^{-u} du,
/// evaluated exactly by a Gauss-Laguerre rule per mode pair.
class CouplingOperator {
 public:
  CouplingOperator(const SpectrumTable& table, std::optional<PerturbationSpec> pert,
                   int order = 64);

  bool active() const { return pert_.has_value(); }
  Eigen::MatrixXd operator()(double t, Execution exec = Execution::Serial) const;
  Eigen::MatrixXd evaluate_serial(double t) const;
  Eigen::MatrixXd evaluate_parallel(double t) const;
  /// Exponent of the leading small-t decay of M: eps/2 with a singular term, s otherwise.
  double decay_exponent() const;

 private:
  struct Term {
    double power;  // radial power p
    std::vector<double> nodes;
    std::vector<double> weights;  // already multiplied by 2^p
  };
  struct Block {
    std::vector<int> rows;  // element indices of the first mode, ordered by n
    std::vector<int> cols;
    double b_row, b_col;
    std::vector<double> norm_row, norm_col;
    double trace_product;  // f_a(0) f_b(0)
    std::optional<Term> singular, bounded;
  };
  void fill_block(const Block& block, double t, Eigen::MatrixXd& out) const;

  std::size_t size_ = 0;
  double s_ = 0.5;
  std::optional<PerturbationSpec> pert_;
  std::vector<Block> blocks_;
};

Eigen::MatrixXd coupling_matrix(const SpectrumTable& table, const PerturbationSpec& pert, double t,
                                int order = 64);

struct EvolutionResult {
  std::vector<SpectralState> states;       // one per trace sample
  std::vector<Eigen::VectorXd> derivatives;  // dc/d(log t) at each state
  FrequencyTrace trace;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Dormand-Prince 5(4) in tau = log t from log t_start down to log t_end on
/// dc/dtau = Gamma c - M(e^tau) c, with per-component relative error control.
EvolutionResult evolve(const EvolutionConfig& config);
EvolutionResult evolve(const EvolutionConfig& config, const CouplingOperator& coupling);

double height(const SpectralState& state);
/// D = (sum gamma_a c_a^2 - c^T M c) / t.
double dirichlet(const SpectralState& state, const Eigen::MatrixXd& M,
                 std::span<const double> gammas);
/// N = t D / H; throws Domain when H = 0.
double frequency(const SpectralState& state, const Eigen::MatrixXd& M,
                 std::span<const double> gammas);

/// Max over interior samples of |dH/dlog t - 2tD| / max(|2tD|, H), with a
/// sixth-order central difference on the uniform log-time grid.
double verify_h_prime(const FrequencyTrace& trace);

struct VanishingFit {
  double gamma_fit = 0.0;
  double residual = 0.0;      // rms residual of log H
  double ratio = 0.0;         // max/min of t^{-2 gamma_fit} H on the window
  std::size_t samples = 0;
};

VanishingFit fit_vanishing_order(const FrequencyTrace& trace, double t_lo, double t_hi);

struct FrequencyLimit {
  double gamma_limit = 0.0;   // extrapolated when the power-law model is consistent
  double final_N = 0.0;
  bool extrapolated = false;
  double cauchy_variation = 0.0;  // max - min of N over the last decade
  bool cauchy_ok = false;
  int nearest_group = -1;
  double nearest_gamma = 0.0;
  double distance = 0.0;
};

FrequencyLimit frequency_limit(const FrequencyTrace& trace, const SpectrumTable& table,
                               double tolerance = 1e-3);

/// Hermite interpolation of the stored trajectory in log t.
Eigen::VectorXd state_at(const EvolutionResult& result, double t);

struct BetaResult {
  double Lambda = 0.0;
  int group = -1;
  double gamma = 0.0;
  std::vector<int> elements;
  std::vector<double> beta;
  std::vector<double> tail;  // estimated contribution below t_end
};

/// beta_a = Lambda^{-2 gamma} c_a(Lambda^2) + int_{-inf}^{log Lambda^2} t^{-gamma} [M(t) c(t)]_a dlog t
/// over the limit group; the part below t_end is closed with the leading power law.
BetaResult beta_coefficients(const EvolutionResult& result, const EvolutionConfig& config,
                             const CouplingOperator& coupling, const FrequencyLimit& limit,
                             double Lambda);

struct ProfileError {
  double lambda = 0.0;
  double err_L = 0.0;  // sup over tau of the L distance
  double err_H = 0.0;  // (int ||.||_H^2 dtau)^{1/2}
};

/// Distances between lambda^{-2 gamma} V(., lambda^2 tau) and tau^gamma sum beta Y
/// in coefficient space; h_gram is the H Gram matrix of the table.
ProfileError blowup_profile_error(const EvolutionResult& result, const BetaResult& beta,
                                 const Eigen::MatrixXd& h_gram,
                                 double lambda, std::span<const double> tau_grid);

std::vector<double> default_tau_grid();

struct UniquenessReport {
  bool positive = false;         // H > 0 at every sample of the run
  bool zero_stays_zero = false;  // zero data gives H = 0 at every sample
  double min_H = 0.0;
};

UniquenessReport backward_uniqueness_check(const EvolutionConfig& config);

}  // namespace hardyspec

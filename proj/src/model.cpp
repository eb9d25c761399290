#include "hardyspec/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hardyspec/error.hpp"
#include "hardyspec/special_functions.hpp"

namespace hardyspec {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Pole: return "pole";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Evolution: return "evolution";
  }
  return "unknown";
}

HardyConstants compute_constants(int N, double s) {
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::Domain, "s must lie in (0,1)");
  if (N < 1 || !(N > 2.0 * s)) throw Error(ErrorKind::Domain, "requires N >= 1 and N > 2s");
  const double kappa = gamma_fn(1.0 - s) / (std::pow(2.0, 2.0 * s - 1.0) * gamma_fn(s));
  const double ratio = gamma_fn(0.25 * (N + 2.0 * s)) / gamma_fn(0.25 * (N - 2.0 * s));
  return {kappa, std::pow(2.0, 2.0 * s) * ratio * ratio};
}

ModelParams ModelParams::make(int N, double s, double mu, std::optional<double> mu_margin) {
  const auto c = compute_constants(N, s);
  ModelParams p;
  p.N = N;
  p.s = s;
  p.mu = mu;
  p.kappa_s = c.kappa_s;
  p.lambda_Ns = c.lambda_Ns;
  p.mu_margin = mu_margin.value_or(1e-6 * c.kappa_s * c.lambda_Ns);
  return p;
}

ValidationReport validate_params(const ModelParams& p) {
  ValidationReport report;
  auto fail = [&](const std::string& msg) { report.failures.push_back(msg); };
  if (!(p.s > 0.0 && p.s < 1.0)) fail("s must lie in (0,1)");
  if (p.N < 1) fail("N must be >= 1");
  if (!(p.N > 2.0 * p.s)) fail("N > 2s fails");
  if (!report.accepted()) return report;

  const auto c = compute_constants(p.N, p.s);
  if (std::abs(p.kappa_s - c.kappa_s) > 1e-13 * std::abs(c.kappa_s))
    fail("kappa_s inconsistent with its closed form");
  if (std::abs(p.lambda_Ns - c.lambda_Ns) > 1e-13 * std::abs(c.lambda_Ns))
    fail("lambda_Ns inconsistent with its closed form");
  if (!(p.mu_margin > 0.0)) fail("mu_margin must be positive");
  if (!std::isfinite(p.mu)) fail("mu must be finite");
  const double bound = c.kappa_s * c.lambda_Ns;
  if (!(p.mu <= bound - p.mu_margin)) {
    std::ostringstream os;
    os.precision(17);
    os << "margin condition: mu = " << p.mu << " exceeds kappa_s*lambda_Ns - mu_margin = "
       << bound - p.mu_margin;
    fail(os.str());
  }
  return report;
}

double sphere_area(int N) {
  if (N < 1) throw Error(ErrorKind::Domain, "sphere_area needs N >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / gamma_fn(0.5 * N);
}

void check_perturbation(const PerturbationSpec& spec, double s) {
  if (!(spec.epsilon > 0.0 && spec.epsilon < 2.0 * s))
    throw Error(ErrorKind::Parameter, "perturbation epsilon must lie in (0, 2s)");
  if (!(spec.C_g > 0.0)) throw Error(ErrorKind::Parameter, "perturbation C_g must be positive");
  if (!std::isfinite(spec.amplitude_A) || !std::isfinite(spec.amplitude_B) ||
      !std::isfinite(spec.time_slope))
    throw Error(ErrorKind::Parameter, "perturbation coefficients must be finite");
}

double perturbation_eval(const PerturbationSpec& spec, double s, double r, double t) {
  if (r < 0.0) throw Error(ErrorKind::Domain, "perturbation radius must be >= 0");
  double radial = spec.amplitude_B;
  if (spec.amplitude_A != 0.0) {
    if (r == 0.0) throw Error(ErrorKind::Singularity, "singular perturbation term at r = 0");
    radial += spec.amplitude_A * std::pow(r, -2.0 * s + spec.epsilon);
  }
  return (1.0 + spec.time_slope * t) * radial * std::exp(-r * r);
}

BoundCheck check_subhomogeneous_bound(const PerturbationSpec& spec, double s,
                                      std::span<const RadialTimePoint> grid) {
  if (grid.empty()) throw Error(ErrorKind::Parameter, "bound check needs a nonempty grid");
  BoundCheck out;
  for (const auto& pt : grid) {
    if (!(pt.r > 0.0)) throw Error(ErrorKind::Domain, "bound check needs r > 0");
    const double h = std::abs(perturbation_eval(spec, s, pt.r, pt.t));
    const double ratio = h / (spec.C_g * (1.0 + std::pow(pt.r, -2.0 * s + spec.epsilon)));
    if (ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.r_at_max = pt.r;
      out.t_at_max = pt.t;
    }
  }
  out.holds = out.max_ratio <= 1.0;
  return out;
}

namespace {
double squared_norm(std::span<const double> z) {
  double sum = 0.0;
  for (double v : z) sum += v * v;
  return sum;
}
}  // namespace

double GaussianKernel::value(std::span<const double> z, double t) const {
  if (!(t > 0.0)) throw Error(ErrorKind::Domain, "Gaussian kernel needs t > 0");
  const double power = 0.5 * (params_.N + 2.0 - 2.0 * params_.s);
  return std::pow(t, -power) * std::exp(-squared_norm(z) / (4.0 * t));
}

std::vector<double> GaussianKernel::gradient(std::span<const double> z, double t) const {
  const double g = value(z, t);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = -z[i] / (2.0 * t) * g;
  return out;
}

double GaussianKernel::time_derivative(std::span<const double> z, double t) const {
  const double power = 0.5 * (params_.N + 2.0 - 2.0 * params_.s);
  return value(z, t) * (-power / t + squared_norm(z) / (4.0 * t * t));
}

}  // namespace hardyspec

#include "hardyspec/ou_spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "hardyspec/error.hpp"
#include "hardyspec/special_functions.hpp"

namespace hardyspec {

Alpha alpha_exponent(double nu, const ModelParams& params) {
  const double half = params.half_gap();
  const double radicand = half * half + nu;
  if (!(radicand > 0.0))
    throw Error(ErrorKind::Domain, "alpha_exponent: nu at or below -((N-2s)/2)^2");
  return {half - std::sqrt(radicand), radicand < 1e-8 * half * half};
}

double normalization_constant(int n, double a, double alpha, const ModelParams& params) {
  if (n < 0) throw Error(ErrorKind::Domain, "normalization_constant needs n >= 0");
  if (!(a > -1.0)) throw Error(ErrorKind::Domain, "normalization_constant needs a > -1");
  const double log_sq = (params.N + 1.0 - 2.0 * params.s - 2.0 * alpha) * std::log(2.0) -
                        2.0 * std::log(binom_shifted(n, a)) + std::lgamma(n + a + 1.0) -
                        std::lgamma(n + 1.0);
  return std::exp(0.5 * log_sq);
}

int SpectrumTable::group_of(int element) const {
  for (std::size_t g = 0; g < groups.size(); ++g)
    if (std::find(groups[g].begin(), groups[g].end(), element) != groups[g].end())
      return static_cast<int>(g);
  return -1;
}

int SpectrumTable::find(int n, int j) const {
  for (std::size_t i = 0; i < elements.size(); ++i)
    if (elements[i].n == n && elements[i].j == j) return static_cast<int>(i);
  return -1;
}

std::vector<double> SpectrumTable::gammas() const {
  std::vector<double> out;
  out.reserve(elements.size());
  for (const auto& e : elements) out.push_back(e.gamma);
  return out;
}

SpectrumTable build_spectrum(std::shared_ptr<const AngularSpectrum> angular, int n_max, int j_max,
                             double tie_tolerance) {
  if (!angular || angular->ranking.empty())
    throw Error(ErrorKind::Parameter, "build_spectrum needs angular modes");
  if (n_max < 0) throw Error(ErrorKind::Parameter, "build_spectrum needs n_max >= 0");
  SpectrumTable table;
  table.params = angular->params;
  table.angular = angular;
  table.tie_tolerance = tie_tolerance;

  const std::size_t modes = j_max > 0 ? std::min<std::size_t>(j_max, angular->ranking.size())
                                      : angular->ranking.size();
  for (std::size_t k = 0; k < modes; ++k) {
    const auto& [si, mi] = angular->ranking[k];
    const auto& mode = angular->sectors[si].modes[mi];
    const auto alpha = alpha_exponent(mode.nu, table.params);
    const double a = table.params.half_gap() - alpha.value;
    for (int n = 0; n <= n_max; ++n) {
      OUBasisElement e;
      e.n = n;
      e.j = static_cast<int>(k + 1);
      e.l = mode.l;
      e.sector = si;
      e.mode = mi;
      e.nu = mode.nu;
      e.nu_error = mode.nu_error;
      e.alpha = alpha.value;
      e.a = a;
      e.gamma = n - 0.5 * alpha.value;
      e.norm_const = normalization_constant(n, a, alpha.value, table.params);
      e.equator_trace = mode.equator_trace;
      table.elements.push_back(e);
    }
  }
  std::stable_sort(table.elements.begin(), table.elements.end(), [](const auto& x, const auto& y) {
    if (x.gamma != y.gamma) return x.gamma < y.gamma;
    if (x.j != y.j) return x.j < y.j;
    return x.n < y.n;
  });

  // Sorted gammas; a gap larger than the tolerance starts a new group.
  for (std::size_t i = 0; i < table.elements.size(); ++i) {
    if (i == 0 || table.elements[i].gamma - table.elements[i - 1].gamma > tie_tolerance)
      table.groups.emplace_back();
    table.groups.back().push_back(static_cast<int>(i));
  }
  for (const auto& g : table.groups) {
    double sum = 0.0;
    for (int i : g) sum += table.elements[i].gamma;
    table.group_gamma.push_back(sum / g.size());
  }
  return table;
}

int group_multiplicity(const SpectrumTable& table, double gamma) {
  int count = 0;
  int n_max = 0;
  for (const auto& e : table.elements) n_max = std::max(n_max, e.n);
  std::vector<int> seen;
  for (const auto& e : table.elements) {
    if (std::find(seen.begin(), seen.end(), e.j) != seen.end()) continue;
    seen.push_back(e.j);
    const double m = gamma + 0.5 * e.alpha;
    const double nearest = std::round(m);
    if (std::abs(m - nearest) <= table.tie_tolerance && nearest >= 0.0 && nearest <= n_max) ++count;
  }
  return count;
}

double eval_radial(const OUBasisElement& element, double r) {
  if (r < 0.0) throw Error(ErrorKind::Domain, "radius must be >= 0");
  // |alpha| below the eigensolver's rounding floor counts as zero at the origin
  constexpr double kAlphaFloor = 1e-10;
  if (r == 0.0 && element.alpha > kAlphaFloor)
    throw Error(ErrorKind::Singularity, "eigenfunction is unbounded at the origin for alpha > 0");
  const double power = r == 0.0 ? (std::abs(element.alpha) <= kAlphaFloor ? 1.0 : 0.0)
                                : std::pow(r, -element.alpha);
  return power * p_poly(element.n, element.b_param(), 0.25 * r * r) / element.norm_const;
}

double eval_eigenfunction(const SpectrumTable& table, const OUBasisElement& element, double r,
                          double phi, std::optional<double> harmonic_value) {
  double harmonic;
  if (element.l == 0) {
    harmonic = harmonic_value.value_or(1.0 / std::sqrt(sphere_area(table.params.N)));
  } else {
    if (!harmonic_value)
      throw Error(ErrorKind::Parameter, "eval_eigenfunction: l >= 1 needs the harmonic value");
    harmonic = *harmonic_value;
  }
  const auto& sector = table.sector(element);
  const auto& mode = table.mode(element);
  const double f = interpolate_profile(sector.problem.mesh, mode.f_values, phi);
  return eval_radial(element, r) * f * harmonic;
}

}  // namespace hardyspec

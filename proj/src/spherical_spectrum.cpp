#include "hardyspec/spherical_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>

#include "hardyspec/error.hpp"
#include "hardyspec/quadrature.hpp"

namespace hardyspec {

namespace {
constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr int kElementOrder = 10;
}  // namespace

std::vector<double> SymTridiag::apply(std::span<const double> x) const {
  const std::size_t n = size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag[i] * x[i];
    if (i > 0) v += off[i - 1] * x[i - 1];
    if (i + 1 < n) v += off[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

double SymTridiag::quad(std::span<const double> x, std::span<const double> y) const {
  const auto ay = apply(y);
  double sum = 0.0;
  for (std::size_t i = 0; i < size(); ++i) sum += x[i] * ay[i];
  return sum;
}

int harmonic_multiplicity(int N, int l) {
  if (l < 0) return 0;
  if (N == 1) return l <= 1 ? 1 : 0;
  auto binom = [](int n, int k) {
    if (k < 0 || n < k) return 0.0;
    double out = 1.0;
    for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
  };
  return static_cast<int>(std::lround(binom(l + N - 1, N - 1) - binom(l + N - 3, N - 1)));
}

SectorProblem SectorProblem::make(const ModelParams& params, int l, int elements,
                                  std::optional<double> grading) {
  if (elements < 16) throw Error(ErrorKind::Validation, "sector mesh needs >= 16 intervals");
  const double q = grading.value_or(1.0 / std::min(1.0, 2.0 * params.s));
  if (!(q >= 1.0)) throw Error(ErrorKind::Validation, "mesh grading exponent must be >= 1");
  SectorProblem p;
  p.params = params;
  p.l = l;
  p.lambda_l = static_cast<double>(l) * (l + params.N - 2);
  p.mesh.resize(elements + 1);
  for (int i = 0; i <= elements; ++i)
    p.mesh[i] = kHalfPi * std::pow(static_cast<double>(i) / elements, q);
  p.mesh.back() = kHalfPi;
  check_sector_problem(p);
  return p;
}

void check_sector_problem(const SectorProblem& p) {
  if (p.l < 0) throw Error(ErrorKind::Validation, "harmonic degree must be >= 0");
  if (harmonic_multiplicity(p.params.N, p.l) == 0)
    throw Error(ErrorKind::Validation, "no spherical harmonics of this degree on S^{N-1}");
  if (p.mesh.size() < 17) throw Error(ErrorKind::Validation, "sector mesh needs >= 16 intervals");
  if (p.mesh.front() != 0.0 || std::abs(p.mesh.back() - kHalfPi) > 1e-14)
    throw Error(ErrorKind::Validation, "sector mesh must span [0, pi/2]");
  for (std::size_t i = 1; i < p.mesh.size(); ++i)
    if (!(p.mesh[i] > p.mesh[i - 1]))
      throw Error(ErrorKind::Validation, "sector mesh must be strictly increasing");
  if (p.lambda_l != static_cast<double>(p.l) * (p.l + p.params.N - 2))
    throw Error(ErrorKind::Validation, "lambda_l inconsistent with l and N");
}

SectorMatrices assemble_sector(const SectorProblem& problem) {
  check_sector_problem(problem);
  const auto& mesh = problem.mesh;
  const std::size_t nodes = mesh.size();
  const std::size_t dofs = problem.dofs();
  const double s = problem.params.s;
  const int N = problem.params.N;
  const double beta = 1.0 - 2.0 * s;

  SectorMatrices out;
  for (auto* m : {&out.stiffness_no_mu, &out.mass}) {
    m->diag.assign(dofs, 0.0);
    m->off.assign(dofs - 1, 0.0);
  }
  const auto gl = gauss_legendre_rule(kElementOrder);
  const auto gj = gauss_jacobi_rule(kElementOrder, 0.0, beta);

  for (std::size_t e = 0; e + 1 < nodes; ++e) {
    const double x0 = mesh[e], x1 = mesh[e + 1], h = x1 - x0;
    // first element: the Jacobi weight carries phi^{1-2s}
    const bool first = e == 0;
    const auto rule = map_to_interval(first ? gj : gl, x0, x1);
    double k[2][2] = {}, m[2][2] = {};
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double phi = rule.nodes[q];
      const double c = std::cos(phi);
      const double w_rest = first ? (phi > 0.0 ? std::pow(std::sin(phi) / phi, beta) : 1.0)
                                  : std::pow(std::sin(phi), beta);
      const double w = rule.weights[q] * w_rest * std::pow(c, N - 1);
      const double psi[2] = {(x1 - phi) / h, (phi - x0) / h};
      const double dpsi[2] = {-1.0 / h, 1.0 / h};
      const double potential = problem.lambda_l > 0.0 ? problem.lambda_l / (c * c) : 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          m[a][b] += w * psi[a] * psi[b];
          k[a][b] += w * (dpsi[a] * dpsi[b] + potential * psi[a] * psi[b]);
        }
    }
    const std::size_t g[2] = {e, e + 1};
    for (int a = 0; a < 2; ++a) {
      if (g[a] >= dofs) continue;
      out.mass.diag[g[a]] += m[a][a];
      out.stiffness_no_mu.diag[g[a]] += k[a][a];
    }
    if (g[1] < dofs) {
      out.mass.off[e] += m[0][1];
      out.stiffness_no_mu.off[e] += k[0][1];
    }
  }
  for (const auto* m : {&out.stiffness_no_mu, &out.mass})
    for (double v : m->diag)
      if (!std::isfinite(v)) throw Error(ErrorKind::Singularity, "non-finite sector element integral");
  out.stiffness = out.stiffness_no_mu;
  out.stiffness.diag[0] -= problem.params.mu;
  return out;
}

namespace {

// Number of eigenvalues of the pencil (A, B) below sigma (Sylvester inertia of A - sigma B).
std::size_t count_below(const SymTridiag& A, const SymTridiag& B, double sigma) {
  const std::size_t n = A.size();
  std::size_t count = 0;
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = A.diag[i] - sigma * B.diag[i];
    if (i > 0) {
      const double e = A.off[i - 1] - sigma * B.off[i - 1];
      v -= e * e / d;
    }
    if (v == 0.0) v = -std::numeric_limits<double>::min();
    if (v < 0.0) ++count;
    d = v;
  }
  return count;
}

// Gaussian elimination with partial pivoting for a general tridiagonal system.
void solve_tridiagonal(std::vector<double> dl, std::vector<double> d, std::vector<double> du,
                       std::vector<double>& b) {
  const std::size_t n = d.size();
  const double tiny = std::numeric_limits<double>::epsilon() *
                      std::max(1e-300, *std::max_element(d.begin(), d.end(),
                                                         [](double x, double y) { return std::abs(x) < std::abs(y); }));
  auto guard = [&](double& v) {
    if (v == 0.0) v = std::abs(tiny);
  };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const bool last = i + 2 == n;
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      guard(d[i]);
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b[i + 1] -= fact * b[i];
      dl[i] = 0.0;
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (!last) {
        dl[i] = du[i + 1];
        du[i + 1] = -fact * dl[i];
      } else {
        dl[i] = 0.0;
      }
      du[i] = temp;
      const double tb = b[i];
      b[i] = b[i + 1];
      b[i + 1] = tb - fact * b[i + 1];
    }
  }
  guard(d[n - 1]);
  b[n - 1] /= d[n - 1];
  if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
  for (std::size_t i = n - 2; i-- > 0;)
    b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
}

}  // namespace

std::vector<AngularMode> solve_sector(const SectorProblem& problem, int count) {
  return solve_sector(problem, assemble_sector(problem), count);
}

std::vector<AngularMode> solve_sector(const SectorProblem& problem,
                                      const SectorMatrices& matrices, int count) {
  const auto& A = matrices.stiffness;
  const auto& B = matrices.mass;
  const std::size_t n = A.size();
  if (count < 1 || static_cast<std::size_t>(count) > n)
    throw Error(ErrorKind::Parameter, "solve_sector: count must lie in [1, dofs]");

  double lo = -std::pow(problem.params.half_gap(), 2) - 1.0;
  for (int it = 0; count_below(A, B, lo) > 0; ++it) {
    if (it > 200) throw Error(ErrorKind::Convergence, "solve_sector: no lower spectral bound");
    lo = 2.0 * lo - 1.0;
  }
  double hi = 1.0;
  for (int it = 0; count_below(A, B, hi) < static_cast<std::size_t>(count); ++it) {
    if (it > 200) throw Error(ErrorKind::Convergence, "solve_sector: no upper spectral bound");
    hi *= 2.0;
  }

  std::vector<AngularMode> modes(count);
  for (int k = 0; k < count; ++k) {
    double a = lo, b = hi;
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (count_below(A, B, mid) > static_cast<std::size_t>(k)) b = mid;
      else a = mid;
      if (b - a <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)))
        break;
    }
    const double nu = 0.5 * (a + b);

    // inverse iteration on (A - nu B) x = B y
    std::vector<double> dl(n - 1), d(n), du(n - 1);
    for (std::size_t i = 0; i < n; ++i) d[i] = A.diag[i] - nu * B.diag[i];
    for (std::size_t i = 0; i + 1 < n; ++i) dl[i] = du[i] = A.off[i] - nu * B.off[i];
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.25 * std::sin(0.7 * i + 0.3 * k);
    for (int it = 0; it < 4; ++it) {
      auto rhs = B.apply(x);
      solve_tridiagonal(dl, d, du, rhs);
      const double norm = std::sqrt(B.quad(rhs, rhs));
      if (!std::isfinite(norm) || norm == 0.0)
        throw Error(ErrorKind::Convergence, "solve_sector: inverse iteration failed");
      for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / norm;
    }
    double sign = x[0] < 0.0 ? -1.0 : 1.0;
    if (std::abs(x[0]) <= 1e-12 * std::abs(*std::max_element(x.begin(), x.end(), [](double p, double q) {
          return std::abs(p) < std::abs(q);
        }))) {
      for (double v : x)
        if (std::abs(v) > 1e-8) {
          sign = v < 0.0 ? -1.0 : 1.0;
          break;
        }
    }
    for (double& v : x) v *= sign;

    auto& mode = modes[k];
    mode.l = problem.l;
    mode.sector_rank = k;
    // the Rayleigh quotient of the converged vector is accurate to roundoff, unlike the
    // bisection bracket whose width is set by the inertia count's rounding
    const double rq = A.quad(x, x) / B.quad(x, x);
    mode.nu = mode.nu_discrete = std::abs(rq - nu) <= 1e-6 * std::max(1.0, std::abs(nu)) ? rq : nu;
    mode.sphere_norm = B.quad(x, x);
    mode.f_values = x;
    mode.f_values.resize(problem.mesh.size(), 0.0);
    mode.equator_trace = mode.f_values[0];
  }
  return modes;
}

double equator_trace(const AngularMode& mode) { return mode.equator_trace; }

namespace {

double extrapolate(double v1, double v2, double v3) {
  const double d1 = v1 - v2, d2 = v2 - v3;
  if (std::abs(d2) <= 1e-13 * std::max(1.0, std::abs(v3))) return v3;
  const double q = d1 / d2;
  if (!(q > 1.5)) return v3;
  return v3 - d2 / (q - 1.0);
}

}  // namespace

SectorSolution solve_sector_refined(const ModelParams& params, int l, int count, int elements,
                                    int levels, std::optional<double> grading) {
  if (levels < 1) throw Error(ErrorKind::Validation, "refinement levels must be >= 1");
  std::vector<std::vector<double>> history(count);
  SectorSolution out;
  out.refinement_levels = levels;
  for (int level = 0; level < levels; ++level) {
    auto problem = SectorProblem::make(params, l, elements << level, grading);
    auto matrices = assemble_sector(problem);
    auto modes = solve_sector(problem, matrices, count);
    for (int k = 0; k < count; ++k) history[k].push_back(modes[k].nu_discrete);
    if (level + 1 == levels) {
      out.problem = std::move(problem);
      out.matrices = std::move(matrices);
      out.modes = std::move(modes);
    }
  }
  if (levels >= 3) {
    for (int k = 0; k < count; ++k) {
      const auto& h = history[k];
      auto& mode = out.modes[k];
      mode.nu = extrapolate(h[levels - 3], h[levels - 2], h[levels - 1]);
      mode.nu_error = std::abs(mode.nu - mode.nu_discrete);
    }
  }
  return out;
}

int AngularSpectrum::sector_of_l(int l) const {
  for (std::size_t i = 0; i < sectors.size(); ++i)
    if (sectors[i].problem.l == l) return static_cast<int>(i);
  return -1;
}

AngularSpectrum solve_angular_spectrum(const ModelParams& params,
                                       std::span<const SectorRequest> requests, int elements,
                                       int levels, std::optional<double> grading) {
  if (requests.empty()) throw Error(ErrorKind::Validation, "at least one sector is required");
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (requests[i].modes < 1) throw Error(ErrorKind::Validation, "sector mode count must be >= 1");
    for (std::size_t j = 0; j < i; ++j)
      if (requests[i].l == requests[j].l) throw Error(ErrorKind::Validation, "duplicate sector l");
  }
  AngularSpectrum out;
  out.params = params;
  out.sectors.resize(requests.size());
  std::exception_ptr failure;
  const int n = static_cast<int>(requests.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      out.sectors[i] = solve_sector_refined(params, requests[i].l, requests[i].modes, elements,
                                            levels, grading);
    } catch (...) {
#pragma omp critical
      failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t si = 0; si < out.sectors.size(); ++si)
    for (std::size_t mi = 0; mi < out.sectors[si].modes.size(); ++mi)
      out.ranking.emplace_back(static_cast<int>(si), static_cast<int>(mi));
  std::stable_sort(out.ranking.begin(), out.ranking.end(), [&](const auto& x, const auto& y) {
    const auto& a = out.sectors[x.first].modes[x.second];
    const auto& b = out.sectors[y.first].modes[y.second];
    if (a.nu != b.nu) return a.nu < b.nu;
    return a.l < b.l;
  });
  for (std::size_t k = 0; k < out.ranking.size(); ++k) {
    const auto& [si, mi] = out.ranking[k];
    out.sectors[si].modes[mi].index_k = static_cast<int>(k + 1);
  }
  return out;
}

namespace {
std::size_t locate(std::span<const double> mesh, double phi) {
  if (phi < mesh.front() || phi > mesh.back())
    throw Error(ErrorKind::Domain, "angle outside the sector mesh");
  auto it = std::upper_bound(mesh.begin(), mesh.end(), phi);
  std::size_t i = static_cast<std::size_t>(it - mesh.begin());
  return i == 0 ? 0 : std::min(i - 1, mesh.size() - 2);
}
}  // namespace

double interpolate_profile(std::span<const double> mesh, std::span<const double> values,
                           double phi) {
  const std::size_t i = locate(mesh, phi);
  const double t = (phi - mesh[i]) / (mesh[i + 1] - mesh[i]);
  return (1.0 - t) * values[i] + t * values[i + 1];
}

double interpolate_profile_derivative(std::span<const double> mesh,
                                      std::span<const double> values, double phi) {
  const std::size_t i = locate(mesh, phi);
  return (values[i + 1] - values[i]) / (mesh[i + 1] - mesh[i]);
}

double sphere_trace_inequality_check(const SectorSolution& sector,
                                     std::span<const double> f_values) {
  const std::size_t dofs = sector.problem.dofs();
  if (f_values.size() < dofs) throw Error(ErrorKind::Parameter, "profile shorter than the sector dofs");
  const auto f = f_values.first(dofs);
  const auto& p = sector.problem.params;
  const double rhs = std::pow(p.half_gap(), 2) * sector.matrices.mass.quad(f, f) +
                     sector.matrices.stiffness_no_mu.quad(f, f);
  return rhs - p.hardy_bound() * f[0] * f[0];
}

std::vector<double> nodal_interpolant(const SectorProblem& problem,
                                      const std::function<double(double)>& profile) {
  std::vector<double> out(problem.mesh.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = profile(problem.mesh[i]);
  if (problem.l >= 1) out.back() = 0.0;
  return out;
}

}  // namespace hardyspec

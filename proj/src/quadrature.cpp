#include "hardyspec/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "hardyspec/error.hpp"
#include "hardyspec/special_functions.hpp"

namespace hardyspec {

TridiagEigen symtridiag_eigen(std::span<const double> diagonal,
                              std::span<const double> offdiagonal) {
  const std::size_t n = diagonal.size();
  if (n == 0) throw Error(ErrorKind::Parameter, "symtridiag_eigen: empty matrix");
  if (offdiagonal.size() + 1 != n)
    throw Error(ErrorKind::Parameter, "symtridiag_eigen: offdiagonal length must be n-1");

  std::vector<double> d(diagonal.begin(), diagonal.end());
  std::vector<double> e(n, 0.0);
  std::copy(offdiagonal.begin(), offdiagonal.end(), e.begin());
  std::vector<double> z(n, 0.0);  // first row of the accumulated rotations
  z[0] = 1.0;

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (++iter > 60) throw Error(ErrorKind::Convergence, "symtridiag_eigen: iteration cap reached");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        std::size_t i = m;
        bool underflow = false;
        while (i-- > l) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          f = z[i + 1];
          z[i + 1] = s * z[i] + c * f;
          z[i] = c * z[i] - s * f;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return d[a] < d[b]; });
  TridiagEigen out;
  out.eigenvalues.reserve(n);
  out.first_components.reserve(n);
  for (auto i : order) {
    out.eigenvalues.push_back(d[i]);
    out.first_components.push_back(z[i]);
  }
  return out;
}

namespace {

// Monic three-term recurrence x p_k = p_{k+1} + a_k p_k + b_k p_{k-1}; b holds b_k (squared
// Jacobi off-diagonals) with b[0] unused.
struct Recurrence {
  std::vector<double> a;
  std::vector<double> b;
  double mu0;
};

Recurrence jacobi_recurrence(int n, double alpha, double beta) {
  Recurrence rec{std::vector<double>(n), std::vector<double>(n, 0.0), 0.0};
  const double ab = alpha + beta;
  rec.a[0] = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    rec.a[k] = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    if (k == 1) {
      rec.b[k] = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      rec.b[k] = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
  }
  rec.mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                     std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
  return rec;
}

Recurrence laguerre_recurrence(int n, double a) {
  Recurrence rec{std::vector<double>(n), std::vector<double>(n, 0.0), gamma_fn(a + 1.0)};
  for (int k = 0; k < n; ++k) {
    rec.a[k] = 2.0 * k + a + 1.0;
    if (k > 0) rec.b[k] = k * (k + a);
  }
  return rec;
}

struct OrthonormalEval {
  double value;       // p_n(x), scaled by exp(-log_scale)
  double derivative;  // p_n'(x), same scaling
  double christoffel; // 1 / sum_{k<n} p_k(x)^2, unscaled
};

// Orthonormal recurrence with rescaling so that large Laguerre nodes do not
// overflow the sum of squares.
OrthonormalEval orthonormal_eval(const Recurrence& rec, double x) {
  const int n = static_cast<int>(rec.a.size());
  double p_prev = 0.0, p = 1.0 / std::sqrt(rec.mu0);
  double dp_prev = 0.0, dp = 0.0;
  double sum = 0.0;
  double log_scale = 0.0;
  for (int k = 0; k < n; ++k) {
    sum += p * p;
    const double sb_next = k + 1 < n ? std::sqrt(rec.b[k + 1]) : 1.0;
    const double sb = k > 0 ? std::sqrt(rec.b[k]) : 0.0;
    // the final step produces a multiple of the monic degree-n polynomial; only its roots matter
    const double p_next = ((x - rec.a[k]) * p - sb * p_prev) / sb_next;
    const double dp_next = ((x - rec.a[k]) * dp + p - sb * dp_prev) / sb_next;
    p_prev = p;
    p = p_next;
    dp_prev = dp;
    dp = dp_next;
    if (std::abs(p) > 1e120 || std::abs(p_prev) > 1e120) {
      constexpr double shrink = 1e-120;
      p *= shrink;
      p_prev *= shrink;
      dp *= shrink;
      dp_prev *= shrink;
      sum *= shrink * shrink;
      log_scale += -std::log(shrink);
    }
  }
  return {p, dp, std::exp(-2.0 * log_scale) / sum};
}

QuadratureRule golub_welsch(const Recurrence& rec, WeightKind kind, double alpha, double beta) {
  const int n = static_cast<int>(rec.a.size());
  std::vector<double> off(n > 0 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(rec.b[k]);
  const auto eig = symtridiag_eigen(rec.a, off);

  QuadratureRule rule;
  rule.kind = kind;
  rule.alpha = alpha;
  rule.beta = beta;
  rule.order = n;
  rule.nodes = eig.eigenvalues;
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = rule.nodes[i];
    for (int it = 0; it < 3; ++it) {
      const auto ev = orthonormal_eval(rec, x);
      if (ev.derivative == 0.0) break;
      const double dx = ev.value / ev.derivative;
      if (!std::isfinite(dx)) break;
      x -= dx;
      if (std::abs(dx) <= 1e-16 * std::abs(x)) break;
    }
    // keep Newton only if it stays between the neighbouring QL nodes
    const double lo = i > 0 ? eig.eigenvalues[i - 1] : -std::numeric_limits<double>::infinity();
    const double hi = i + 1 < n ? eig.eigenvalues[i + 1] : std::numeric_limits<double>::infinity();
    if (x > lo && x < hi) rule.nodes[i] = x;
    rule.weights[i] = orthonormal_eval(rec, rule.nodes[i]).christoffel;
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_jacobi_rule(int order, double alpha, double beta) {
  if (order < 1) throw Error(ErrorKind::Parameter, "quadrature order must be >= 1");
  if (!(alpha > -1.0) || !(beta > -1.0))
    throw Error(ErrorKind::Parameter, "Jacobi exponents must exceed -1");
  return golub_welsch(jacobi_recurrence(order, alpha, beta), WeightKind::Jacobi, alpha, beta);
}

QuadratureRule gauss_legendre_rule(int order) { return gauss_jacobi_rule(order, 0.0, 0.0); }

QuadratureRule gauss_laguerre_rule(int order, double a) {
  if (order < 1) throw Error(ErrorKind::Parameter, "quadrature order must be >= 1");
  if (!(a > -1.0)) throw Error(ErrorKind::Parameter, "Laguerre parameter must exceed -1");
  return golub_welsch(laguerre_recurrence(order, a), WeightKind::GeneralizedLaguerre, a, 0.0);
}

QuadratureRule map_to_interval(const QuadratureRule& rule, double lo, double hi) {
  if (rule.kind != WeightKind::Jacobi)
    throw Error(ErrorKind::Parameter, "map_to_interval applies to Jacobi rules only");
  QuadratureRule out = rule;
  const double half = 0.5 * (hi - lo);
  const double jac = std::pow(half, 1.0 + rule.alpha + rule.beta);
  for (std::size_t i = 0; i < out.nodes.size(); ++i) {
    out.nodes[i] = lo + half * (rule.nodes[i] + 1.0);
    out.weights[i] *= jac;
  }
  return out;
}

namespace {

const QuadratureRule& cached_laguerre(int order, double a) {
  static std::mutex mutex;
  static std::map<std::pair<int, double>, QuadratureRule> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(order, a);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, gauss_laguerre_rule(order, a)).first;
  return it->second;
}

}  // namespace

double radial_moment(double p, const std::function<double(double)>& F, int order) {
  if (!(p > -1.0)) throw Error(ErrorKind::Parameter, "radial moment exponent must exceed -1");
  const auto& rule = cached_laguerre(order, 0.5 * (p - 1.0));
  return std::pow(2.0, p) * rule.integrate(F);
}

double halfspace_gaussian_integral(const std::function<double(double)>& F, double angular_value,
                                   const ModelParams& params, double sigma, int order) {
  const double p = params.N + 1.0 - 2.0 * params.s - 2.0 * sigma;
  if (!(0.5 * (p - 1.0) > -1.0))
    throw Error(ErrorKind::Parameter, "effective Laguerre exponent must exceed -1");
  return radial_moment(p, F, order) * angular_value;
}

double trace_gaussian_integral(const std::function<double(double)>& radial,
                               const ModelParams& params, double singular_power, int order,
                               double grading, int panels) {
  if (!(singular_power > -1.0))
    throw Error(ErrorKind::Singularity, "non-integrable singularity at the origin");
  if (panels < 2 || order < 1 || !(grading >= 1.0))
    throw Error(ErrorKind::Parameter, "trace integral needs panels >= 2, order >= 1, grading >= 1");
  const int N = params.N;
  auto integrand = [&](double r) { return radial(r) * std::pow(r, N - 1) * std::exp(-0.25 * r * r); };
  const auto gl = gauss_legendre_rule(order);
  const auto gj = gauss_jacobi_rule(order, 0.0, singular_power);

  auto partial = [&](double R) {
    double sum = 0.0;
    const double r1 = R * std::pow(1.0 / panels, grading);
    const auto first = map_to_interval(gj, 0.0, r1);
    for (std::size_t i = 0; i < first.nodes.size(); ++i) {
      const double r = first.nodes[i];
      sum += first.weights[i] * integrand(r) / std::pow(r, singular_power);
    }
    for (int k = 1; k < panels; ++k) {
      const double lo = R * std::pow(static_cast<double>(k) / panels, grading);
      const double hi = R * std::pow(static_cast<double>(k + 1) / panels, grading);
      const auto rule = map_to_interval(gl, lo, hi);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * integrand(rule.nodes[i]);
    }
    return sum;
  };

  double R = 10.0;
  double sum = partial(R);
  while (std::abs(integrand(R)) * 2.0 / R > 1e-14 * std::abs(sum)) {
    R += 2.0;
    if (R > 200.0) throw Error(ErrorKind::Convergence, "trace integral tail does not decay");
    sum = partial(R);
  }
  return sphere_area(N) * sum;
}

double sector_measure(const ModelParams& params) {
  const double b = 0.5 * params.N;
  const double one_minus_s = 1.0 - params.s;
  return 0.5 * std::exp(std::lgamma(one_minus_s) + std::lgamma(b) - std::lgamma(one_minus_s + b));
}

}  // namespace hardyspec

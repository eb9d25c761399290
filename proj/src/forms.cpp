#include "hardyspec/forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "hardyspec/error.hpp"
#include "hardyspec/quadrature.hpp"
#include "hardyspec/special_functions.hpp"

namespace hardyspec {

SeparableFunction as_separable(const SpectrumTable& table, std::size_t element) {
  const auto& e = table.elements.at(element);
  SeparableFunction u;
  u.sector = e.sector;
  u.alpha = e.alpha;
  const int n = e.n;
  const double b = e.b_param();
  const double norm = e.norm_const;
  u.Q = [n, b, norm](double t) { return p_poly(n, b, t) / norm; };
  u.dQ = [n, b, norm](double t) { return p_poly_derivative(n, b, t) / norm; };
  u.f = table.mode(e).f_values;
  return u;
}

PairForms pair_forms(const AngularSpectrum& angular, const SeparableFunction& u,
                     const SeparableFunction& v, int order) {
  PairForms out;
  if (u.sector != v.sector) return out;
  const auto& sector = angular.sectors.at(u.sector);
  const std::size_t dofs = sector.problem.dofs();
  if (u.f.size() < dofs || v.f.size() < dofs)
    throw Error(ErrorKind::Parameter, "angular profile shorter than the sector dofs");
  const std::span<const double> fu(u.f.data(), dofs), fv(v.f.data(), dofs);
  const double m = sector.matrices.mass.quad(fu, fv);
  const double k0 = sector.matrices.stiffness_no_mu.quad(fu, fv);
  const double f00 = fu[0] * fv[0];

  const auto& p = angular.params;
  const double base = p.N - 2.0 * p.s - u.alpha - v.alpha;
  auto qq = [&](double t) { return u.Q(t) * v.Q(t); };
  auto ss = [&](double t) {
    return (-u.alpha * u.Q(t) + 2.0 * t * u.dQ(t)) * (-v.alpha * v.Q(t) + 2.0 * t * v.dQ(t));
  };
  const double i1 = radial_moment(base + 1.0, qq, order);
  const double i0 = radial_moment(base - 1.0, qq, order);
  const double j = radial_moment(base - 1.0, ss, order);
  const double i2 = radial_moment(base + 3.0, qq, order);
  const double tm = radial_moment(base - 1.0 + 2.0 * p.s, qq, order);

  out.mass = i1 * m;
  out.gradient = j * m + i0 * k0;
  out.inverse_square = i0 * m;
  out.square = i2 * m;
  out.trace_hardy = f00 * i0;
  out.trace_mass = f00 * tm;
  return out;
}

FormMatrices assemble_forms(const SpectrumTable& table, int order, Execution exec) {
  const std::size_t n = table.size();
  std::vector<SeparableFunction> basis;
  basis.reserve(n);
  for (std::size_t i = 0; i < n; ++i) basis.push_back(as_separable(table, i));

  FormMatrices out;
  for (auto* m : {&out.gradient, &out.inverse_square, &out.square, &out.trace_hardy, &out.trace_mass})
    m->setZero(n, n);
  // one quadrature pass per pair fills all six matrices; entries are disjoint per pair
  out.mass = assemble_symmetric(
      n,
      [&](std::size_t a, std::size_t b) {
        const auto pf = pair_forms(*table.angular, basis[a], basis[b], order);
        out.gradient(a, b) = out.gradient(b, a) = pf.gradient;
        out.inverse_square(a, b) = out.inverse_square(b, a) = pf.inverse_square;
        out.square(a, b) = out.square(b, a) = pf.square;
        out.trace_hardy(a, b) = out.trace_hardy(b, a) = pf.trace_hardy;
        out.trace_mass(a, b) = out.trace_mass(b, a) = pf.trace_mass;
        return pf.mass;
      },
      exec);
  return out;
}

GramReport gram_check(const Eigen::MatrixXd& gram, const SpectrumTable& table) {
  GramReport r;
  const auto n = gram.rows();
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      const double dev = std::abs(gram(a, b) - (a == b ? 1.0 : 0.0));
      r.max_deviation = std::max(r.max_deviation, dev);
      if (a == b) r.max_diagonal_error = std::max(r.max_diagonal_error, dev);
      else r.max_offdiagonal = std::max(r.max_offdiagonal, dev);
      if (table.elements[a].l != table.elements[b].l)
        r.max_cross_sector = std::max(r.max_cross_sector, dev);
    }
  return r;
}

GramReport gram_check(const SpectrumTable& table, int order, Execution exec) {
  std::vector<SeparableFunction> basis;
  for (std::size_t i = 0; i < table.size(); ++i) basis.push_back(as_separable(table, i));
  const auto gram = assemble_symmetric(
      table.size(),
      [&](std::size_t a, std::size_t b) {
        return pair_forms(*table.angular, basis[a], basis[b], order).mass;
      },
      exec);
  return gram_check(gram, table);
}

double normalization_check(const SpectrumTable& table, int order) {
  double worst = 0.0;
  for (const auto& e : table.elements) {
    const double angular = table.mode(e).sphere_norm;
    const int n = e.n;
    const double b = e.b_param();
    const double sq = halfspace_gaussian_integral(
        [n, b](double t) {
          const double v = p_poly(n, b, t);
          return v * v;
        },
        angular, table.params, e.alpha, order);
    worst = std::max(worst, std::abs(std::sqrt(sq) - e.norm_const) / e.norm_const);
  }
  return worst;
}

ResidualReport eigen_residual_check(const SpectrumTable& table, std::size_t element,
                                    const std::vector<SeparableFunction>& tests, int order) {
  const auto& e = table.elements.at(element);
  const auto y = as_separable(table, element);
  const auto& angular = *table.angular;
  const auto self = pair_forms(angular, y, y, order);
  const double norm_y = std::sqrt(self.gradient + self.mass);
  ResidualReport r;
  r.budget = 1e-8 + 10.0 * e.nu_error;
  for (const auto& v : tests) {
    const auto pf = pair_forms(angular, y, v, order);
    const auto vv = pair_forms(angular, v, v, order);
    const double res =
        std::abs(pf.gradient - table.params.mu * pf.trace_hardy - e.gamma * pf.mass);
    r.max_residual = std::max(r.max_residual, res / (norm_y * std::sqrt(vv.gradient + vv.mass)));
  }
  return r;
}

double coercivity_estimate(const FormMatrices& forms, const ModelParams& params) {
  const double c = params.shift();
  const Eigen::MatrixXd den = forms.gradient + c * forms.mass;
  const Eigen::MatrixXd num = den - params.mu * forms.trace_hardy;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(num, den, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::Convergence, "coercivity eigensolve failed");
  const double est = solver.eigenvalues().minCoeff();
  if (!(est > 0.0)) throw Error(ErrorKind::Convergence, "non-positive coercivity estimate");
  return est;
}

std::vector<Eigen::VectorXd> random_combinations(std::size_t dimension, std::size_t count,
                                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::VectorXd> out(count, Eigen::VectorXd(dimension));
  for (auto& v : out)
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  return out;
}

namespace {

InequalityReport summarize(std::string name, const std::vector<double>& lhs,
                           const std::vector<double>& rhs) {
  InequalityReport r;
  r.name = std::move(name);
  r.samples = lhs.size();
  r.min_relative_slack = std::numeric_limits<double>::infinity();
  r.holds = true;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const double slack = rhs[i] - lhs[i];
    r.min_relative_slack = std::min(r.min_relative_slack, slack / std::abs(rhs[i]));
    r.sup_ratio = std::max(r.sup_ratio, lhs[i] / rhs[i]);
    if (!(slack >= -1e-9 * std::abs(rhs[i]))) r.holds = false;
  }
  return r;
}

InequalityReport quadratic_check(std::string name, const Eigen::MatrixXd& L,
                                 const Eigen::MatrixXd& R,
                                 const std::vector<Eigen::VectorXd>& family, Execution exec) {
  const auto lhs = evaluate_family(
      family.size(), [&](std::size_t i) { return family[i].dot(L * family[i]); }, exec);
  const auto rhs = evaluate_family(
      family.size(), [&](std::size_t i) { return family[i].dot(R * family[i]); }, exec);
  return summarize(std::move(name), lhs, rhs);
}

}  // namespace

InequalityReport hardy_extended_check(const FormMatrices& forms, const ModelParams& params,
                                      const std::vector<Eigen::VectorXd>& family, Execution exec) {
  const double g2 = std::pow(params.N - 2.0 * params.s, 2);
  const Eigen::MatrixXd L = forms.inverse_square + forms.square / (4.0 * g2);
  const Eigen::MatrixXd R =
      (4.0 / g2) * forms.gradient + ((params.N + 2.0 - 2.0 * params.s) / g2) * forms.mass;
  return quadratic_check("hardy_extended", L, R, family, exec);
}

InequalityReport hardy_frac_check(const FormMatrices& forms, const ModelParams& params,
                                  const std::vector<Eigen::VectorXd>& family, Execution exec) {
  const Eigen::MatrixXd L = params.hardy_bound() * forms.trace_hardy + forms.square / 16.0;
  const Eigen::MatrixXd R = forms.gradient + params.shift() * forms.mass;
  return quadratic_check("hardy_frac", L, R, family, exec);
}

InequalityReport trace_constant_estimate(const FormMatrices& forms,
                                         const std::vector<Eigen::VectorXd>& family,
                                         Execution exec) {
  auto r = quadratic_check("trace", forms.trace_mass, forms.h_gram(), family, exec);
  // no explicit constant: the report is the empirical sup
  r.holds = std::isfinite(r.sup_ratio);
  return r;
}

InequalityReport sphere_trace_check(const AngularSpectrum& angular, std::size_t count,
                                    std::uint64_t seed, Execution exec) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t sectors = angular.sectors.size();
  std::vector<std::vector<double>> profiles(count);
  std::vector<std::size_t> owner(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t si = i % sectors;
    owner[i] = si;
    const auto& sector = angular.sectors[si];
    auto& f = profiles[i];
    f.assign(sector.problem.mesh.size(), 0.0);
    if (i % 2 == 0) {
      for (const auto& mode : sector.modes) {
        const double c = normal(rng);
        for (std::size_t k = 0; k < f.size(); ++k) f[k] += c * mode.f_values[k];
      }
    } else {
      double coeff[5];
      for (double& c : coeff) c = normal(rng);
      const int shift = sector.problem.l >= 1 ? 1 : 0;
      f = nodal_interpolant(sector.problem, [&](double phi) {
        const double c = std::cos(phi);
        double v = 0.0;
        for (int k = 4; k >= 0; --k) v = v * c + coeff[k];
        return v * std::pow(c, shift);
      });
    }
  }
  std::vector<double> rhs(count);
  const auto lhs = evaluate_family(
      count,
      [&](std::size_t i) {
        const auto& sector = angular.sectors[owner[i]];
        const auto dofs = sector.problem.dofs();
        const std::span<const double> f(profiles[i].data(), dofs);
        const auto& p = angular.params;
        rhs[i] = std::pow(p.half_gap(), 2) * sector.matrices.mass.quad(f, f) +
                 sector.matrices.stiffness_no_mu.quad(f, f);
        return rhs[i] - sphere_trace_inequality_check(sector, profiles[i]);
      },
      exec);
  return summarize("sphere_trace", lhs, rhs);
}

}  // namespace hardyspec

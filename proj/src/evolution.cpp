#include "hardyspec/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "hardyspec/error.hpp"
#include "hardyspec/quadrature.hpp"
#include "hardyspec/special_functions.hpp"

namespace hardyspec {

void validate_evolution_config(const EvolutionConfig& c) {
  auto fail = [](const char* what) { throw Error(ErrorKind::Validation, what); };
  if (!c.table) fail("evolution needs a spectrum table");
  if (!(c.t_end > 0.0)) fail("t_end must be positive");
  if (!(c.t_end < c.t_start)) fail("t_end must be smaller than t_start");
  if (!std::isfinite(c.t_start)) fail("t_start must be finite");
  if (!(c.control.rtol > 1e-14 && c.control.rtol < 1e-3)) fail("rtol must lie in (1e-14, 1e-3)");
  if (!(c.control.max_log_step > 0.0)) fail("max_log_step must be positive");
  if (!(c.control.sample_ratio > 1.0)) fail("sample_ratio must exceed 1");
  if (c.initial.size() != static_cast<Eigen::Index>(c.table->size()))
    fail("initial coefficient vector does not match the table size");
  if (!c.initial.allFinite()) fail("initial coefficients must be finite");
  if (c.quadrature_order < 8) fail("quadrature order must be at least 8");
  if (c.pert) {
    try {
      check_perturbation(*c.pert, c.params.s);
    } catch (const Error& e) {
      throw Error(ErrorKind::Validation, e.what());
    }
  }
}

// ---------------------------------------------------------------- coupling

CouplingOperator::CouplingOperator(const SpectrumTable& table, std::optional<PerturbationSpec> pert,
                                   int order)
    : size_(table.size()), s_(table.params.s), pert_(pert) {
  if (!pert_) return;
  check_perturbation(*pert_, s_);
  const auto& p = table.params;

  // elements of each mode j, ordered by n
  std::vector<int> js;
  for (const auto& e : table.elements)
    if (std::find(js.begin(), js.end(), e.j) == js.end()) js.push_back(e.j);
  std::sort(js.begin(), js.end());
  std::vector<std::vector<int>> members(js.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto k = std::find(js.begin(), js.end(), table.elements[i].j) - js.begin();
    members[k].push_back(static_cast<int>(i));
  }
  for (auto& m : members)
    std::sort(m.begin(), m.end(),
              [&](int x, int y) { return table.elements[x].n < table.elements[y].n; });

  auto make_term = [&](double power) {
    if (!(power > -1.0))
      throw Error(ErrorKind::Singularity, "non-integrable singularity in the coupling integral");
    const auto rule = gauss_laguerre_rule(order, 0.5 * (power - 1.0));
    Term term{power, rule.nodes, rule.weights};
    const double scale = std::pow(2.0, power);
    for (double& w : term.weights) w *= scale;
    return term;
  };

  for (std::size_t x = 0; x < js.size(); ++x)
    for (std::size_t y = x; y < js.size(); ++y) {
      const auto& ea = table.elements[members[x].front()];
      const auto& eb = table.elements[members[y].front()];
      if (ea.sector != eb.sector) continue;
      Block block;
      block.rows = members[x];
      block.cols = members[y];
      block.b_row = ea.b_param();
      block.b_col = eb.b_param();
      for (int i : block.rows) block.norm_row.push_back(table.elements[i].norm_const);
      for (int i : block.cols) block.norm_col.push_back(table.elements[i].norm_const);
      block.trace_product = table.mode(ea).f_values.front() * table.mode(eb).f_values.front();
      const double p2 = p.N - 1.0 - ea.alpha - eb.alpha;
      if (pert_->amplitude_A != 0.0) block.singular = make_term(p2 - 2.0 * p.s + pert_->epsilon);
      if (pert_->amplitude_B != 0.0) block.bounded = make_term(p2);
      blocks_.push_back(std::move(block));
    }
}

double CouplingOperator::decay_exponent() const {
  if (!pert_) return std::numeric_limits<double>::infinity();
  return pert_->amplitude_A != 0.0 ? 0.5 * pert_->epsilon : s_;
}

namespace {

// Q_n(x) = L_n^{b-1}(x) / (binom(n+b-1, n) norm_n) for n = 0..count-1 at one node.
void q_values(double x, double b, const std::vector<double>& norms, double* out) {
  const double a = b - 1.0;
  double prev = 0.0, cur = 1.0;
  for (std::size_t n = 0; n < norms.size(); ++n) {
    if (n == 1) {
      prev = cur;
      cur = 1.0 + a - x;
    } else if (n > 1) {
      const double k = static_cast<double>(n - 1);
      const double next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
      prev = cur;
      cur = next;
    }
    out[n] = cur / (binom_shifted(static_cast<int>(n), a) * norms[n]);
  }
}

}  // namespace

void CouplingOperator::fill_block(const Block& block, double t, Eigen::MatrixXd& out) const {
  const auto& h = *pert_;
  const double sigma = 1.0 + 4.0 * t;
  const double common = std::pow(t, s_) * (1.0 + h.time_slope * t) * block.trace_product;
  const std::size_t nr = block.rows.size(), nc = block.cols.size();
  std::vector<double> acc(nr * nc, 0.0), qa(nr), qb(nc);

  auto add_term = [&](const Term& term, double coefficient) {
    const double c = coefficient * std::pow(sigma, -0.5 * (term.power + 1.0));
    for (std::size_t q = 0; q < term.nodes.size(); ++q) {
      const double x = term.nodes[q] / sigma;
      q_values(x, block.b_row, block.norm_row, qa.data());
      q_values(x, block.b_col, block.norm_col, qb.data());
      const double w = c * term.weights[q];
      for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t k = 0; k < nc; ++k) acc[i * nc + k] += w * qa[i] * qb[k];
    }
  };
  if (block.singular)
    add_term(*block.singular, common * h.amplitude_A * std::pow(t, 0.5 * (h.epsilon - 2.0 * s_)));
  if (block.bounded) add_term(*block.bounded, common * h.amplitude_B);

  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t k = 0; k < nc; ++k)
      out(block.rows[i], block.cols[k]) = out(block.cols[k], block.rows[i]) = acc[i * nc + k];
}

Eigen::MatrixXd CouplingOperator::evaluate_serial(double t) const {
  if (!(t > 0.0)) throw Error(ErrorKind::Domain, "coupling needs t > 0");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(size_, size_);
  if (!pert_) return out;
  for (const auto& block : blocks_) fill_block(block, t, out);
  return out;
}

Eigen::MatrixXd CouplingOperator::evaluate_parallel(double t) const {
  if (!(t > 0.0)) throw Error(ErrorKind::Domain, "coupling needs t > 0");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(size_, size_);
  if (!pert_) return out;
  const long long count = static_cast<long long>(blocks_.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    try {
      fill_block(blocks_[i], t, out);
    } catch (...) {
#pragma omp critical
      failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

Eigen::MatrixXd CouplingOperator::operator()(double t, Execution exec) const {
  return exec == Execution::Parallel ? evaluate_parallel(t) : evaluate_serial(t);
}

Eigen::MatrixXd coupling_matrix(const SpectrumTable& table, const PerturbationSpec& pert, double t,
                                int order) {
  return CouplingOperator(table, pert, order).evaluate_serial(t);
}

// ---------------------------------------------------------------- integrator

double height(const SpectralState& state) { return state.coeffs.squaredNorm(); }

namespace {

double scaled_dirichlet(const Eigen::VectorXd& c, const Eigen::MatrixXd& M,
                        std::span<const double> gammas) {
  double td = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) td += gammas[i] * c[i] * c[i];
  if (M.size() > 0) td -= c.dot(M * c);
  return td;
}

}  // namespace

double dirichlet(const SpectralState& state, const Eigen::MatrixXd& M,
                 std::span<const double> gammas) {
  if (gammas.size() != static_cast<std::size_t>(state.coeffs.size()))
    throw Error(ErrorKind::Parameter, "gamma list does not match the state size");
  return scaled_dirichlet(state.coeffs, M, gammas) / state.t;
}

double frequency(const SpectralState& state, const Eigen::MatrixXd& M,
                 std::span<const double> gammas) {
  const double H = height(state);
  if (!(H > 0.0)) throw Error(ErrorKind::Domain, "frequency undefined at zero height");
  return state.t * dirichlet(state, M, gammas) / H;
}

namespace {

// Dormand-Prince 5(4)
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Rhs {
  const Eigen::VectorXd& gammas;
  const CouplingOperator& coupling;
  Eigen::VectorXd operator()(double sigma, const Eigen::VectorXd& c) const {
    Eigen::VectorXd out = gammas.cwiseProduct(c);
    if (coupling.active()) out.noalias() -= coupling(std::exp(sigma)) * c;
    return out;
  }
};

void guard_overflow(const Eigen::VectorXd& y) {
  if (!y.allFinite() || y.cwiseAbs().maxCoeff() > 1e300)
    throw Error(ErrorKind::Evolution,
                "coefficients exceed 1e300; rescale the initial data or shorten the run");
}

}  // namespace

EvolutionResult evolve(const EvolutionConfig& config) {
  validate_evolution_config(config);
  const CouplingOperator coupling(*config.table, config.pert, config.quadrature_order);
  return evolve(config, coupling);
}

EvolutionResult evolve(const EvolutionConfig& config, const CouplingOperator& coupling) {
  validate_evolution_config(config);
  const auto& table = *config.table;
  const auto gamma_list = table.gammas();
  const Eigen::VectorXd gammas = Eigen::Map<const Eigen::VectorXd>(gamma_list.data(), gamma_list.size());
  const Rhs rhs{gammas, coupling};
  const double lower_bound = -config.params.shift();

  const double s_start = std::log(config.t_start), s_end = std::log(config.t_end);
  const double spacing = std::log(config.control.sample_ratio);
  std::vector<double> targets;
  for (long k = 1;; ++k) {
    const double s = s_start - k * spacing;
    if (s <= s_end + 1e-9 * spacing) break;
    targets.push_back(s);
  }
  targets.push_back(s_end);

  EvolutionResult result;
  auto record = [&](double sigma, const Eigen::VectorXd& c) {
    const double t = std::exp(sigma);
    Eigen::MatrixXd M;
    Eigen::VectorXd deriv = gammas.cwiseProduct(c);
    if (coupling.active()) {
      M = coupling(t);
      deriv.noalias() -= M * c;
    }
    FrequencySample sample;
    sample.t = t;
    sample.H = c.squaredNorm();
    const double td = scaled_dirichlet(c, M, gamma_list);
    sample.D = td / t;
    sample.N = sample.H > 0.0 ? td / sample.H : std::numeric_limits<double>::quiet_NaN();
    if (sample.H > 0.0 && !(sample.N > lower_bound)) ++result.trace.lower_bound_violations;
    result.states.push_back({t, c});
    result.derivatives.push_back(deriv);
    result.trace.samples.push_back(sample);
    return deriv;
  };

  const auto& ctl = config.control;
  double sigma = s_start;
  Eigen::VectorXd y = config.initial;
  guard_overflow(y);
  Eigen::VectorXd k1 = record(sigma, y);
  double h_free = std::min(ctl.max_log_step, 0.01);

  for (const double target : targets) {
    while (sigma > target) {
      const double remaining = sigma - target;
      double h = std::min(h_free, remaining);
      if (remaining - h < 1e-10 * spacing) h = remaining;
      const double hs = -h;  // stepping toward smaller times
      const Eigen::VectorXd k2 = rhs(sigma + c2 * hs, y + hs * (a21 * k1));
      const Eigen::VectorXd k3 = rhs(sigma + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
      const Eigen::VectorXd k4 = rhs(sigma + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
      const Eigen::VectorXd k5 =
          rhs(sigma + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Eigen::VectorXd k6 =
          rhs(sigma + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Eigen::VectorXd ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const double s_new = h == remaining ? target : sigma + hs;
      const Eigen::VectorXd k7 = rhs(s_new, ynew);
      const Eigen::VectorXd err =
          hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double norm = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double sc = std::max(ctl.rtol * std::max(std::abs(y[i]), std::abs(ynew[i])), 1e-300);
        norm = std::max(norm, std::abs(err[i]) / sc);
      }
      if (!std::isfinite(norm)) norm = 1e10;
      const double fac = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
      if (norm <= 1.0) {
        sigma = s_new;
        y = ynew;
        k1 = k7;
        guard_overflow(y);
        ++result.accepted_steps;
        const double proposal = std::min(h * fac, ctl.max_log_step);
        // a step shortened to hit a sample says nothing about the admissible size
        h_free = h < h_free ? std::max(h_free, proposal) : proposal;
      } else {
        ++result.rejected_steps;
        h_free = h * std::max(0.2, fac);
        if (h_free < 1e-12)
          throw Error(ErrorKind::Evolution, "step size underflow at t = " + std::to_string(std::exp(sigma)));
      }
    }
    k1 = record(sigma, y);
  }
  return result;
}

// ---------------------------------------------------------------- analysis

double verify_h_prime(const FrequencyTrace& trace) {
  const auto& s = trace.samples;
  if (s.size() < 7) throw Error(ErrorKind::Parameter, "H' check needs at least 7 samples");
  std::vector<double> sig(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) sig[i] = std::log(s[i].t);
  double worst = 0.0;
  for (std::size_t i = 3; i + 3 < s.size(); ++i) {
    const double d = sig[i] - sig[i + 1];
    bool uniform = true;
    for (std::size_t k = i - 3; k < i + 3; ++k)
      uniform = uniform && std::abs((sig[k] - sig[k + 1]) - d) <= 1e-9 * d;
    if (!uniform) continue;
    // samples run toward smaller t, so index + 1 is one step back in log t
    const double dH = (-s[i + 3].H + 9.0 * s[i + 2].H - 45.0 * s[i + 1].H + 45.0 * s[i - 1].H -
                       9.0 * s[i - 2].H + s[i - 3].H) /
                      (60.0 * d);
    const double target = 2.0 * s[i].t * s[i].D;
    const double scale = std::max(std::abs(target), s[i].H);
    if (scale > 0.0) worst = std::max(worst, std::abs(dH - target) / scale);
  }
  return worst;
}

VanishingFit fit_vanishing_order(const FrequencyTrace& trace, double t_lo, double t_hi) {
  std::vector<double> x, y;
  for (const auto& sm : trace.samples)
    if (sm.t >= t_lo * (1 - 1e-12) && sm.t <= t_hi * (1 + 1e-12)) {
      if (!(sm.H > 0.0))
        throw Error(ErrorKind::Domain, "vanishing-order fit needs H > 0 on the window");
      x.push_back(std::log(sm.t));
      y.push_back(std::log(sm.H));
    }
  if (x.size() < 3) throw Error(ErrorKind::Parameter, "degenerate fit window (fewer than 3 samples)");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  VanishingFit fit;
  fit.gamma_fit = 0.5 * slope;
  fit.samples = x.size();
  double ss = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (my + slope * (x[i] - mx));
    ss += r * r;
    const double scaled = y[i] - slope * x[i];  // log of t^{-2 gamma_fit} H
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  fit.residual = std::sqrt(ss / n);
  fit.ratio = std::exp(hi - lo);
  return fit;
}

FrequencyLimit frequency_limit(const FrequencyTrace& trace, const SpectrumTable& table,
                               double tolerance) {
  const auto& s = trace.samples;
  if (s.size() < 3) throw Error(ErrorKind::Parameter, "frequency limit needs a sampled trace");
  const double t_end = s.back().t, t_start = s.front().t;
  if (!(t_end <= 1e-3 * t_start * (1.0 + 1e-9)))
    throw Error(ErrorKind::Parameter, "frequency limit needs t_end <= 1e-3 t_start");
  if (!std::isfinite(s.back().N)) throw Error(ErrorKind::Domain, "frequency undefined: zero height");

  auto nearest = [&](double t) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
      if (std::abs(std::log(s[i].t / t)) < std::abs(std::log(s[best].t / t))) best = i;
    return s[best].N;
  };
  FrequencyLimit out;
  out.final_N = s.back().N;
  out.gamma_limit = out.final_N;
  const double n1 = nearest(100.0 * t_end), n2 = nearest(10.0 * t_end), n3 = out.final_N;
  const double d1 = n1 - n2, d2 = n2 - n3;
  if (std::abs(d2) > 1e-14 * std::max(1.0, std::abs(n3))) {
    const double q = d1 / d2;
    if (std::isfinite(q) && q > 1.05 && q < 1e8) {
      out.gamma_limit = n3 - d2 / (q - 1.0);
      out.extrapolated = true;
    }
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& sm : s)
    if (sm.t <= 10.0 * t_end * (1 + 1e-12)) {
      lo = std::min(lo, sm.N);
      hi = std::max(hi, sm.N);
    }
  out.cauchy_variation = hi - lo;
  out.cauchy_ok = out.cauchy_variation <= tolerance;
  for (std::size_t g = 0; g < table.group_gamma.size(); ++g) {
    const double d = std::abs(table.group_gamma[g] - out.gamma_limit);
    if (out.nearest_group < 0 || d < out.distance) {
      out.nearest_group = static_cast<int>(g);
      out.nearest_gamma = table.group_gamma[g];
      out.distance = d;
    }
  }
  return out;
}

Eigen::VectorXd state_at(const EvolutionResult& result, double t) {
  const auto& st = result.states;
  if (st.empty() || !(t > 0.0)) throw Error(ErrorKind::Evolution, "no stored states");
  const double slack = 1e-12;
  if (t > st.front().t * (1 + slack) || t < st.back().t * (1 - slack))
    throw Error(ErrorKind::Evolution, "insufficient state resolution: t outside the sampled range");
  // states are ordered by decreasing t
  auto it = std::lower_bound(st.begin(), st.end(), t,
                             [](const SpectralState& a, double v) { return a.t > v; });
  if (it == st.end()) return st.back().coeffs;
  if (it == st.begin() || it->t == t) return it->coeffs;
  const std::size_t k1 = static_cast<std::size_t>(it - st.begin()), k0 = k1 - 1;
  const double s0 = std::log(st[k0].t), s1 = std::log(st[k1].t);
  const double h = s1 - s0, th = (std::log(t) - s0) / h;
  const double th2 = th * th, th3 = th2 * th;
  return (2 * th3 - 3 * th2 + 1) * st[k0].coeffs + (th3 - 2 * th2 + th) * h * result.derivatives[k0] +
         (-2 * th3 + 3 * th2) * st[k1].coeffs + (th3 - th2) * h * result.derivatives[k1];
}

BetaResult beta_coefficients(const EvolutionResult& result, const EvolutionConfig& config,
                             const CouplingOperator& coupling, const FrequencyLimit& limit,
                             double Lambda) {
  const auto& table = *config.table;
  if (limit.nearest_group < 0 || limit.nearest_group >= static_cast<int>(table.groups.size()))
    throw Error(ErrorKind::Parameter, "frequency limit has no matching group");
  if (!(Lambda > 0.0)) throw Error(ErrorKind::Domain, "Lambda must be positive");
  BetaResult out;
  out.Lambda = Lambda;
  out.group = limit.nearest_group;
  out.gamma = table.group_gamma[out.group];
  out.elements = table.groups[out.group];
  const double gamma = out.gamma;
  const double tL = Lambda * Lambda;
  const Eigen::VectorXd cL = state_at(result, tL);

  std::vector<double> integral(out.elements.size(), 0.0);
  if (coupling.active()) {
    auto integrand = [&](double sigma, const Eigen::VectorXd& c) {
      const double t = std::exp(sigma);
      const Eigen::VectorXd mc = coupling(t) * c;
      std::vector<double> v(out.elements.size());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-gamma * sigma) * mc[out.elements[i]];
      return v;
    };
    static const auto gl = gauss_legendre_rule(4);
    const double sL = std::log(tL);
    const auto& st = result.states;
    for (std::size_t k = 0; k + 1 < st.size(); ++k) {
      const double hi = std::min(std::log(st[k].t), sL), lo = std::log(st[k + 1].t);
      if (!(hi > lo)) continue;
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double sig = 0.5 * (hi + lo) + 0.5 * (hi - lo) * gl.nodes[q];
        const auto v = integrand(sig, state_at(result, std::exp(sig)));
        for (std::size_t i = 0; i < v.size(); ++i) integral[i] += 0.5 * (hi - lo) * gl.weights[q] * v[i];
      }
    }
    // below t_end the integrand decays like t^delta
    const auto g_end = integrand(std::log(st.back().t), st.back().coeffs);
    out.tail.resize(g_end.size());
    for (std::size_t i = 0; i < g_end.size(); ++i) out.tail[i] = g_end[i] / coupling.decay_exponent();
  } else {
    out.tail.assign(out.elements.size(), 0.0);
  }
  for (std::size_t i = 0; i < out.elements.size(); ++i)
    out.beta.push_back(std::pow(Lambda, -2.0 * gamma) * cL[out.elements[i]] + integral[i] + out.tail[i]);
  return out;
}

std::vector<double> default_tau_grid() {
  std::vector<double> grid(37);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 0.1 + 0.9 * i / 36.0;
  return grid;
}

ProfileError blowup_profile_error(const EvolutionResult& result, const BetaResult& beta,
                                 const Eigen::MatrixXd& h_gram,
                                 double lambda, std::span<const double> tau_grid) {
  if (tau_grid.size() < 2) throw Error(ErrorKind::Parameter, "tau grid needs at least two points");
  ProfileError out;
  out.lambda = lambda;
  std::vector<double> h_sq(tau_grid.size());
  for (std::size_t k = 0; k < tau_grid.size(); ++k) {
    const double tau = tau_grid[k];
    Eigen::VectorXd e = std::pow(lambda, -2.0 * beta.gamma) * state_at(result, lambda * lambda * tau);
    for (std::size_t i = 0; i < beta.elements.size(); ++i)
      e[beta.elements[i]] -= std::pow(tau, beta.gamma) * beta.beta[i];
    out.err_L = std::max(out.err_L, e.norm());
    h_sq[k] = e.dot(h_gram * e);
  }
  const std::size_t n = tau_grid.size();
  const double d = tau_grid[1] - tau_grid[0];
  bool uniform = n % 2 == 1;
  for (std::size_t k = 1; k < n && uniform; ++k)
    uniform = std::abs(tau_grid[k] - tau_grid[k - 1] - d) <= 1e-12 * std::abs(d) + 1e-15;
  double integral = 0.0;
  if (uniform) {
    for (std::size_t k = 0; k < n; ++k)
      integral += (k == 0 || k == n - 1 ? 1.0 : (k % 2 ? 4.0 : 2.0)) * h_sq[k];
    integral *= d / 3.0;
  } else {
    for (std::size_t k = 1; k < n; ++k)
      integral += 0.5 * (tau_grid[k] - tau_grid[k - 1]) * (h_sq[k] + h_sq[k - 1]);
  }
  out.err_H = std::sqrt(std::max(integral, 0.0));
  return out;
}

UniquenessReport backward_uniqueness_check(const EvolutionConfig& config) {
  validate_evolution_config(config);
  const CouplingOperator coupling(*config.table, config.pert, config.quadrature_order);
  UniquenessReport out;
  const auto run = evolve(config, coupling);
  out.min_H = std::numeric_limits<double>::infinity();
  out.positive = true;
  for (const auto& s : run.trace.samples) {
    out.min_H = std::min(out.min_H, s.H);
    if (!(s.H > 0.0)) out.positive = false;
  }
  auto zero = config;
  zero.initial.setZero();
  const auto zrun = evolve(zero, coupling);
  out.zero_stays_zero = std::all_of(zrun.trace.samples.begin(), zrun.trace.samples.end(),
                                    [](const FrequencySample& s) { return s.H == 0.0; });
  return out;
}

}  // namespace hardyspec

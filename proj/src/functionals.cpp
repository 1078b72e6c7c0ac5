#include "tmlab/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "tmlab/errors.hpp"
#include "tmlab/numerics.hpp"

namespace tmlab {

namespace {

constexpr double kIntegerTol = 1e-9;
constexpr double kPanelWidth = 0.25;
constexpr double kLogMax = 709.0;

// log(e^a - e^b) for a >= b.
double log_diff_exp(double a, double b) {
  if (b == kNegInf) return a;
  if (a <= b) return kNegInf;
  return a + std::log1p(-std::exp(b - a));
}

double require_number(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(key, "expected a number");
  return j.at(key).get<double>();
}

}  // namespace

void TMParams::validate() const {
  if (N < 2) throw ConfigError("N", "N must be >= 2");
  if (!(q >= 1.0) || !std::isfinite(q)) throw ConfigError("q", "q must be >= 1");
  if (!(beta >= 0.0)) throw ConfigError("beta", "β must be >= 0");
  if (!(beta < N)) throw ConfigError("beta", "β must be < N");
  if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("p", "p must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda", "λ must be positive");
  if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("d", "d must be positive");
  if (!(k > 1.0) || !std::isfinite(k)) throw ConfigError("k", "k must be > 1");
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("a", "a must be positive");
  if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("b", "b must be positive");
}

nlohmann::json TMParams::to_json() const {
  return {{"N", N}, {"q", q}, {"p", p}, {"beta", beta}, {"lambda", lambda},
          {"d", d}, {"k", k}, {"a", a}, {"b", b}};
}

TMParams TMParams::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("params", "expected an object");
  TMParams t;
  if (j.contains("N")) {
    if (!j.at("N").is_number_integer()) throw ConfigError("N", "expected an integer");
    t.N = j.at("N").get<int>();
  }
  t.q = require_number(j, "q", t.q);
  t.p = require_number(j, "p", t.p);
  t.beta = require_number(j, "beta", t.beta);
  t.lambda = require_number(j, "lambda", t.lambda);
  t.d = require_number(j, "d", t.d);
  t.k = require_number(j, "k", t.k);
  t.a = require_number(j, "a", t.a);
  t.b = require_number(j, "b", t.b);
  for (const auto& [key, value] : j.items()) {
    static const char* known[] = {"N", "q", "p", "beta", "lambda", "d", "k", "a", "b"};
    if (std::none_of(std::begin(known), std::end(known), [&](const char* s) { return key == s; })) {
      throw ConfigError(key, "unknown parameter");
    }
  }
  t.validate();
  return t;
}

int phi_start_index(int N, double q, double beta) {
  const double theta = q * (N - 1.0) / N * (1.0 - beta / N);
  if (beta > 0.0) return static_cast<int>(std::floor(theta + kIntegerTol)) + 1;
  return std::max(0, static_cast<int>(std::ceil(theta - kIntegerTol)));
}

namespace {

// log(t^j0 / j0!) and the number of terms used by log_phi.
double log_first_term(double t, int j0) {
  double log_fact = 0.0;
  for (int j = 2; j <= j0; ++j) log_fact += std::log(static_cast<double>(j));
  return j0 * std::log(t) - log_fact;
}

double log_phi_impl(double t, int j0, int* terms) {
  if (j0 <= 0) {
    if (terms) *terms = 0;
    return t;
  }
  if (!(t > 0.0)) {
    if (terms) *terms = 0;
    return kNegInf;
  }
  if (t < 2.0 * j0 + 20.0) {
    // Direct summation relative to the first term.
    double rel = 1.0;
    double sum = 1.0;
    int count = 1;
    for (int j = j0 + 1; j < j0 + 100000; ++j) {
      rel *= t / j;
      sum += rel;
      ++count;
      if (rel < 1e-17 * sum) break;
    }
    if (terms) *terms = count;
    return log_first_term(t, j0) + std::log(sum);
  }
  // e^t minus the omitted head; the head is tiny relative to e^t here.
  std::vector<double> head(static_cast<std::size_t>(j0));
  double log_term = 0.0;
  for (int j = 0; j < j0; ++j) {
    if (j > 0) log_term += std::log(t / j);
    head[static_cast<std::size_t>(j)] = log_term;
  }
  if (terms) *terms = j0;
  return t + std::log1p(-std::exp(log_sum_exp(head) - t));
}

}  // namespace

double log_phi(double t, int j0) { return log_phi_impl(t, j0, nullptr); }

PhiValue phi_series(double t, int N, double q, double beta) {
  if (!(t >= 0.0)) throw DomainError("phi_series: t must be >= 0");
  if (N < 2 || !(q >= 1.0) || !(beta >= 0.0 && beta < N)) {
    throw DomainError("phi_series: parameters out of range");
  }
  PhiValue out;
  const int j0 = phi_start_index(N, q, beta);
  out.log_value = log_phi_impl(t, j0, &out.terms);
  out.saturated = out.log_value > kLogMax;
  out.value = out.saturated ? kInf : std::exp(out.log_value);
  return out;
}

FunctionalValue radial_integral(const RadialProfile& u, const std::function<double(double)>& log_f,
                                double weight_exponent, double log_r_min) {
  if (!(weight_exponent > 0.0)) throw DomainError("radial_integral: weight exponent must be positive");
  const auto& g8 = gauss_legendre(8);
  const auto& g4 = gauss_legendre(4);
  const double w = weight_exponent;
  const double log_nk = std::log(u.dim() * u.kappa());

  std::vector<double> logs8;
  std::vector<double> log_errs;
  FunctionalValue out;

  const double s0 = u.log_radius(0);
  if (log_r_min < s0) {
    // f(u_0) (e^{w s0} - e^{w lo}) / w
    const double head = log_r_min == kNegInf ? w * s0 : log_diff_exp(w * s0, w * log_r_min);
    const double plateau = log_f(u.value(0)) + head - std::log(w);
    logs8.push_back(plateau);
    out.log_plateau = plateau + log_nk;
  }

  double logs_a[8];
  double logs_b[4];
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double sa = u.log_radius(i);
    const double sb = u.log_radius(i + 1);
    if (sb <= log_r_min) continue;
    const double va = u.value(i);
    const double vb = u.value(i + 1);
    const double width = sb - sa;
    const double lo = std::max(sa, log_r_min);
    const int panels = std::max(1, static_cast<int>(std::ceil((sb - lo) / kPanelWidth)));
    const double h = (sb - lo) / panels;
    const double log_half = std::log(0.5 * h);
    for (int k = 0; k < panels; ++k) {
      const double mid = lo + (k + 0.5) * h;
      auto eval = [&](double x) {
        const double s = mid + 0.5 * h * x;
        const double frac = (s - sa) / width;
        const double val = std::max(0.0, (1.0 - frac) * va + frac * vb);
        return log_f(val) + w * s;
      };
      for (int j = 0; j < 8; ++j) logs_a[j] = std::log(g8.weights[j]) + log_half + eval(g8.nodes[j]);
      for (int j = 0; j < 4; ++j) logs_b[j] = std::log(g4.weights[j]) + log_half + eval(g4.nodes[j]);
      const double l8 = log_sum_exp(logs_a);
      const double l4 = log_sum_exp(logs_b);
      logs8.push_back(l8);
      log_errs.push_back(l8 >= l4 ? log_diff_exp(l8, l4) : log_diff_exp(l4, l8));
    }
  }
  out.log_value = log_sum_exp(logs8) + log_nk;
  if (std::isnan(out.log_value)) throw ConvergenceError("radial_integral: integrand is not a number", 0.0);
  out.saturated = out.log_value > kLogMax;
  out.value = out.saturated ? kInf : std::exp(out.log_value);
  const double log_err = log_sum_exp(log_errs) + log_nk;
  out.error_estimate = log_err > kLogMax ? kInf : std::exp(log_err);
  return out;
}

double dirichlet_norm(const RadialProfile& u) {
  if (u.has_jump()) return kInf;
  const double n = u.dim();
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double dv = u.value(i) - u.value(i + 1);
    if (dv == 0.0) continue;
    const double ds = u.log_radius(i + 1) - u.log_radius(i);
    sum += std::pow(dv, n) / std::pow(ds, n - 1.0);
  }
  return std::pow(n * u.kappa() * sum, 1.0 / n);
}

double dirichlet_norm(const RadialProfile& u, const Gauge& g) {
  if (g.dim() != u.dim()) throw DomainError("dirichlet_norm: gauge dimension mismatch");
  return dirichlet_norm(u);
}

double log_lq_norm(const RadialProfile& u, double q) {
  if (!(q > 0.0)) throw DomainError("lq_norm: q must be positive");
  if (u.is_zero()) return kNegInf;
  auto log_f = [q](double v) { return v > 0.0 ? q * std::log(v) : kNegInf; };
  return radial_integral(u, log_f, u.dim()).log_value / q;
}

double lq_norm(const RadialProfile& u, double q) {
  const double l = log_lq_norm(u, q);
  return l == kNegInf ? 0.0 : std::exp(l);
}

std::string to_string(TMVariant v) {
  switch (v) {
    case TMVariant::ExpP: return "EXP_P";
    case TMVariant::Phi: return "PHI";
    case TMVariant::PhiExactGrowth: return "PHI_EXACT_GROWTH";
    case TMVariant::PhiExactGrowthK: return "PHI_EXACT_GROWTH_K";
  }
  return "?";
}

std::string to_string(Theorem t) {
  switch (t) {
    case Theorem::T11: return "T11";
    case Theorem::T14: return "T14";
    case Theorem::T15: return "T15";
    case Theorem::T16: return "T16";
  }
  return "?";
}

std::string to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::GradOnly: return "GRAD_ONLY";
    case ConstraintKind::SumAB: return "SUM_AB";
    case ConstraintKind::SumAKN: return "SUM_A_KN";
  }
  return "?";
}

TMVariant variant_from_string(const std::string& s) {
  for (auto v : {TMVariant::ExpP, TMVariant::Phi, TMVariant::PhiExactGrowth, TMVariant::PhiExactGrowthK}) {
    if (to_string(v) == s) return v;
  }
  throw ConfigError("variant", "unknown variant '" + s + "'");
}

Theorem theorem_from_string(const std::string& s) {
  for (auto t : {Theorem::T11, Theorem::T14, Theorem::T15, Theorem::T16}) {
    if (to_string(t) == s) return t;
  }
  throw ConfigError("theorem", "unknown theorem '" + s + "'");
}

double tm_log_integrand(double u, const TMParams& params, TMVariant variant) {
  // Phi starts at j >= 1 for every admissible (N, q, beta), so all variants vanish at u = 0.
  if (!(u > 0.0)) return kNegInf;
  const double n = params.N;
  const double damp = 1.0 - params.beta / n;
  const double e = params.lambda * damp * std::pow(u, n / (n - 1.0));
  switch (variant) {
    case TMVariant::ExpP:
      return e + params.p * std::log(u);
    case TMVariant::Phi:
      return log_phi(e, phi_start_index(params.N, params.q, params.beta));
    case TMVariant::PhiExactGrowth:
    case TMVariant::PhiExactGrowthK: {
      double expo = params.p / (n - 1.0) * damp;
      if (variant == TMVariant::PhiExactGrowthK) expo *= 1.0 - 1.0 / params.k;
      return log_phi(e, phi_start_index(params.N, params.q, params.beta)) -
             std::log1p(params.d * std::pow(u, expo));
    }
  }
  return kNegInf;
}

FunctionalValue tm_integral(const RadialProfile& u, const TMParams& params, TMVariant variant) {
  params.validate();
  if (u.dim() != params.N) throw DomainError("tm_integral: profile dimension differs from N");
  if (u.is_zero()) {
    FunctionalValue zero;
    return zero;
  }
  const int j0 = phi_start_index(params.N, params.q, params.beta);
  auto log_f = [&](double v) { return tm_log_integrand(v, params, variant); };
  FunctionalValue out = radial_integral(u, log_f, params.N - params.beta);
  out.truncation_terms = j0;
  return out;
}

ConstraintResult constraint_check(const RadialProfile& u, const TMParams& params, ConstraintKind kind) {
  params.validate();
  if (u.dim() != params.N) throw DomainError("constraint_check: profile dimension differs from N");
  const double grad = dirichlet_norm(u);
  double lhs = 0.0;
  switch (kind) {
    case ConstraintKind::GradOnly:
      lhs = grad;
      break;
    case ConstraintKind::SumAB:
      lhs = std::pow(grad, params.a) + std::pow(lq_norm(u, params.q), params.b);
      break;
    case ConstraintKind::SumAKN:
      lhs = std::pow(grad, params.a) + std::pow(lq_norm(u, params.q), params.k * params.N);
      break;
  }
  ConstraintResult r;
  r.slack = 1.0 - lhs;
  r.satisfied = r.slack >= -kConstraintTol;
  return r;
}

TMVariant theorem_variant(Theorem t) {
  switch (t) {
    case Theorem::T11: return TMVariant::ExpP;
    case Theorem::T14: return TMVariant::PhiExactGrowth;
    case Theorem::T15:
    case Theorem::T16: return TMVariant::PhiExactGrowthK;
  }
  return TMVariant::Phi;
}

ConstraintKind theorem_constraint(Theorem t) {
  switch (t) {
    case Theorem::T11:
    case Theorem::T14: return ConstraintKind::GradOnly;
    case Theorem::T15: return ConstraintKind::SumAKN;
    case Theorem::T16: return ConstraintKind::SumAB;
  }
  return ConstraintKind::GradOnly;
}

double theorem_norm_power(Theorem t, const TMParams& params) {
  const double damp = 1.0 - params.beta / params.N;
  switch (t) {
    case Theorem::T11:
    case Theorem::T14: return params.q * damp;
    case Theorem::T15: return 0.0;
    case Theorem::T16: return params.q * (1.0 - 1.0 / params.k) * damp;
  }
  return 0.0;
}

bool theorem_hypothesis(Theorem t, const TMParams& params) {
  if (t == Theorem::T11) {
    if (params.beta == 0.0) return params.p >= params.q;
    return params.p > params.q * (1.0 - params.beta / params.N);
  }
  return params.p >= params.q;
}

FunctionalValue ratio(const RadialProfile& u, const TMParams& params, Theorem theorem,
                      bool check_constraint) {
  params.validate();
  if (u.is_zero()) throw DomainError("degenerate input: zero profile");
  if (check_constraint) {
    TMParams cp = params;
    if (theorem == Theorem::T16) cp.b = params.N;
    const auto c = constraint_check(u, cp, theorem_constraint(theorem));
    if (!c.satisfied) {
      throw DomainError("constraint violated for " + to_string(theorem) + " (slack " +
                        std::to_string(c.slack) + ")");
    }
  }
  FunctionalValue out = tm_integral(u, params, theorem_variant(theorem));
  const double power = theorem_norm_power(theorem, params);
  if (power != 0.0) {
    const double log_norm = log_lq_norm(u, params.q);
    const double shift = power * log_norm;
    out.log_value -= shift;
    out.log_plateau -= shift;
    out.saturated = out.log_value > kLogMax;
    out.value = out.saturated ? kInf : std::exp(out.log_value);
    out.error_estimate = std::isfinite(out.error_estimate) ? out.error_estimate * std::exp(-shift) : kInf;
  }
  out.within_hypothesis = theorem_hypothesis(theorem, params);
  return out;
}

}  // namespace tmlab

#include "tmlab/supsearch.hpp"

#include <algorithm>
#include <cmath>

#include "tmlab/errors.hpp"
#include "tmlab/numerics.hpp"

namespace tmlab {

std::string to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::Moser: return "moser";
    case FamilyKind::MoserPerturbed: return "moser_perturbed";
    case FamilyKind::TruncatedPower: return "truncated_power";
  }
  return "?";
}

FamilyKind family_from_string(const std::string& s) {
  for (auto k : {FamilyKind::Moser, FamilyKind::MoserPerturbed, FamilyKind::TruncatedPower}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("family", "unknown family '" + s + "'");
}

ProfileFamily ProfileFamily::moser(double ln_n_min, double ln_n_max) {
  if (!(ln_n_max > ln_n_min)) throw DomainError("moser family: empty range");
  ProfileFamily f;
  f.kind = FamilyKind::Moser;
  f.lower = {ln_n_min};
  f.upper = {ln_n_max};
  return f;
}

ProfileFamily ProfileFamily::moser_perturbed(int knots, double ln_n_min, double ln_n_max, double delta) {
  if (knots < 1 || knots > 11) throw DomainError("moser_perturbed family: knots must be in [1, 11]");
  if (!(ln_n_max > ln_n_min) || !(delta > 0.0)) throw DomainError("moser_perturbed family: empty range");
  ProfileFamily f;
  f.kind = FamilyKind::MoserPerturbed;
  f.knots = knots;
  f.lower.assign(static_cast<std::size_t>(knots) + 1, -delta);
  f.upper.assign(static_cast<std::size_t>(knots) + 1, delta);
  f.lower[0] = ln_n_min;
  f.upper[0] = ln_n_max;
  return f;
}

ProfileFamily ProfileFamily::truncated_power(double ln_t_min, double ln_t_max, double sigma_min,
                                             double sigma_max) {
  if (!(ln_t_max > ln_t_min) || !(sigma_max > sigma_min) || !(sigma_min > 0.0)) {
    throw DomainError("truncated_power family: empty range");
  }
  ProfileFamily f;
  f.kind = FamilyKind::TruncatedPower;
  f.lower = {ln_t_min, sigma_min};
  f.upper = {ln_t_max, sigma_max};
  return f;
}

std::vector<double> ProfileFamily::from_unit(std::span<const double> y) const {
  if (y.size() != dimension()) throw DomainError("family: parameter dimension mismatch");
  std::vector<double> x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) x[i] = lower[i] + y[i] * (upper[i] - lower[i]);
  return x;
}

RadialProfile ProfileFamily::realize(std::span<const double> x, double beta, const GaugeConstants& c,
                                     const std::string& gauge_label) const {
  if (x.size() != dimension()) throw DomainError("family: parameter dimension mismatch");
  const int dim = c.dim;
  switch (kind) {
    case FamilyKind::Moser:
      // Two nodes represent u_n exactly (it is linear in ln r).
      return moser_profile(std::exp(x[0]), beta, c, gauge_label, 2);
    case FamilyKind::MoserPerturbed: {
      const double n = std::exp(x[0]);
      const double edge = n / (dim - beta);
      const double plateau = moser_plateau(n, dim, beta, c.kappa);
      const auto m = static_cast<std::size_t>(knots);
      std::vector<double> rise(m + 1, 0.0);
      for (std::size_t i = 1; i <= m; ++i) rise[i] = rise[i - 1] + plateau / m * std::exp(x[i]);
      std::vector<double> s(m + 1), v(m + 1);
      for (std::size_t j = 0; j <= m; ++j) {
        const std::size_t i = m - j;  // knot index counted from r = 1
        s[j] = j == m ? 0.0 : -edge * static_cast<double>(i) / static_cast<double>(m);
        v[j] = rise[i];
      }
      return RadialProfile(std::move(s), std::move(v), dim, c.kappa, gauge_label);
    }
    case FamilyKind::TruncatedPower: {
      const double t_max = std::exp(x[0]);
      const double sigma = x[1];
      constexpr std::size_t nodes = 65;
      std::vector<double> s(nodes), v(nodes);
      for (std::size_t j = 0; j < nodes; ++j) {
        const double t = t_max * (1.0 - static_cast<double>(j) / (nodes - 1));
        s[j] = j + 1 == nodes ? 0.0 : -t;
        v[j] = j + 1 == nodes ? 0.0 : std::pow(t, sigma);
      }
      return RadialProfile(std::move(s), std::move(v), dim, c.kappa, gauge_label);
    }
  }
  throw DomainError("family: unknown kind");
}

nlohmann::json ProfileFamily::to_json() const {
  return {{"kind", to_string(kind)}, {"knots", knots}, {"lower", lower}, {"upper", upper}};
}

SearchResult pattern_search(const std::function<double(std::span<const double>)>& f, std::size_t dim,
                            const SearchOptions& options) {
  if (dim == 0) throw DomainError("pattern_search: empty parameter space");
  if (options.budget == 0) throw DomainError("pattern_search: budget must be positive");
  auto safe = [&](std::span<const double> y) {
    try {
      const double v = f(y);
      return std::isnan(v) ? kNegInf : v;
    } catch (const std::exception&) {
      return kNegInf;
    }
  };

  SearchResult out;
  for (std::uint64_t restart = 0; out.evaluations < options.budget; ++restart) {
    std::vector<double> y(dim, 0.5);
    if (restart > 0) {
      std::uint64_t state = child_seed(options.seed, restart);
      for (double& v : y) {
        state = splitmix64(state);
        v = static_cast<double>(state >> 11) * 0x1.0p-53;
      }
    }
    double value = safe(y);
    ++out.evaluations;
    if (value > out.best || out.argmax_unit.empty()) {
      out.best = value;
      out.argmax_unit = y;
    }
    double step = options.initial_step;
    while (step >= options.min_step && out.evaluations < options.budget) {
      std::vector<std::vector<double>> polls;
      for (std::size_t j = 0; j < dim; ++j) {
        for (double sign : {1.0, -1.0}) {
          std::vector<double> p(y);
          p[j] = std::clamp(p[j] + sign * step, 0.0, 1.0);
          if (p[j] != y[j]) polls.push_back(std::move(p));
        }
      }
      if (polls.empty()) break;
      const std::size_t count = std::min(polls.size(), options.budget - out.evaluations);
      std::vector<double> values(count);
      parallel_for(count, options.jobs, [&](std::size_t i) { values[i] = safe(polls[i]); });
      out.evaluations += count;
      std::size_t best = 0;
      for (std::size_t i = 1; i < count; ++i) {
        if (values[i] > values[best]) best = i;
      }
      if (values[best] > out.best) {
        out.best = values[best];
        out.argmax_unit = polls[best];
      }
      if (values[best] > value) {
        value = values[best];
        y = polls[best];
      } else {
        step *= 0.5;
      }
      if (count < polls.size()) break;
    }
  }
  out.budget_exhausted = true;
  return out;
}

nlohmann::json SupEstimate::to_json() const {
  return {{"value", value},         {"log_value", log_value},     {"argmax", argmax},
          {"evaluations", evaluations}, {"saturated", saturated}, {"budget_exhausted", budget_exhausted}};
}

double atmsc_log_objective(const RadialProfile& u, int N, double q, double lambda, double beta) {
  const double grad = dirichlet_norm(u);
  if (!(grad > 0.0) || !std::isfinite(grad)) return kNegInf;
  const auto unit = u.scaled(1.0 / grad);
  TMParams p;
  p.N = N;
  p.q = q;
  p.beta = beta;
  p.lambda = lambda;
  const auto integral = tm_integral(unit, p, TMVariant::Phi);
  return integral.log_value - q * (1.0 - beta / N) * log_lq_norm(unit, q);
}

double atmc_log_objective(const RadialProfile& u, int N, double q, double beta, double a, double b,
                          double t, double lambda_N) {
  if (!(t > 0.0 && t < 1.0)) return kNegInf;
  const double grad = dirichlet_norm(u);
  if (!(grad > 0.0) || !std::isfinite(grad)) return kNegInf;
  const double c = std::pow(t, 1.0 / a) / grad;
  const double log_norm = std::log(c) + log_lq_norm(u, q);
  // ||dilate(w, s)||_q = s^{-N/q} ||w||_q
  const double log_s = q / N * (log_norm - std::log1p(-t) / b);
  const auto v = u.scaled(c).dilated(std::exp(log_s));
  TMParams p;
  p.N = N;
  p.q = q;
  p.beta = beta;
  p.lambda = lambda_N;
  return tm_integral(v, p, TMVariant::Phi).log_value;
}

namespace {

SupEstimate finish_estimate(const SearchResult& r, std::vector<double> argmax) {
  SupEstimate e;
  e.log_value = r.best;
  e.saturated = r.best > 709.0;
  e.value = e.saturated ? kInf : std::exp(r.best);
  e.argmax = std::move(argmax);
  e.evaluations = r.evaluations;
  e.budget_exhausted = r.budget_exhausted;
  return e;
}

// Maps the extra unit coordinate to the mass split t.
double unit_to_t(double y) { return 1e-3 + y * (1.0 - 2e-3); }

}  // namespace

SupEstimate estimate_atmsc(int N, double q, double lambda, double beta, const GaugeConstants& c,
                           const ProfileFamily& family, const SearchOptions& options) {
  if (!(lambda > 0.0 && lambda < c.lambda)) throw DomainError("estimate_atmsc: need 0 < lambda < lambda_N");
  if (c.dim != N) throw DomainError("estimate_atmsc: gauge dimension mismatch");
  auto f = [&](std::span<const double> y) {
    const auto u = family.realize(family.from_unit(y), beta, c, "search");
    return atmsc_log_objective(u, N, q, lambda, beta);
  };
  const auto r = pattern_search(f, family.dimension(), options);
  return finish_estimate(r, family.from_unit(r.argmax_unit));
}

SupEstimate estimate_atmc(int N, double q, double beta, double a, double b, const GaugeConstants& c,
                          const ProfileFamily& family, const SearchOptions& options) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("estimate_atmc: need a, b > 0");
  if (c.dim != N) throw DomainError("estimate_atmc: gauge dimension mismatch");
  const std::size_t d = family.dimension();
  auto f = [&](std::span<const double> y) {
    const auto u = family.realize(family.from_unit(y.first(d)), beta, c, "search");
    return atmc_log_objective(u, N, q, beta, a, b, unit_to_t(y[d]), c.lambda);
  };
  const auto r = pattern_search(f, d + 1, options);
  auto argmax = family.from_unit(std::span<const double>(r.argmax_unit).first(d));
  argmax.push_back(unit_to_t(r.argmax_unit[d]));
  return finish_estimate(r, std::move(argmax));
}

double atmc_bracket(double lambda_rel, int N, double q, double beta, double a, double b) {
  if (!(lambda_rel > 0.0 && lambda_rel < 1.0)) throw DomainError("atmc_bracket: need 0 < lambda/lambda_N < 1");
  const double n = N;
  const double inner = (1.0 - std::pow(lambda_rel, a * (n - 1.0) / n)) / std::pow(lambda_rel, b * (n - 1.0) / n);
  return std::pow(inner, q / b * (1.0 - beta / n));
}

nlohmann::json IdentityCheck::to_json() const {
  return {{"lhs", lhs},         {"rhs", rhs},         {"reldiff", reldiff}, {"best_lambda_rel", best_lambda_rel},
          {"lambda_grid", lambda_grid}, {"atmsc", atmsc}, {"products", products}, {"atmc", atmc.to_json()}};
}

IdentityCheck atmc_identity_check(int N, double q, double beta, double a, double b,
                                  std::span<const double> lambda_grid_rel, const GaugeConstants& c,
                                  const ProfileFamily& family, const SearchOptions& options) {
  if (!(b <= N)) throw DomainError("atmc_identity_check: requires b <= N");
  if (lambda_grid_rel.empty()) throw DomainError("atmc_identity_check: empty lambda grid");
  IdentityCheck out;
  out.atmc = estimate_atmc(N, q, beta, a, b, c, family, options);
  out.lhs = out.atmc.value;
  out.lambda_grid.assign(lambda_grid_rel.begin(), lambda_grid_rel.end());
  out.rhs = 0.0;
  for (double l : lambda_grid_rel) {
    const auto e = estimate_atmsc(N, q, l * c.lambda, beta, c, family, options);
    const double product = atmc_bracket(l, N, q, beta, a, b) * e.value;
    out.atmsc.push_back(e.value);
    out.products.push_back(product);
    if (product > out.rhs) {
      out.rhs = product;
      out.best_lambda_rel = l;
    }
  }
  out.reldiff = std::abs(out.lhs - out.rhs) / std::max(out.lhs, out.rhs);
  return out;
}

// ---------------------------------------------------------------------------

nlohmann::json GrowthReport::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    pts.push_back({{"n", p.n},
                   {"scale", p.scale},
                   {"log_integral", p.log_integral},
                   {"log_norm", p.log_norm},
                   {"log_ratio", p.log_ratio},
                   {"error_estimate", p.error_estimate},
                   {"saturated", p.saturated},
                   {"within_hypothesis", p.within_hypothesis}});
  }
  return {{"theorem", to_string(theorem)},
          {"params", params.to_json()},
          {"lambda_rel", lambda_rel},
          {"sequence", sequence},
          {"fit_target", fit_target},
          {"fit_mode", fit_mode},
          {"fitted_exponent", fitted_exponent},
          {"predicted_exponent", predicted_exponent},
          {"r_squared", r_squared},
          {"fit_skip", fit_skip},
          {"divergent", divergent},
          {"top_half_slope", top_half_slope},
          {"top_half_r_squared", top_half_r_squared},
          {"points", pts}};
}

double predicted_growth(Theorem t, const TMParams& params, double lambda_rel,
                        const std::string& fit_target, const std::string& fit_mode) {
  const double n = params.N;
  const double damp = 1.0 - params.beta / n;
  constexpr double kRelTol = 1e-12;
  if (fit_mode == "log-linear") return lambda_rel - 1.0;
  const bool critical = lambda_rel >= 1.0 - kRelTol;
  switch (t) {
    case Theorem::T11: {
      const double integral = params.p * (n - 1.0) / n;
      if (fit_target == "integral") return critical ? integral : std::nan("");
      return critical ? integral + params.q * damp / n : 0.0;
    }
    case Theorem::T14:
      return params.p < params.q ? (params.q - params.p) / n * damp : 0.0;
    case Theorem::T15:
      return -params.p / n * (1.0 - 1.0 / params.k) * damp;
    case Theorem::T16:
      return params.p < params.q ? (params.q - params.p) / n * (1.0 - 1.0 / params.k) * damp : 0.0;
  }
  return 0.0;
}

bool detect_divergence(std::span<const double> n, std::span<const double> log_values, double* slope,
                       double* r_squared) {
  if (n.size() != log_values.size() || n.size() < 4) throw DomainError("detect_divergence: need >= 4 points");
  const std::size_t start = n.size() / 2;
  std::vector<double> x, y;
  for (std::size_t i = start; i < n.size(); ++i) {
    x.push_back(std::log(n[i]));
    y.push_back(log_values[i]);
  }
  const auto fit = fit_line(x, y);
  if (slope) *slope = fit.slope;
  if (r_squared) *r_squared = fit.r_squared;
  return fit.slope > 0.05 && fit.r_squared >= 0.98;
}

GrowthReport sharpness_sweep(Theorem theorem, const TMParams& params, const GaugeConstants& c,
                             const std::string& gauge_label, std::span<const double> n_list,
                             const SweepOptions& options) {
  params.validate();
  if (c.dim != params.N) throw DomainError("sharpness_sweep: gauge dimension mismatch");
  if (n_list.size() < options.fit_skip + 2) throw DomainError("sharpness_sweep: n_list too short for the fit");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (!(n_list[i] > 0.0) || (i > 0 && !(n_list[i] > n_list[i - 1]))) {
      throw DomainError("sharpness_sweep: n_list must be positive and increasing");
    }
  }
  GrowthReport rep;
  rep.theorem = theorem;
  rep.params = params;
  rep.lambda_rel = params.lambda / c.lambda;
  rep.sequence = (theorem == Theorem::T15 || theorem == Theorem::T16) ? "c_n u_n" : "u_n";
  const bool supercritical = rep.lambda_rel > 1.0 + 1e-12;
  rep.fit_mode = !options.fit_mode.empty() ? options.fit_mode : (supercritical ? "log-linear" : "log-log");
  rep.fit_target = !options.fit_target.empty()
                       ? options.fit_target
                       : (theorem == Theorem::T11 && rep.lambda_rel >= 1.0 - 1e-12 ? "integral" : "ratio");
  if (rep.fit_mode != "log-log" && rep.fit_mode != "log-linear") throw ConfigError("fit_mode", "expected log-log or log-linear");
  if (rep.fit_target != "ratio" && rep.fit_target != "integral") throw ConfigError("fit_target", "expected ratio or integral");
  rep.fit_skip = options.fit_skip;

  rep.points.resize(n_list.size());
  parallel_for(n_list.size(), options.jobs, [&](std::size_t i) {
    GrowthPoint& pt = rep.points[i];
    pt.n = n_list[i];
    auto u = moser_profile(pt.n, params.beta, c, gauge_label);
    if (theorem == Theorem::T15 || theorem == Theorem::T16) {
      const double norm = lq_norm(u, params.q);
      pt.scale = theorem == Theorem::T15 ? solve_scale(norm, params.a, params.k * params.N)
                                         : solve_scale(norm, params.a, params.N);
      u = u.scaled(pt.scale);
    }
    const auto r = ratio(u, params, theorem);
    const auto integral = tm_integral(u, params, theorem_variant(theorem));
    pt.log_integral = integral.log_value;
    pt.log_norm = log_lq_norm(u, params.q);
    pt.log_ratio = r.log_value;
    pt.error_estimate = r.error_estimate;
    pt.saturated = r.saturated;
    pt.within_hypothesis = r.within_hypothesis;
  });

  std::vector<double> x, y, all_n, all_log;
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    const auto& p = rep.points[i];
    all_n.push_back(p.n);
    all_log.push_back(p.log_ratio);
    if (i < rep.fit_skip) continue;
    x.push_back(rep.fit_mode == "log-log" ? std::log(p.n) : p.n);
    y.push_back(rep.fit_target == "ratio" ? p.log_ratio : p.log_integral);
  }
  const auto fit = fit_line(x, y);
  rep.fitted_exponent = fit.slope;
  rep.r_squared = fit.r_squared;
  rep.predicted_exponent = predicted_growth(theorem, params, rep.lambda_rel, rep.fit_target, rep.fit_mode);
  if (all_n.size() >= 4) {
    rep.divergent = detect_divergence(all_n, all_log, &rep.top_half_slope, &rep.top_half_r_squared);
  }
  return rep;
}

nlohmann::json AtmcGrowth::to_json() const {
  return {{"n", n},       {"log_values", log_values}, {"best_t", best_t},
          {"slope", slope}, {"r_squared", r_squared}, {"divergent", divergent}};
}

AtmcGrowth atmc_moser_growth(int N, double q, double beta, double a, double b, const GaugeConstants& c,
                             std::span<const double> n_list, int jobs) {
  if (c.dim != N) throw DomainError("atmc_moser_growth: gauge dimension mismatch");
  AtmcGrowth out;
  out.n.assign(n_list.begin(), n_list.end());
  out.log_values.resize(n_list.size());
  out.best_t.resize(n_list.size());
  parallel_for(n_list.size(), jobs, [&](std::size_t i) {
    const auto u = moser_profile(n_list[i], beta, c, "search", 2);
    // t = logistic(z); coarse scan then golden-section refinement in z.
    auto obj = [&](double z) { return atmc_log_objective(u, N, q, beta, a, b, 1.0 / (1.0 + std::exp(-z)), c.lambda); };
    double best_z = -12.0, best = kNegInf;
    constexpr int kScan = 97;
    for (int j = 0; j < kScan; ++j) {
      const double z = -12.0 + 24.0 * j / (kScan - 1);
      const double v = obj(z);
      if (v > best) {
        best = v;
        best_z = z;
      }
    }
    double lo = best_z - 0.25, hi = best_z + 0.25;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = obj(x1), f2 = obj(x2);
    for (int it = 0; it < 60; ++it) {
      if (f1 > f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = obj(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = obj(x2);
      }
    }
    const double z = f1 > f2 ? x1 : x2;
    const double v = std::max(f1, f2);
    out.log_values[i] = std::max(v, best);
    out.best_t[i] = 1.0 / (1.0 + std::exp(-(v >= best ? z : best_z)));
  });
  out.divergent = detect_divergence(out.n, out.log_values, &out.slope, &out.r_squared);
  return out;
}

SymmetrizationIdentity symmetrization_identity(const RadialProfile& u_star, const TMParams& params,
                                               TMVariant variant) {
  const int dim = u_star.dim();
  const double omega = unit_ball_volume(dim);
  const double gamma = std::pow(u_star.kappa() / omega, 1.0 / dim);
  const auto u_schwarz = u_star.dilated(1.0 / gamma).retagged(omega, Gauge::euclidean(dim).describe());
  SymmetrizationIdentity out;
  out.dirichlet_lhs = std::pow(dirichlet_norm(u_star), dim);
  out.dirichlet_rhs = std::pow(gamma, dim) * std::pow(dirichlet_norm(u_schwarz), dim);
  out.integral_lhs = tm_integral(u_star, params, variant).log_value;
  out.integral_rhs = params.beta * std::log(gamma) + tm_integral(u_schwarz, params, variant).log_value;
  out.dirichlet_reldiff = std::abs(out.dirichlet_lhs - out.dirichlet_rhs) / std::max(out.dirichlet_lhs, out.dirichlet_rhs);
  out.integral_reldiff = std::abs(std::expm1(out.integral_lhs - out.integral_rhs));
  return out;
}

ScalingEquivalence scaling_equivalence(const RadialProfile& v, const TMParams& params) {
  params.validate();
  const double n = params.N;
  const double log_qv = log_lq_norm(v, params.q);
  ScalingEquivalence out;
  out.lambda = std::exp((1.0 - 1.0 / params.k) * params.q / n * log_qv);
  const auto u = v.dilated(out.lambda);
  const double log_qu = log_lq_norm(u, params.q);
  out.constraint_v = std::pow(dirichlet_norm(v), params.a) + std::exp(n * log_qv);
  out.constraint_u = std::pow(dirichlet_norm(u), params.a) + std::exp(params.k * n * log_qu);
  out.ratio_weighted = ratio(v, params, Theorem::T16).log_value;
  out.ratio_unweighted = ratio(u, params, Theorem::T15).log_value;
  out.integral_v = tm_integral(v, params, TMVariant::PhiExactGrowthK).log_value;
  out.integral_u_scaled =
      (n - params.beta) * std::log(out.lambda) + tm_integral(u, params, TMVariant::PhiExactGrowthK).log_value;
  out.ratio_reldiff = std::abs(std::expm1(out.ratio_weighted - out.ratio_unweighted));
  out.integral_reldiff = std::abs(std::expm1(out.integral_v - out.integral_u_scaled));
  out.constraint_reldiff = std::abs(out.constraint_v - out.constraint_u) / std::max(out.constraint_v, out.constraint_u);
  const double back = std::exp(-(params.k - 1.0) * params.q / n * log_qu);
  const auto v2 = u.dilated(back);
  out.roundtrip_reldiff = std::abs(std::expm1(log_lq_norm(v2, params.q) - log_qv));
  return out;
}

RadialProfile random_profile(int dim, double kappa, const std::string& gauge_label, std::uint64_t seed,
                             std::size_t nodes) {
  if (nodes < 4) throw DomainError("random_profile: need at least 4 nodes");
  std::uint64_t state = seed;
  auto uniform = [&state](double lo, double hi) {
    state = splitmix64(state);
    return lo + (hi - lo) * static_cast<double>(state >> 11) * 0x1.0p-53;
  };
  const double log_support = uniform(-1.0, 1.0);
  const double range = uniform(2.0, 12.0);
  const double height = uniform(0.2, 1.0);
  constexpr int kKnots = 8;
  double slopes[kKnots];
  for (double& s : slopes) s = std::exp(uniform(-1.5, 1.5));
  std::vector<double> s(nodes), v(nodes);
  double acc = 0.0;
  // Walk inward from the support radius; each node adds the slope of its knot segment.
  for (std::size_t j = 0; j < nodes; ++j) {
    const std::size_t i = nodes - 1 - j;
    s[i] = j == 0 ? log_support : log_support - range * static_cast<double>(j) / static_cast<double>(nodes - 1);
    if (j > 0) {
      const auto seg = std::min<std::size_t>(kKnots - 1, (j - 1) * kKnots / (nodes - 1));
      acc += slopes[seg] * range / static_cast<double>(nodes - 1);
    }
    v[i] = acc;
  }
  const double top = v.front();
  for (double& x : v) x *= height / top;
  return RadialProfile(std::move(s), std::move(v), dim, kappa, gauge_label);
}

}  // namespace tmlab

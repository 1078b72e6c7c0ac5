// Invariant suites run by `tmlab verify`.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tmlab/errors.hpp"
#include "tmlab/rearrange.hpp"
#include "tmlab/runner.hpp"
#include "tmlab/seqopt.hpp"
#include "tmlab/supsearch.hpp"

namespace tmlab {

Check make_check(std::string module, std::string name, double value, std::string relation, double bound) {
  Check c{std::move(module), std::move(name), value, bound, std::move(relation), false};
  if (c.relation == "<=") {
    c.pass = value <= bound;
  } else if (c.relation == ">=") {
    c.pass = value >= bound;
  } else {
    throw DomainError("make_check: unknown relation " + c.relation);
  }
  return c;
}

namespace {

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  Vec direction(int dim) {
    Vec v(static_cast<std::size_t>(dim));
    double n = 0.0;
    while (n < 1e-8) {
      for (double& x : v) x = normal_(rng_);
      n = norm2(v);
    }
    for (double& x : v) x /= n;
    return v;
  }
  Vec vector(int dim) {
    Vec v = direction(dim);
    const double len = std::exp(uniform(-2.0, 2.0));
    for (double& x : v) x *= len;
    return v;
  }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<Check> finsler_suite(const ExperimentConfig& cfg) {
  const std::string m = "finsler";
  const Gauge g = cfg.make_gauge();
  const int n = g.dim();
  const auto c = constants(g);
  std::vector<Check> out;
  out.push_back(make_check(m, "kappa", c.kappa, ">=", 0.0));
  if (const auto cf = g.wulff_volume_closed_form()) {
    out.push_back(make_check(m, "kappa_closed_form_reldiff", rel_diff(c.kappa, *cf), "<=", 1e-4));
  }
  const double nn = n;
  out.push_back(make_check(m, "lambda_formula_reldiff",
                           rel_diff(c.lambda, std::pow(nn, nn / (nn - 1)) * std::pow(c.kappa, 1 / (nn - 1))), "<=",
                           1e-12));
  out.push_back(make_check(m, "alpha_formula_reldiff",
                           rel_diff(c.alpha, std::pow(nn, nn / (nn - 1)) * std::pow(c.omega, 1 / (nn - 1))), "<=",
                           1e-12));
  out.push_back(make_check(m, "gamma_formula_reldiff", rel_diff(c.gamma, std::pow(c.kappa / c.omega, 1 / nn)), "<=",
                           1e-12));

  Sampler rs(child_seed(cfg.seed, 101));
  double homog = 0.0, euler = 0.0, dual_grad = 0.0, dual_polar = 0.0, tri = 0.0, lip = 0.0;
  const auto bounds = g.lipschitz_bounds();
  for (int i = 0; i < 100; ++i) {
    const Vec xi = rs.vector(n);
    const double t = rs.uniform(-10.0, 10.0);
    Vec txi(xi);
    for (double& v : txi) v *= t;
    const double f = g.eval(xi);
    homog = std::max(homog, std::abs(g.eval(txi) - std::abs(t) * f) / (std::abs(t) * f));
    const Vec gr = g.grad(xi);
    euler = std::max(euler, std::abs(dot(xi, gr) - f) / f);
    dual_grad = std::max(dual_grad, std::abs(g.polar(gr) - 1.0));
    const Vec x = rs.vector(n);
    dual_polar = std::max(dual_polar, std::abs(g.eval(g.grad_polar(x)) - 1.0));
    const Vec y = rs.vector(n);
    Vec s(x);
    for (std::size_t k = 0; k < s.size(); ++k) s[k] += y[k];
    tri = std::max(tri, (g.eval(s) - g.eval(x) - g.eval(y)) / (g.eval(x) + g.eval(y)));
  }
  for (int i = 0; i < 1000; ++i) {
    const Vec d = rs.direction(n);
    const double f = g.eval(d);
    lip = std::max({lip, (bounds.lower - f) / f, (f - bounds.upper) / f});
  }
  out.push_back(make_check(m, "homogeneity_max_rel", homog, "<=", 1e-10));
  out.push_back(make_check(m, "euler_identity_max_rel", euler, "<=", 1e-6));
  out.push_back(make_check(m, "polar_of_grad_max_abs", dual_grad, "<=", 1e-5));
  out.push_back(make_check(m, "gauge_of_polar_grad_max_abs", dual_polar, "<=", 1e-5));
  out.push_back(make_check(m, "triangle_max_excess", tri, "<=", 1e-9));
  out.push_back(make_check(m, "bi_lipschitz_max_rel_violation", lip, "<=", 1e-12));

  // Polar of the polar, with the polar treated as a black-box gauge.
  const Gauge dual = Gauge::generic(n, [g](std::span<const double> x) { return g.polar(x); }, "polar");
  double involution = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Vec xi = rs.vector(n);
    involution = std::max(involution, rel_diff(dual.polar(xi), g.eval(xi)));
  }
  out.push_back(make_check(m, "involution_max_rel", involution, "<=", 1e-6));

  double coarea = 0.0;
  for (double r : {0.5, 1.0, 2.0}) {
    coarea = std::max(coarea, rel_diff(coarea_integral(g, r), nn * c.kappa * std::pow(r, nn - 1)));
  }
  out.push_back(make_check(m, "coarea_max_rel", coarea, "<=", 1e-3));
  return out;
}

std::vector<Check> profiles_suite(const ExperimentConfig& cfg) {
  const std::string m = "profiles";
  const Gauge g = cfg.make_gauge();
  const auto c = constants(g);
  const int n = c.dim;
  const auto params = cfg.resolved_params(c);
  std::vector<Check> out;
  double dir = 0.0, cont = 0.0;
  std::vector<double> ln_n, ln_norm, cn;
  for (double k : {4.0, 8.0, 16.0, 32.0, 64.0}) {
    const auto u = moser_profile(k, params.beta, c, g.describe());
    dir = std::max(dir, std::abs(dirichlet_norm(u) - 1.0));
    const double edge = -k / (n - params.beta);
    const double plateau = std::pow(1.0 / (n * c.kappa), 1.0 / n) * std::pow(k / (n - params.beta), (n - 1.0) / n);
    cont = std::max({cont, std::abs(u.at_log_radius(edge) - plateau) / plateau, std::abs(u.at_log_radius(0.0))});
    ln_n.push_back(std::log(k));
    ln_norm.push_back(log_lq_norm(u, params.q));
    cn.push_back(solve_cn(u, params.a, n, params.q));
  }
  out.push_back(make_check(m, "moser_dirichlet_max_abs", dir, "<=", 1e-8));
  out.push_back(make_check(m, "moser_continuity_max_rel", cont, "<=", 1e-12));
  const auto fit = fit_line(ln_n, ln_norm);
  out.push_back(make_check(m, "moser_norm_slope_dev", std::abs(fit.slope + 1.0 / n), "<=", 0.05));
  bool monotone = true;
  for (std::size_t i = 1; i < cn.size(); ++i) monotone = monotone && cn[i] > cn[i - 1] && cn[i] <= 1.0;
  out.push_back(make_check(m, "cn_increasing", monotone ? 1.0 : 0.0, ">=", 1.0));
  out.push_back(make_check(m, "cn_closed_form_abs", std::abs(solve_cn(1.0, n, n) - std::pow(2.0, -1.0 / n)), "<=", 1e-12));

  double constraint = 0.0;
  for (double k : {4.0, 16.0, 64.0}) {
    const auto u = moser_profile(k, params.beta, c, g.describe());
    const double cnk = solve_cn(u, params.a, n, params.q);
    const auto v = u.scaled(cnk);
    constraint = std::max(constraint, std::abs(std::pow(dirichlet_norm(v), params.a) +
                                               std::pow(lq_norm(v, params.q), n) - 1.0));
  }
  out.push_back(make_check(m, "cn_constraint_max_abs", constraint, "<=", 1e-8));

  const auto u = random_profile(n, c.kappa, g.describe(), child_seed(cfg.seed, 201));
  const auto a = u.dilated(2.0).dilated(3.0);
  const auto b = u.dilated(6.0);
  double comp = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    comp = std::max({comp, std::abs(a.log_radius(i) - b.log_radius(i)), std::abs(a.value(i) - b.value(i))});
  }
  out.push_back(make_check(m, "dilation_composition_max_abs", comp, "<=", 0.0));
  double law = 0.0;
  for (double lam : {0.25, 3.0, 40.0}) {
    const auto v = u.dilated(lam);
    law = std::max({law, rel_diff(lq_norm(v, params.q), std::pow(lam, -n / params.q) * lq_norm(u, params.q)),
                    rel_diff(dirichlet_norm(v), dirichlet_norm(u))});
  }
  out.push_back(make_check(m, "dilation_scaling_max_rel", law, "<=", 1e-10));
  return out;
}

std::vector<Check> functionals_suite(const ExperimentConfig& cfg) {
  const std::string m = "functionals";
  const Gauge g = cfg.make_gauge();
  const auto c = constants(g);
  const int n = c.dim;
  const auto params = cfg.resolved_params(c);
  std::vector<Check> out;

  Sampler rs(child_seed(cfg.seed, 301));
  const int j0 = phi_start_index(n, params.q, params.beta);
  double closed = 0.0, above = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double t = rs.uniform(0.0, 40.0);
    const auto phi = phi_series(t, n, params.q, params.beta);
    double poly = 0.0, term = 1.0;
    for (int j = 0; j < j0; ++j) {
      poly += term;
      term *= t / (j + 1);
    }
    closed = std::max(closed, std::abs(phi.value - (std::exp(t) - poly)) / std::exp(t));
    above = std::max(above, phi.value - std::exp(t));
  }
  out.push_back(make_check(m, "phi_closed_form_max_rel", closed, "<=", 1e-12));
  out.push_back(make_check(m, "phi_below_exp_max_excess", above, "<=", 0.0));

  TMParams sub = params;
  sub.lambda = 0.5 * c.lambda;
  double id1 = 0.0, id2 = 0.0, mono = 0.0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto u = random_profile(n, c.kappa, g.describe(), child_seed(cfg.seed, 310 + i));
    const auto s = symmetrization_identity(u, sub, TMVariant::Phi);
    id1 = std::max(id1, s.dirichlet_reldiff);
    id2 = std::max(id2, s.integral_reldiff);
    const double lo = tm_integral(u, sub, TMVariant::Phi).log_value;
    const double hi = tm_integral(u.scaled(1.1), sub, TMVariant::Phi).log_value;
    mono = std::max(mono, lo - hi);
  }
  out.push_back(make_check(m, "lemma31_dirichlet_max_rel", id1, "<=", 1e-4));
  out.push_back(make_check(m, "lemma31_integral_max_rel", id2, "<=", 1e-4));
  out.push_back(make_check(m, "monotone_under_increase_max_drop", mono, "<=", 0.0));

  // Radial reduction against a grid sum of the lifted profile.
  if (n == 2) {
    TMParams flat = sub;
    flat.beta = 0.0;
    flat.lambda = 0.5 * c.lambda;
    const auto u = moser_profile(4.0, 0.0, c, g.describe());
    const double half = 1.2 * g.lipschitz_bounds().upper;
    constexpr std::size_t cells = 256;
    const auto lifted = lift_profile(u, g, cells, 2.0 * half / cells);
    double grid = 0.0;
    for (double v : lifted.values()) {
      if (v > 0.0) grid += std::exp(tm_log_integrand(v, flat, TMVariant::Phi));
    }
    grid *= lifted.cell_volume();
    out.push_back(make_check(m, "radial_vs_grid_rel", rel_diff(grid, tm_integral(u, flat, TMVariant::Phi).value), "<=",
                             0.03));
  }

  const auto zero = RadialProfile({-1.0, 0.0}, {0.0, 0.0}, n, c.kappa, g.describe());
  bool degenerate = false;
  try {
    (void)ratio(zero, sub, Theorem::T11);
  } catch (const DomainError&) {
    degenerate = true;
  }
  out.push_back(make_check(m, "zero_profile_ratio_rejected", degenerate ? 1.0 : 0.0, ">=", 1.0));
  out.push_back(make_check(m, "moser_grad_constraint_slack_abs",
                           std::abs(constraint_check(moser_profile(16.0, params.beta, c, g.describe()), params,
                                                     ConstraintKind::GradOnly)
                                        .slack),
                           "<=", 1e-8));
  return out;
}

std::vector<Check> rearrange_suite(const ExperimentConfig& cfg, std::size_t count) {
  const std::string m = "rearrange";
  const Gauge g = cfg.make_gauge();
  const int n = g.dim();
  const auto c = constants(g);
  const auto params = cfg.resolved_params(c);
  const std::size_t cells = n == 2 ? cfg.symcheck.cells : std::min<std::size_t>(cfg.symcheck.cells, 48);
  std::vector<Check> out;
  double equi = 0.0, lq = 0.0, ps = kNegInf, hl = kNegInf, schwarz = 0.0;
  const bool euclidean = cfg.gauge.value("form", "") == "pnorm" && cfg.gauge.at("p").is_number() &&
                         cfg.gauge.at("p").get<double>() == 2.0;
  std::vector<SampledFunction> corpus;
  for (std::size_t i = 0; i < count; ++i) corpus.push_back(multibump(n, cells, child_seed(cfg.seed, 400 + i)));
  for (std::size_t i = 0; i < count; ++i) {
    const auto& u = corpus[i];
    const auto star = convex_symmetrization(u, g);
    const double top = *std::max_element(u.values().begin(), u.values().end());
    const double cell = u.cell_volume();
    for (int j = 0; j < 50; ++j) {
      const double s = top * (j + 0.5) / 50.0;
      equi = std::max(equi, std::abs(u.superlevel_measure(s) - superlevel_measure(star, s)) / cell);
    }
    lq = std::max(lq, rel_diff(u.lq_norm(params.q), lq_norm(star, params.q)));
    const auto p = check_polya_szego(u, g, cfg.symcheck.stride);
    ps = std::max(ps, p.rhs / p.lhs - 1.0);
    const auto h = check_hardy_littlewood(u, corpus[(i + 1) % count], g);
    hl = std::max(hl, h.lhs / h.rhs - 1.0);
    if (euclidean) {
      const auto sw = schwarz_symmetrization(u);
      for (std::size_t k = 0; k < sw.size(); ++k) {
        schwarz = std::max({schwarz, std::abs(sw.log_radius(k) - star.log_radius(k)), std::abs(sw.value(k) - star.value(k))});
      }
    }
  }
  out.push_back(make_check(m, "equimeasurability_max_cells", equi, "<=", 2.0));
  out.push_back(make_check(m, "lq_preservation_max_rel", lq, "<=", 0.02));
  out.push_back(make_check(m, "polya_szego_max_excess", ps, "<=", 0.05));
  out.push_back(make_check(m, "hardy_littlewood_max_excess", hl, "<=", 1e-12));
  out.push_back(make_check(m, "schwarz_equals_convex_when_euclidean", schwarz, "<=", 1e-8));
  return out;
}

std::vector<Check> seqopt_suite(const ExperimentConfig& cfg) {
  const std::string m = "seqopt";
  const Gauge g = cfg.make_gauge();
  const auto c = constants(g);
  std::vector<Check> out;
  MuOptions opt;
  opt.seed = cfg.seed;
  opt.jobs = cfg.jobs;
  opt.starts = cfg.mu.starts;
  const double closed = std::sqrt(1.0 - std::exp(-1.0));
  const auto r1 = mu_estimate(1.0, 2.0, 2.0, opt);
  out.push_back(make_check(m, "mu1_upper_excess", r1.mu_upper - closed, "<=", 1e-4));
  out.push_back(make_check(m, "mu1_lower_ratio", r1.mu_upper / closed, ">=", 0.99));
  const auto n1 = seq_norms(r1.a, 2.0, 2.0);
  out.push_back(make_check(m, "mu1_feasibility_abs", std::max(std::abs(n1.l1 - 1.0), n1.lN - 1.0), "<=", 1e-10));

  const double q = cfg.params.q, nn = cfg.params.N;
  double prev = 0.0, drop = 0.0, kkt = 0.0;
  for (double h : {1.0, 1.5, 2.0, 2.5, 3.0}) {
    const auto r = mu_estimate(h, q, nn, opt);
    drop = std::max(drop, prev - r.mu_upper);
    prev = r.mu_upper;
    kkt = std::max(kkt, r.kkt_residual);
  }
  out.push_back(make_check(m, "mu_monotone_max_drop", drop, "<=", 0.0));
  out.push_back(make_check(m, "mu_kkt_residual_max", kkt, "<=", 1e-6));

  double a_norm = 0.0, tele = 0.0, constant = 0.0;
  for (double k : {8.0, 16.0, 32.0}) {
    const auto u = moser_profile(k, 0.0, c, g.describe());
    const double R = std::exp(-0.5 * k / c.dim);
    const auto rep = lemma32_check(u, R, 1.0, q);
    a_norm = std::max(a_norm, rep.a_norm_N);
    tele = std::max(tele, rep.telescoping_residual);
    constant = std::max(constant, rep.constant);
  }
  out.push_back(make_check(m, "lemma32_a_norm_N_max", a_norm, "<=", 1.0 + 1e-12));
  out.push_back(make_check(m, "lemma32_telescoping_max", tele, "<=", 1e-12));
  out.push_back(make_check(m, "lemma32_constant_finite", std::isfinite(constant) ? constant : kInf, "<=", 1e300));
  return out;
}

std::vector<Check> supsearch_suite(const ExperimentConfig& cfg) {
  const std::string m = "supsearch";
  const Gauge g = cfg.make_gauge();
  const auto c = constants(g);
  const int n = c.dim;
  auto params = cfg.resolved_params(c);
  params.lambda = c.lambda;
  std::vector<Check> out;

  double eq = 0.0, rt = 0.0;
  for (std::uint64_t i = 0; i < 5; ++i) {
    const auto u = random_profile(n, c.kappa, g.describe(), child_seed(cfg.seed, 500 + i));
    const auto unit = u.scaled(1.0 / dirichlet_norm(u));
    const auto v = unit.scaled(0.999 * solve_scale(lq_norm(unit, params.q), params.a, n));
    const auto s = scaling_equivalence(v, params);
    eq = std::max({eq, s.ratio_reldiff, s.integral_reldiff, s.constraint_reldiff});
    rt = std::max(rt, s.roundtrip_reldiff);
  }
  out.push_back(make_check(m, "equivalence_bookkeeping_max_rel", eq, "<=", 1e-6));
  out.push_back(make_check(m, "equivalence_roundtrip_max_rel", rt, "<=", 1e-12));

  SearchOptions so;
  so.seed = cfg.seed;
  so.jobs = cfg.jobs;
  so.budget = 60;
  const auto family = cfg.make_family();
  const double lam = 0.5 * c.lambda;
  const auto small = estimate_atmsc(n, params.q, lam, params.beta, c, family, so);
  so.budget = 120;
  const auto large = estimate_atmsc(n, params.q, lam, params.beta, c, family, so);
  out.push_back(make_check(m, "budget_monotonicity_drop", small.log_value - large.log_value, "<=", 0.0));
  const auto arg = family.realize(large.argmax, params.beta, c, "search");
  const double again = atmsc_log_objective(arg, n, params.q, lam, params.beta);
  out.push_back(make_check(m, "argmax_reevaluation_rel", std::abs(std::expm1(again - large.log_value)), "<=", 1e-8));

  TMParams t11;
  t11.N = n;
  t11.q = 2.0;
  t11.p = 2.0;
  t11.lambda = 0.5 * c.lambda;
  std::vector<double> ns;
  // The ratio settles to its limit like n^{-1/2}; in N >= 3 the transient is
  // larger, so the window starts further out.
  const double first = n == 2 ? 64.0 : 512.0, span = n == 2 ? 32.0 : 64.0;
  for (int i = 0; i < 12; ++i) ns.push_back(first * std::pow(span, i / 11.0));
  const auto rep = sharpness_sweep(Theorem::T11, t11, c, g.describe(), ns, SweepOptions{"", "", 3, cfg.jobs});
  out.push_back(make_check(m, "t11_subcritical_slope_abs", std::abs(rep.fitted_exponent), "<=", 0.05));
  return out;
}

}  // namespace

std::vector<Check> verify_suite(const std::string& module, const ExperimentConfig& config) {
  if (module == "all") {
    std::vector<Check> out;
    for (const char* mod : {"finsler", "profiles", "functionals", "rearrange", "seqopt", "supsearch"}) {
      auto part = verify_suite(mod, config);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  if (module == "finsler") return finsler_suite(config);
  if (module == "profiles") return profiles_suite(config);
  if (module == "functionals") return functionals_suite(config);
  if (module == "rearrange") return rearrange_suite(config, std::min<std::size_t>(config.symcheck.count, 5));
  if (module == "seqopt") return seqopt_suite(config);
  if (module == "supsearch") return supsearch_suite(config);
  throw ConfigError("module", "unknown module '" + module + "'");
}

}  // namespace tmlab

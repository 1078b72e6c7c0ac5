#include "tmlab/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "tmlab/errors.hpp"
#include "tmlab/rearrange.hpp"
#include "tmlab/seqopt.hpp"
#include "tmlab/supsearch.hpp"

namespace tmlab {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

using nlohmann::json;

std::string csv_cell(const json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "";
  return v.dump();
}

// JSON has no inf/nan: store them as strings so nothing is silently dropped.
json num(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
  return s;
}

// Parameter columns carried by every row.
const std::vector<std::string> kParamColumns = {"gauge", "N", "q", "p", "beta", "lambda", "lambda_rel",
                                                "d", "k", "a", "b", "seed"};

std::vector<json> param_cells(const std::string& gauge, const TMParams& p, const GaugeConstants& c,
                              std::uint64_t seed) {
  return {gauge, p.N, num(p.q), num(p.p), num(p.beta), num(p.lambda), num(p.lambda / c.lambda),
          num(p.d), num(p.k), num(p.a), num(p.b), seed};
}

void append(std::vector<json>& row, std::initializer_list<json> more) { row.insert(row.end(), more); }

Table make_table(std::initializer_list<std::string> extra) {
  Table t;
  t.columns = kParamColumns;
  t.columns.insert(t.columns.end(), extra);
  return t;
}

RunResult run_verify(const ExperimentConfig& cfg, const Gauge& g, const GaugeConstants& c, const TMParams& p) {
  RunResult r;
  const auto checks = verify_suite(cfg.module, cfg);
  r.table = make_table({"module", "check", "value", "relation", "bound", "pass"});
  std::size_t failed = 0;
  json list = json::array();
  for (const auto& ch : checks) {
    auto row = param_cells(g.describe(), p, c, cfg.seed);
    append(row, {ch.module, ch.name, num(ch.value), ch.relation, num(ch.bound), ch.pass});
    r.table.rows.push_back(std::move(row));
    list.push_back({{"module", ch.module},
                    {"check", ch.name},
                    {"value", num(ch.value)},
                    {"relation", ch.relation},
                    {"bound", num(ch.bound)},
                    {"pass", ch.pass}});
    if (!ch.pass) ++failed;
  }
  r.report = {{"module", cfg.module}, {"kappa", num(c.kappa)}, {"checks", list}, {"failed", failed}};
  r.exit_code = failed == 0 ? kExitOk : kExitViolation;
  r.summary = "verify " + cfg.module + ": " + std::to_string(checks.size()) + " checks, " + std::to_string(failed) +
              " failed; kappa = " + format_double(c.kappa);
  return r;
}

RunResult run_sweep(const ExperimentConfig& cfg, const Gauge& g, const GaugeConstants& c, const TMParams& p) {
  RunResult r;
  SweepOptions opt;
  opt.fit_target = cfg.fit_target;
  opt.fit_mode = cfg.fit_mode;
  opt.fit_skip = cfg.fit_skip;
  opt.jobs = cfg.jobs;
  const auto rep = sharpness_sweep(cfg.theorem, p, c, g.describe(), cfg.n_list, opt);
  r.table = make_table({"theorem", "sequence", "n", "scale", "log_integral", "log_norm", "log_ratio",
                        "error_estimate", "saturated", "within_hypothesis", "fit_target", "fit_mode",
                        "fitted_exponent", "predicted_exponent", "r_squared", "divergent"});
  for (const auto& pt : rep.points) {
    auto row = param_cells(g.describe(), p, c, cfg.seed);
    append(row, {to_string(cfg.theorem), rep.sequence, num(pt.n), num(pt.scale), num(pt.log_integral),
                 num(pt.log_norm), num(pt.log_ratio), num(pt.error_estimate), pt.saturated, pt.within_hypothesis,
                 rep.fit_target, rep.fit_mode, num(rep.fitted_exponent), num(rep.predicted_exponent),
                 num(rep.r_squared), rep.divergent});
    r.table.rows.push_back(std::move(row));
  }
  r.report = rep.to_json();
  r.report["gauge"] = g.describe();
  r.summary = "sweep " + to_string(cfg.theorem) + ": fitted exponent " + format_double(rep.fitted_exponent) +
              " (predicted " + format_double(rep.predicted_exponent) + ", R^2 " + format_double(rep.r_squared) + ")";
  return r;
}

RunResult run_sup(const ExperimentConfig& cfg, const Gauge& g, const GaugeConstants& c, const TMParams& p) {
  RunResult r;
  SearchOptions so;
  so.budget = cfg.sup.budget;
  so.seed = cfg.seed;
  so.jobs = cfg.jobs;
  const auto family = cfg.make_family();
  r.table = make_table({"kind", "family", "lambda_rel_grid", "value", "log_value", "bracket", "product",
                        "evaluations", "saturated", "budget_exhausted", "argmax"});
  auto add_row = [&](const std::string& kind, double l, const SupEstimate& e, double bracket) {
    auto row = param_cells(g.describe(), p, c, cfg.seed);
    append(row, {kind, cfg.sup.family, num(l), num(e.value), num(e.log_value), num(bracket), num(bracket * e.value),
                 e.evaluations, e.saturated, e.budget_exhausted, join(e.argmax)});
    r.table.rows.push_back(std::move(row));
  };
  const auto& kind = cfg.sup.kind;
  const double nan = std::nan("");
  if (kind == "atmsc") {
    json list = json::array();
    for (double l : cfg.sup.lambda_grid) {
      const auto e = estimate_atmsc(p.N, p.q, l * c.lambda, p.beta, c, family, so);
      // Normalization by the blow-up rate of the lower bound near lambda_N.
      const double band = std::pow(1.0 - std::pow(l, p.N - 1.0), p.q * (1.0 - p.beta / p.N) / p.N);
      add_row("atmsc", l, e, band);
      list.push_back({{"lambda_rel", l}, {"estimate", e.to_json()}, {"normalized", num(band * e.value)}});
    }
    r.report = {{"kind", kind}, {"family", family.to_json()}, {"estimates", list}};
    r.summary = "sup atmsc: " + std::to_string(list.size()) + " grid points";
  } else if (kind == "atmc") {
    const auto e = estimate_atmc(p.N, p.q, p.beta, p.a, p.b, c, family, so);
    add_row("atmc", nan, e, 1.0);
    r.report = {{"kind", kind}, {"family", family.to_json()}, {"estimate", e.to_json()}};
    r.summary = "sup atmc: value " + format_double(e.value);
  } else if (kind == "identity") {
    const auto id = atmc_identity_check(p.N, p.q, p.beta, p.a, p.b, cfg.sup.lambda_grid, c, family, so);
    add_row("atmc", nan, id.atmc, 1.0);
    for (std::size_t i = 0; i < id.lambda_grid.size(); ++i) {
      const double l = id.lambda_grid[i];
      SupEstimate e;
      e.value = id.atmsc[i];
      e.log_value = std::log(id.atmsc[i]);
      add_row("atmsc", l, e, atmc_bracket(l, p.N, p.q, p.beta, p.a, p.b));
    }
    r.report = id.to_json();
    r.report["kind"] = kind;
    r.report["family"] = family.to_json();
    r.summary = "sup identity: lhs " + format_double(id.lhs) + ", rhs " + format_double(id.rhs) + ", reldiff " +
                format_double(id.reldiff);
  } else {
    const auto gr = atmc_moser_growth(p.N, p.q, p.beta, p.a, p.b, c, cfg.n_list, cfg.jobs);
    for (std::size_t i = 0; i < gr.n.size(); ++i) {
      SupEstimate e;
      e.log_value = gr.log_values[i];
      e.value = std::exp(e.log_value);
      e.argmax = {gr.n[i], gr.best_t[i]};
      add_row("atmc_growth", nan, e, 1.0);
    }
    r.report = gr.to_json();
    r.report["kind"] = kind;
    r.summary = "sup atmc_growth: slope " + format_double(gr.slope) + (gr.divergent ? " (divergent)" : " (bounded)");
  }
  r.report["params"] = p.to_json();
  r.report["gauge"] = g.describe();
  return r;
}

RunResult run_mu(const ExperimentConfig& cfg, const Gauge& g, const GaugeConstants& c, const TMParams& p) {
  RunResult r;
  MuOptions opt;
  opt.K = cfg.mu.K;
  opt.starts = cfg.mu.starts;
  opt.seed = cfg.seed;
  opt.jobs = cfg.jobs;
  r.table = make_table({"h", "K", "starts", "mu_upper", "asymptotic", "ratio", "kkt_residual", "multiplier_N",
                        "active_constraint", "best_start", "converged"});
  json list = json::array();
  std::size_t unconverged = 0;
  for (double h : cfg.mu.h) {
    const auto m = mu_estimate(h, p.q, p.N, opt);
    const double asym = h > 1.0 ? mu_asymptotic(h, p.q, p.N) : std::nan("");
    auto row = param_cells(g.describe(), p, c, cfg.seed);
    append(row, {num(h), m.K, opt.starts, num(m.mu_upper), num(asym), num(m.mu_upper / asym), num(m.kkt_residual),
                 num(m.multiplier_N), m.active_constraint, m.best_start, m.converged});
    r.table.rows.push_back(std::move(row));
    list.push_back({{"h", h},
                    {"K", m.K},
                    {"mu_upper", num(m.mu_upper)},
                    {"asymptotic", num(asym)},
                    {"ratio", num(m.mu_upper / asym)},
                    {"kkt_residual", num(m.kkt_residual)},
                    {"active_constraint", m.active_constraint},
                    {"converged", m.converged}});
    if (!m.converged) ++unconverged;
  }
  r.report = {{"q", p.q}, {"N", p.N}, {"points", list}, {"unconverged", unconverged}};
  r.summary = "mu: " + std::to_string(list.size()) + " points, " + std::to_string(unconverged) + " above the KKT tolerance";
  return r;
}

RunResult run_symcheck(const ExperimentConfig& cfg, const Gauge& g, const GaugeConstants& c, const TMParams& p) {
  RunResult r;
  const int n = c.dim;
  const std::size_t cells = cfg.symcheck.cells;
  r.table = make_table({"index", "cells", "equimeasurability_cells", "lq_reldiff", "ps_lhs", "ps_rhs", "ps_excess",
                        "hl_lhs", "hl_rhs", "lemma31_dirichlet_reldiff", "lemma31_integral_reldiff", "pass"});
  std::vector<SampledFunction> corpus;
  for (std::size_t i = 0; i < cfg.symcheck.count; ++i) {
    corpus.push_back(multibump(n, cells, child_seed(cfg.seed, 400 + i)));
  }
  TMParams sub = p;
  if (!(sub.lambda < c.lambda)) sub.lambda = 0.5 * c.lambda;
  struct Row {
    double equi = 0, lq = 0;
    InequalitySides ps, hl;
    SymmetrizationIdentity id;
  };
  std::vector<Row> rows(corpus.size());
  parallel_for(corpus.size(), cfg.jobs, [&](std::size_t i) {
    const auto& u = corpus[i];
    const auto star = convex_symmetrization(u, g);
    double top = 0.0;
    for (double v : u.values()) top = std::max(top, v);
    for (int j = 0; j < 50; ++j) {
      const double s = top * (j + 0.5) / 50.0;
      rows[i].equi = std::max(rows[i].equi,
                              std::abs(u.superlevel_measure(s) - superlevel_measure(star, s)) / u.cell_volume());
    }
    const double a = u.lq_norm(p.q), b = lq_norm(star, p.q);
    rows[i].lq = std::abs(a - b) / std::max(a, b);
    rows[i].ps = check_polya_szego(u, g, cfg.symcheck.stride);
    rows[i].hl = check_hardy_littlewood(u, corpus[(i + 1) % corpus.size()], g);
    rows[i].id = symmetrization_identity(convex_symmetrization(u, g, polya_szego_stride(u)), sub, TMVariant::Phi);
  });
  std::size_t failed = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& w = rows[i];
    const double excess = w.ps.rhs / w.ps.lhs - 1.0;
    const bool pass = w.equi <= 2.0 && w.lq <= 0.02 && excess <= 0.05 && w.hl.lhs <= w.hl.rhs * (1.0 + 1e-12) &&
                      w.id.dirichlet_reldiff <= 1e-4 && w.id.integral_reldiff <= 1e-4;
    if (!pass) ++failed;
    auto row = param_cells(g.describe(), sub, c, cfg.seed);
    append(row, {i, cells, num(w.equi), num(w.lq), num(w.ps.lhs), num(w.ps.rhs), num(excess), num(w.hl.lhs),
                 num(w.hl.rhs), num(w.id.dirichlet_reldiff), num(w.id.integral_reldiff), pass});
    r.table.rows.push_back(std::move(row));
  }
  r.report = r.table.to_json();
  r.report["failed"] = failed;
  r.exit_code = failed == 0 ? kExitOk : kExitViolation;
  r.summary = "symcheck: " + std::to_string(rows.size()) + " functions, " + std::to_string(failed) + " failed";
  return r;
}

}  // namespace

void Table::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
}

nlohmann::json Table::to_json() const {
  json rows_json = json::array();
  for (const auto& row : rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < columns.size() && i < row.size(); ++i) obj[columns[i]] = row[i];
    rows_json.push_back(std::move(obj));
  }
  return {{"columns", columns}, {"rows", rows_json}};
}

RunResult run(const ExperimentConfig& config) {
  const Gauge g = config.make_gauge();
  const auto c = constants(g);
  const auto p = config.resolved_params(c);
  if (config.command == "verify") return run_verify(config, g, c, p);
  if (config.command == "sweep") return run_sweep(config, g, c, p);
  if (config.command == "sup") return run_sup(config, g, c, p);
  if (config.command == "mu") return run_mu(config, g, c, p);
  if (config.command == "symcheck") return run_symcheck(config, g, c, p);
  throw ConfigError("command", "unknown command '" + config.command + "'");
}

int run_and_write(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const auto result = run(config);
    namespace fs = std::filesystem;
    fs::create_directories(config.output);
    const fs::path dir(config.output);
    {
      std::ofstream f(dir / "config.json", std::ios::binary);
      f << config.emit();
    }
    const auto path = dir / (config.command + "." + config.format);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    if (config.format == "csv") {
      result.table.write_csv(f);
    } else {
      json doc = result.report;
      doc["command"] = config.command;
      doc["table"] = result.table.to_json();
      f << doc.dump(2) << '\n';
    }
    out << result.summary << '\n';
    if (result.exit_code == kExitViolation) err << "invariant violation; see " << path.string() << '\n';
    return result.exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConvergenceError& e) {
    err << "non-convergence: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitViolation;
  }
}

}  // namespace tmlab

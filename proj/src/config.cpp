#include "tmlab/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tmlab/errors.hpp"

namespace tmlab {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> known) {
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* s) { return key == s; })) {
      throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

const json& object_at(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_object()) throw ConfigError(key, "expected an object");
  return v;
}

template <class T>
T get_as(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(field, "wrong type");
  }
}

std::size_t get_count(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(field, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

std::vector<double> get_positive_list(const json& j, const std::string& field) {
  auto v = get_as<std::vector<double>>(j, field);
  if (v.empty()) throw ConfigError(field, "must not be empty");
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(field, "entries must be positive and finite");
  }
  return v;
}

void check_choice(const std::string& value, const std::string& field, std::initializer_list<const char*> allowed) {
  if (std::none_of(allowed.begin(), allowed.end(), [&](const char* s) { return value == s; })) {
    std::string list;
    for (const char* s : allowed) list += std::string(list.empty() ? "" : ", ") + s;
    throw ConfigError(field, "'" + value + "' is not one of {" + list + "}");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("", "configuration must be a JSON object");
  reject_unknown(j, "", {"command", "module", "gauge", "params", "theorem", "n_list", "fit", "sup", "mu",
                         "symcheck", "seed", "jobs", "output", "format"});
  ExperimentConfig c;
  if (j.contains("command")) c.command = get_as<std::string>(j.at("command"), "command");
  check_choice(c.command, "command", {"verify", "sweep", "sup", "mu", "symcheck"});
  if (j.contains("module")) c.module = get_as<std::string>(j.at("module"), "module");
  check_choice(c.module, "module",
               {"all", "finsler", "rearrange", "profiles", "functionals", "seqopt", "supsearch"});

  if (j.contains("params")) {
    json p = object_at(j, "params");
    if (p.contains("lambda_rel")) {
      const auto& v = p.at("lambda_rel");
      if (!v.is_number() || !(v.get<double>() > 0.0)) throw ConfigError("params.lambda_rel", "expected a positive number");
      c.lambda_rel = v.get<double>();
      if (p.contains("lambda")) throw ConfigError("params.lambda_rel", "give either lambda or lambda_rel");
      p.erase("lambda_rel");
    }
    try {
      c.params = TMParams::from_json(p);
    } catch (const ConfigError& e) {
      const std::string prefix = e.field() + ": ";
      std::string msg = e.what();
      if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
      throw ConfigError("params." + e.field(), msg);
    }
  }
  if (j.contains("gauge")) c.gauge = object_at(j, "gauge");
  // Fail at parse time on a malformed gauge or a dimension mismatch.
  const Gauge g = c.make_gauge();
  if (g.dim() != c.params.N) {
    throw ConfigError("gauge.N", "gauge dimension " + std::to_string(g.dim()) + " differs from params.N = " +
                                     std::to_string(c.params.N));
  }

  if (j.contains("theorem")) {
    const auto name = get_as<std::string>(j.at("theorem"), "theorem");
    try {
      c.theorem = theorem_from_string(name);
    } catch (const std::exception&) {
      throw ConfigError("theorem", "unknown theorem '" + name + "'");
    }
  }
  if (j.contains("n_list")) {
    c.n_list = get_positive_list(j.at("n_list"), "n_list");
    if (!std::is_sorted(c.n_list.begin(), c.n_list.end()) ||
        std::adjacent_find(c.n_list.begin(), c.n_list.end()) != c.n_list.end()) {
      throw ConfigError("n_list", "must be strictly increasing");
    }
  }
  if (j.contains("fit")) {
    const auto& f = object_at(j, "fit");
    reject_unknown(f, "fit", {"target", "mode", "skip"});
    if (f.contains("target")) c.fit_target = get_as<std::string>(f.at("target"), "fit.target");
    if (f.contains("mode")) c.fit_mode = get_as<std::string>(f.at("mode"), "fit.mode");
    if (f.contains("skip")) c.fit_skip = get_count(f.at("skip"), "fit.skip");
    if (!c.fit_target.empty()) check_choice(c.fit_target, "fit.target", {"ratio", "integral"});
    if (!c.fit_mode.empty()) check_choice(c.fit_mode, "fit.mode", {"log-log", "log-linear"});
  }
  if (c.command == "sweep" && c.n_list.size() < c.fit_skip + 2) {
    throw ConfigError("n_list", "needs at least fit.skip + 2 entries");
  }
  if (j.contains("sup")) {
    const auto& s = object_at(j, "sup");
    reject_unknown(s, "sup", {"kind", "family", "knots", "budget", "lambda_grid"});
    if (s.contains("kind")) c.sup.kind = get_as<std::string>(s.at("kind"), "sup.kind");
    check_choice(c.sup.kind, "sup.kind", {"atmsc", "atmc", "identity", "atmc_growth"});
    if (s.contains("family")) c.sup.family = get_as<std::string>(s.at("family"), "sup.family");
    check_choice(c.sup.family, "sup.family", {"moser", "moser_perturbed", "truncated_power"});
    if (s.contains("knots")) {
      c.sup.knots = static_cast<int>(get_count(s.at("knots"), "sup.knots"));
      if (c.sup.knots < 1 || c.sup.knots > 11) throw ConfigError("sup.knots", "must be in [1, 11]");
    }
    if (s.contains("budget")) {
      c.sup.budget = get_count(s.at("budget"), "sup.budget");
      if (c.sup.budget == 0) throw ConfigError("sup.budget", "must be positive");
    }
    if (s.contains("lambda_grid")) {
      c.sup.lambda_grid = get_positive_list(s.at("lambda_grid"), "sup.lambda_grid");
      for (double l : c.sup.lambda_grid) {
        if (!(l < 1.0)) throw ConfigError("sup.lambda_grid", "entries must lie in (0, 1)");
      }
    }
  }
  if (j.contains("mu")) {
    const auto& m = object_at(j, "mu");
    reject_unknown(m, "mu", {"h", "K", "starts"});
    if (m.contains("h")) c.mu.h = get_positive_list(m.at("h"), "mu.h");
    if (m.contains("K")) c.mu.K = get_count(m.at("K"), "mu.K");
    if (m.contains("starts")) {
      c.mu.starts = static_cast<int>(get_count(m.at("starts"), "mu.starts"));
      if (c.mu.starts < 1) throw ConfigError("mu.starts", "must be >= 1");
    }
  }
  if (j.contains("symcheck")) {
    const auto& s = object_at(j, "symcheck");
    reject_unknown(s, "symcheck", {"cells", "count", "stride"});
    if (s.contains("cells")) c.symcheck.cells = get_count(s.at("cells"), "symcheck.cells");
    if (s.contains("count")) c.symcheck.count = get_count(s.at("count"), "symcheck.count");
    if (s.contains("stride")) c.symcheck.stride = get_count(s.at("stride"), "symcheck.stride");
    if (c.symcheck.cells < 8) throw ConfigError("symcheck.cells", "must be >= 8");
    if (c.symcheck.count == 0) throw ConfigError("symcheck.count", "must be positive");
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed", "expected a nonnegative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("jobs")) {
    c.jobs = static_cast<int>(get_count(j.at("jobs"), "jobs"));
    if (c.jobs < 1) throw ConfigError("jobs", "must be >= 1");
  }
  if (j.contains("output")) c.output = get_as<std::string>(j.at("output"), "output");
  if (j.contains("format")) c.format = get_as<std::string>(j.at("format"), "format");
  check_choice(c.format, "format", {"csv", "json"});
  return c;
}

json ExperimentConfig::to_json() const {
  json p = params.to_json();
  if (lambda_rel) {
    p.erase("lambda");
    p["lambda_rel"] = *lambda_rel;
  }
  return {{"command", command},
          {"module", module},
          {"gauge", gauge},
          {"params", p},
          {"theorem", to_string(theorem)},
          {"n_list", n_list},
          {"fit", {{"target", fit_target}, {"mode", fit_mode}, {"skip", fit_skip}}},
          {"sup",
           {{"kind", sup.kind},
            {"family", sup.family},
            {"knots", sup.knots},
            {"budget", sup.budget},
            {"lambda_grid", sup.lambda_grid}}},
          {"mu", {{"h", mu.h}, {"K", mu.K}, {"starts", mu.starts}}},
          {"symcheck", {{"cells", symcheck.cells}, {"count", symcheck.count}, {"stride", symcheck.stride}}},
          {"seed", seed},
          {"jobs", jobs},
          {"output", output},
          {"format", format}};
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Convert the byte offset into line and column.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("", "syntax error at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
  return from_json(j);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(e.field(), std::string(e.what()).substr(e.field().empty() ? 0 : e.field().size() + 2) +
                                     " (in " + path + ")");
  }
}

std::string ExperimentConfig::emit() const { return to_json().dump(2) + "\n"; }

Gauge ExperimentConfig::make_gauge() const {
  try {
    return Gauge::from_json(gauge);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("gauge", e.what());
  }
}

TMParams ExperimentConfig::resolved_params(const GaugeConstants& c) const {
  TMParams p = params;
  if (lambda_rel) p.lambda = *lambda_rel * c.lambda;
  return p;
}

ProfileFamily ExperimentConfig::make_family() const {
  if (sup.family == "moser_perturbed") return ProfileFamily::moser_perturbed(sup.knots);
  if (sup.family == "truncated_power") return ProfileFamily::truncated_power();
  return ProfileFamily::moser();
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) { return a.to_json() == b.to_json(); }

}  // namespace tmlab

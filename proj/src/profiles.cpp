#include "tmlab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "tmlab/errors.hpp"
#include "tmlab/functionals.hpp"
#include "tmlab/numerics.hpp"

namespace tmlab {

RadialProfile::RadialProfile(std::vector<double> log_r, std::vector<double> values, int dim,
                             double kappa, std::string gauge_label)
    : base_log_r_(std::move(log_r)),
      base_values_(std::move(values)),
      dim_(dim),
      kappa_(kappa),
      gauge_label_(std::move(gauge_label)) {
  if (dim < 2) throw DomainError("profile dimension must be >= 2");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("profile kappa must be positive");
  if (base_log_r_.empty() || base_log_r_.size() != base_values_.size()) {
    throw DomainError("profile needs matching, nonempty node and value arrays");
  }
  for (std::size_t i = 0; i < base_log_r_.size(); ++i) {
    if (!std::isfinite(base_log_r_[i])) throw DomainError("profile log-radii must be finite");
    if (!(base_values_[i] >= 0.0) || !std::isfinite(base_values_[i])) {
      throw DomainError("profile values must be finite and nonnegative");
    }
    if (i > 0) {
      if (!(base_log_r_[i] > base_log_r_[i - 1])) throw DomainError("profile radii must be strictly increasing");
      if (base_values_[i] > base_values_[i - 1]) throw DomainError("profile values must be nonincreasing");
    }
  }
}

RadialProfile RadialProfile::sample(const std::function<double(double)>& f, double r_min,
                                    double r_max, std::size_t count, int dim, double kappa,
                                    std::string gauge_label) {
  if (!(r_min > 0.0) || !(r_max > r_min) || count < 2) {
    throw DomainError("sample: need 0 < r_min < r_max and at least two nodes");
  }
  const double s0 = std::log(r_min);
  const double s1 = std::log(r_max);
  std::vector<double> s(count), v(count);
  double running = kInf;
  for (std::size_t i = 0; i < count; ++i) {
    s[i] = i + 1 == count ? s1 : s0 + (s1 - s0) * static_cast<double>(i) / static_cast<double>(count - 1);
    const double fi = f(std::exp(s[i]));
    if (!(fi >= 0.0) || !std::isfinite(fi)) throw DomainError("sample: function values must be finite and >= 0");
    running = std::min(running, fi);
    v[i] = running;
  }
  return RadialProfile(std::move(s), std::move(v), dim, kappa, std::move(gauge_label));
}

double RadialProfile::log_radius(std::size_t i) const {
  return base_log_r_[i] - std::log(dilation_);
}

double RadialProfile::radius(std::size_t i) const { return std::exp(log_radius(i)); }

double RadialProfile::support_radius() const { return std::exp(log_support_radius()); }

bool RadialProfile::is_zero() const {
  return value_scale_ == 0.0 || base_values_.front() == 0.0;
}

std::size_t RadialProfile::cell_of(double s_base) const {
  // Index i with base_log_r_[i] <= s_base < base_log_r_[i + 1].
  const auto it = std::upper_bound(base_log_r_.begin(), base_log_r_.end(), s_base);
  return static_cast<std::size_t>(it - base_log_r_.begin()) - 1;
}

double RadialProfile::at_log_radius(double s) const {
  const double sb = s + std::log(dilation_);
  if (sb <= base_log_r_.front()) return value(0);
  if (sb > base_log_r_.back()) return 0.0;
  if (sb == base_log_r_.back()) return value(size() - 1);
  const std::size_t i = cell_of(sb);
  const double w = (sb - base_log_r_[i]) / (base_log_r_[i + 1] - base_log_r_[i]);
  return ((1.0 - w) * base_values_[i] + w * base_values_[i + 1]) * value_scale_;
}

double RadialProfile::log_slope(double s) const {
  const double sb = s + std::log(dilation_);
  if (sb < base_log_r_.front() || sb >= base_log_r_.back()) return 0.0;
  const std::size_t i = cell_of(sb);
  return (base_values_[i + 1] - base_values_[i]) * value_scale_ / (base_log_r_[i + 1] - base_log_r_[i]);
}

double RadialProfile::operator()(double r) const {
  if (r < 0.0) throw DomainError("profile evaluated at negative radius");
  if (r == 0.0) return value(0);
  return at_log_radius(std::log(r));
}

RadialProfile RadialProfile::dilated(double lambda) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("dilation factor must be positive");
  RadialProfile out(*this);
  out.dilation_ *= lambda;
  return out;
}

RadialProfile RadialProfile::scaled(double c) const {
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("value scale must be finite and >= 0");
  RadialProfile out(*this);
  out.value_scale_ *= c;
  return out;
}

RadialProfile RadialProfile::retagged(double kappa, std::string gauge_label) const {
  if (!(kappa > 0.0)) throw DomainError("profile kappa must be positive");
  RadialProfile out(*this);
  out.kappa_ = kappa;
  out.gauge_label_ = std::move(gauge_label);
  return out;
}

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void RadialProfile::write_csv(std::ostream& out) const {
  out << "# gauge=" << gauge_label_ << "; kappa=" << fmt17(kappa_) << "; N=" << dim_ << "\n";
  out << "r,u\n";
  out << "0," << fmt17(value(0)) << "\n";
  for (std::size_t i = 0; i < size(); ++i) {
    const double r = radius(i);
    if (!std::isnormal(r)) {
      throw DomainError("profile radius e^" + fmt17(log_radius(i)) + " is not representable in CSV");
    }
    out << fmt17(r) << "," << fmt17(value(i)) << "\n";
  }
}

RadialProfile RadialProfile::read_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("# gauge=", 0) != 0) {
    throw ConfigError("profile.header", "expected '# gauge=...; kappa=...; N=...'");
  }
  const auto kpos = header.rfind("; kappa=");
  const auto npos = header.rfind("; N=");
  if (kpos == std::string::npos || npos == std::string::npos || npos < kpos) {
    throw ConfigError("profile.header", "missing kappa or N");
  }
  const std::string label = header.substr(8, kpos - 8);
  double kappa = 0.0;
  int dim = 0;
  try {
    kappa = std::stod(header.substr(kpos + 8, npos - kpos - 8));
    dim = std::stoi(header.substr(npos + 4));
  } catch (const std::exception&) {
    throw ConfigError("profile.header", "malformed kappa or N");
  }
  std::string line;
  if (!std::getline(in, line) || line != "r,u") throw ConfigError("profile.columns", "expected 'r,u'");
  std::vector<double> s, v;
  bool plateau_seen = false;
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("profile.line" + std::to_string(lineno), "expected r,u");
    double r = 0.0, u = 0.0;
    try {
      r = std::stod(line.substr(0, comma));
      u = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw ConfigError("profile.line" + std::to_string(lineno), "malformed number");
    }
    if (r == 0.0) {
      if (plateau_seen || !s.empty()) throw ConfigError("profile.line" + std::to_string(lineno), "r = 0 must come first");
      plateau_seen = true;
      continue;
    }
    s.push_back(std::log(r));
    v.push_back(u);
  }
  try {
    return RadialProfile(std::move(s), std::move(v), dim, kappa, label);
  } catch (const DomainError& e) {
    throw ConfigError("profile", e.what());
  }
}

double moser_plateau(double n, int dim, double beta, double kappa) {
  const double nd = dim;
  return std::pow(1.0 / (nd * kappa), 1.0 / nd) * std::pow(n / (nd - beta), (nd - 1.0) / nd);
}

RadialProfile moser_profile(double n, double beta, const GaugeConstants& c,
                            const std::string& gauge_label, std::size_t nodes) {
  const int dim = c.dim;
  const double nd = dim;
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("moser_profile: n must be positive");
  if (!(beta >= 0.0 && beta < nd)) throw DomainError("moser_profile: beta must lie in [0, N)");
  if (nodes < 2) throw DomainError("moser_profile: need at least two nodes");
  const double edge = n / (nd - beta);  // plateau edge at r = e^{-edge}
  const double slope = std::pow((nd - beta) / (n * nd * c.kappa), 1.0 / nd);
  std::vector<double> s(nodes), v(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double t = edge * (1.0 - static_cast<double>(i) / static_cast<double>(nodes - 1));
    s[i] = -t;
    v[i] = slope * t;
  }
  s.back() = 0.0;
  v.back() = 0.0;
  v.front() = moser_plateau(n, dim, beta, c.kappa);
  return RadialProfile(std::move(s), std::move(v), dim, c.kappa, gauge_label);
}

RadialProfile moser_profile(double n, int dim, double beta, const Gauge& g) {
  if (g.dim() != dim) throw DomainError("moser_profile: gauge dimension mismatch");
  return moser_profile(n, beta, constants(g), g.describe());
}

RadialProfile dilate(const RadialProfile& u, double lambda) { return u.dilated(lambda); }

RadialProfile scale_values(const RadialProfile& u, double c) { return u.scaled(c); }

double solve_scale(double lq_norm, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("solve_scale: exponents must be positive");
  if (!(lq_norm >= 0.0) || !std::isfinite(lq_norm)) throw DomainError("solve_scale: norm must be finite and >= 0");
  if (lq_norm == 0.0) return 1.0;
  auto f = [&](double c) { return std::pow(c, a) + std::pow(c * lq_norm, b) - 1.0; };
  return bisect_increasing(f, 0.0, 1.0, 0.0, 2000);
}

double solve_cn(double lq_norm, double a, int dim) { return solve_scale(lq_norm, a, dim); }

double solve_cn(const RadialProfile& u, double a, int dim, double q) {
  return solve_cn(lq_norm(u, q), a, dim);
}

}  // namespace tmlab

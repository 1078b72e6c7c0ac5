#include "tmlab/rearrange.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"
#include "tmlab/errors.hpp"
#include "tmlab/functionals.hpp"
#include "tmlab/numerics.hpp"

namespace tmlab {

std::size_t SampledFunction::checked_count(int dim, std::size_t cells) {
  if (dim < 2) throw DomainError("sampled function dimension must be >= 2");
  if (cells == 0) throw DomainError("empty grid");
  std::size_t count = 1;
  for (int k = 0; k < dim; ++k) {
    if (count > (std::size_t{1} << 40) / cells) throw DomainError("grid too large");
    count *= cells;
  }
  return count;
}

void SampledFunction::center_into(int dim, std::size_t cells, double h, std::size_t index, Vec& x) {
  const double half = 0.5 * static_cast<double>(cells);
  for (int k = dim - 1; k >= 0; --k) {
    const std::size_t ik = index % cells;
    index /= cells;
    x[k] = (static_cast<double>(ik) + 0.5 - half) * h;
  }
}

SampledFunction::SampledFunction(int dim, std::size_t cells, double h, std::vector<double> values)
    : dim_(dim), cells_(cells), h_(h), values_(std::move(values)) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("cell size must be positive");
  if (values_.size() != checked_count(dim, cells)) throw DomainError("value count does not match the grid");
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DomainError("sampled values must be finite and nonnegative");
    }
  }
  // Boundary layer must vanish (compact support inside the box).
  std::vector<std::size_t> idx(dim);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] == 0.0) continue;
    std::size_t rest = i;
    for (int k = dim - 1; k >= 0; --k) {
      const std::size_t ik = rest % cells;
      rest /= cells;
      if (ik == 0 || ik + 1 == cells) throw DomainError("sampled function must vanish on the boundary layer");
    }
  }
}

double SampledFunction::cell_volume() const { return std::pow(h_, dim_); }

Vec SampledFunction::center(std::size_t i) const {
  Vec x(dim_);
  center_into(dim_, cells_, h_, i, x);
  return x;
}

double SampledFunction::lq_norm(double q) const {
  if (!(q > 0.0)) throw DomainError("lq_norm: q must be positive");
  double s = 0.0;
  for (double v : values_) {
    if (v > 0.0) s += std::pow(v, q);
  }
  return std::pow(s * cell_volume(), 1.0 / q);
}

double SampledFunction::superlevel_measure(double s) const {
  const auto count = std::count_if(values_.begin(), values_.end(), [s](double v) { return v >= s; });
  return static_cast<double>(count) * cell_volume();
}

double SampledFunction::support_measure() const {
  const auto count = std::count_if(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
  return static_cast<double>(count) * cell_volume();
}

namespace {

nlohmann::json header_json(const SampledFunction& u) {
  return {{"N", u.dim()},
          {"cells", std::vector<std::size_t>(static_cast<std::size_t>(u.dim()), u.cells())},
          {"h", u.h()},
          {"dtype", "float64"},
          {"endianness", "little"}};
}

std::uint64_t to_little(std::uint64_t x) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(x);
  return x;
}

}  // namespace

void SampledFunction::write_binary(const std::string& path) const {
  std::ofstream hdr(path + ".hdr");
  if (!hdr) throw ConfigError("path", "cannot write " + path + ".hdr");
  hdr << header_json(*this).dump(2) << "\n";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("path", "cannot write " + path);
  for (double v : values_) {
    const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(v));
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
}

SampledFunction SampledFunction::read_binary(const std::string& path) {
  std::ifstream hdr(path + ".hdr");
  if (!hdr) throw ConfigError("path", "cannot read " + path + ".hdr");
  nlohmann::json j;
  try {
    hdr >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("header", e.what());
  }
  if (j.value("dtype", "") != "float64") throw ConfigError("header.dtype", "only float64 is supported");
  if (j.value("endianness", "") != "little") throw ConfigError("header.endianness", "only little endian is supported");
  const int dim = j.at("N").get<int>();
  const auto cells = j.at("cells").get<std::vector<std::size_t>>();
  if (static_cast<int>(cells.size()) != dim || cells.empty() ||
      std::adjacent_find(cells.begin(), cells.end(), std::not_equal_to<>()) != cells.end()) {
    throw ConfigError("header.cells", "expected N equal cell counts");
  }
  const double h = j.at("h").get<double>();
  std::vector<double> values(checked_count(dim, cells[0]));
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("path", "cannot read " + path);
  for (double& v : values) {
    std::uint64_t bits = 0;
    if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) throw ConfigError("path", "truncated data in " + path);
    v = std::bit_cast<double>(to_little(bits));
  }
  return SampledFunction(dim, cells[0], h, std::move(values));
}

void SampledFunction::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("path", "cannot write " + path);
  out << "# N=" << dim_ << "; cells=" << cells_ << "; h=";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", h_);
  out << buf << "\n";
  for (int k = 0; k < dim_; ++k) out << "i" << k << ",";
  out << "value\n";
  for (std::size_t i = 0; i < values_.size(); ++i) {
    std::size_t rest = i;
    std::vector<std::size_t> idx(dim_);
    for (int k = dim_ - 1; k >= 0; --k) {
      idx[k] = rest % cells_;
      rest /= cells_;
    }
    for (int k = 0; k < dim_; ++k) out << idx[k] << ",";
    std::snprintf(buf, sizeof buf, "%.17g", values_[i]);
    out << buf << "\n";
  }
}

SampledFunction SampledFunction::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("path", "cannot read " + path);
  std::string line;
  std::getline(in, line);
  int dim = 0;
  std::size_t cells = 0;
  double h = 0.0;
  if (std::sscanf(line.c_str(), "# N=%d; cells=%zu; h=%lf", &dim, &cells, &h) != 3) {
    throw ConfigError("csv.header", "expected '# N=..; cells=..; h=..'");
  }
  std::getline(in, line);  // column names
  std::vector<double> values(checked_count(dim, cells), 0.0);
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::size_t index = 0;
    for (int k = 0; k < dim; ++k) {
      if (!std::getline(ss, field, ',')) throw ConfigError("csv.line" + std::to_string(lineno), "missing index");
      const auto ik = static_cast<std::size_t>(std::stoull(field));
      if (ik >= cells) throw ConfigError("csv.line" + std::to_string(lineno), "index out of range");
      index = index * cells + ik;
    }
    if (!std::getline(ss, field, ',')) throw ConfigError("csv.line" + std::to_string(lineno), "missing value");
    values[index] = std::stod(field);
  }
  return SampledFunction(dim, cells, h, std::move(values));
}

double DecreasingRearrangement::operator()(double t) const {
  if (t < 0.0) throw DomainError("rearrangement evaluated at negative measure");
  const double idx = std::floor(t / cell_measure);
  if (idx >= static_cast<double>(values.size())) return 0.0;
  return values[static_cast<std::size_t>(idx)];
}

std::vector<double> DecreasingRearrangement::breakpoints() const {
  std::vector<double> t(values.size() + 1);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i) * cell_measure;
  return t;
}

double DecreasingRearrangement::superlevel_measure(double s) const {
  // values are sorted decreasingly: count the prefix with v >= s.
  const auto it = std::partition_point(values.begin(), values.end(), [s](double v) { return v >= s; });
  return static_cast<double>(it - values.begin()) * cell_measure;
}

DecreasingRearrangement decreasing_rearrangement(const SampledFunction& u) {
  DecreasingRearrangement r;
  r.cell_measure = u.cell_volume();
  r.values.reserve(u.size());
  for (double v : u.values()) {
    if (v > 0.0) r.values.push_back(v);
  }
  std::sort(r.values.begin(), r.values.end(), std::greater<>());
  return r;
}

RadialProfile symmetrize(const DecreasingRearrangement& rd, int dim, double kappa,
                         const std::string& gauge_label, std::size_t stride) {
  if (stride == 0) throw DomainError("symmetrize: stride must be positive");
  const double n = dim;
  const double c = rd.cell_measure;
  const std::size_t count = rd.values.size();
  std::vector<double> s, v;
  if (count == 0) {
    // Zero function: a single zero node.
    return RadialProfile({0.0}, {0.0}, dim, kappa, gauge_label);
  }
  const std::size_t blocks = std::max<std::size_t>(1, count / stride);
  const double block = static_cast<double>(count) / static_cast<double>(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    const double mid = (static_cast<double>(b) + 0.5) * block;
    const std::size_t i = std::min(count - 1, static_cast<std::size_t>(mid));
    const double measure = (stride == 1 ? static_cast<double>(i) + 0.5 : mid) * c;
    s.push_back(std::log(measure / kappa) / n);
    // Block mean: single order statistics carry the lattice-count noise.
    const auto lo = static_cast<std::size_t>(std::llround(b * block));
    const auto hi = std::min(count, static_cast<std::size_t>(std::llround((b + 1) * block)));
    double mean = rd.values[i];
    if (stride > 1 && hi > lo) {
      mean = 0.0;
      for (std::size_t j = lo; j < hi; ++j) mean += rd.values[j];
      mean /= static_cast<double>(hi - lo);
    }
    v.push_back(mean);
  }
  s.push_back(std::log(static_cast<double>(count) * c / kappa) / n);
  v.push_back(0.0);
  return RadialProfile(std::move(s), std::move(v), dim, kappa, gauge_label);
}

RadialProfile convex_symmetrization(const SampledFunction& u, const Gauge& g, std::size_t stride) {
  if (g.dim() != u.dim()) throw DomainError("convex_symmetrization: gauge dimension mismatch");
  return symmetrize(decreasing_rearrangement(u), u.dim(), wulff_volume(g), g.describe(), stride);
}

RadialProfile schwarz_symmetrization(const SampledFunction& u, std::size_t stride) {
  return symmetrize(decreasing_rearrangement(u), u.dim(), unit_ball_volume(u.dim()),
                    Gauge::euclidean(u.dim()).describe(), stride);
}

double superlevel_measure(const RadialProfile& u, double s) {
  if (!(s > 0.0)) throw DomainError("superlevel_measure: level must be positive");
  if (u.value(0) < s) return 0.0;
  std::size_t i = 0;
  while (i + 1 < u.size() && u.value(i + 1) >= s) ++i;
  double log_r = u.log_radius(i);
  if (i + 1 < u.size()) {
    const double va = u.value(i);
    const double vb = u.value(i + 1);
    const double frac = va > vb ? (va - s) / (va - vb) : 0.0;
    log_r += frac * (u.log_radius(i + 1) - u.log_radius(i));
  }
  return u.kappa() * std::exp(u.dim() * log_r);
}

SampledFunction lift_profile(const RadialProfile& u, const Gauge& g, std::size_t cells, double h) {
  if (g.dim() != u.dim()) throw DomainError("lift_profile: gauge dimension mismatch");
  return SampledFunction::from_function(u.dim(), cells, h, [&](std::span<const double> x) {
    return u(g.polar(x));
  });
}

std::size_t polya_szego_stride(const SampledFunction& u) {
  const auto count = static_cast<double>(decreasing_rearrangement(u).values.size());
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(std::pow(count, 0.6))));
}

InequalitySides check_polya_szego(const SampledFunction& u, const Gauge& g, std::size_t stride) {
  if (g.dim() != u.dim()) throw DomainError("check_polya_szego: gauge dimension mismatch");
  const int dim = u.dim();
  const std::size_t n = u.cells();
  const double h = u.h();
  std::vector<std::size_t> step(dim);
  step[dim - 1] = 1;
  for (int k = dim - 2; k >= 0; --k) step[k] = step[k + 1] * n;

  InequalitySides out;
  Vec grad(dim);
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::size_t rest = i;
    bool any = u[i] != 0.0;
    for (int k = dim - 1; k >= 0; --k) {
      const std::size_t ik = rest % n;
      rest /= n;
      const double next = ik + 1 < n ? u[i + step[k]] : 0.0;
      grad[k] = (next - u[i]) / h;
      any = any || next != 0.0;
    }
    if (!any) continue;
    sum += std::pow(g.eval(grad), dim);
  }
  out.lhs = sum * u.cell_volume();
  if (stride == 0) stride = polya_szego_stride(u);
  const auto profile = convex_symmetrization(u, g, stride);
  out.rhs = std::pow(dirichlet_norm(profile), dim);
  return out;
}

InequalitySides check_hardy_littlewood(const SampledFunction& f, const SampledFunction& g,
                                       const Gauge& gauge) {
  if (f.dim() != g.dim() || f.cells() != g.cells() || f.h() != g.h()) {
    throw DomainError("grid mismatch");
  }
  if (gauge.dim() != f.dim()) throw DomainError("check_hardy_littlewood: gauge dimension mismatch");
  InequalitySides out;
  double lhs = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) lhs += f[i] * g[i];
  out.lhs = lhs * f.cell_volume();
  // f* and g* are radial in the same gauge, so their product integrates
  // level by level in measure regardless of the gauge.
  const auto rf = decreasing_rearrangement(f);
  const auto rg = decreasing_rearrangement(g);
  const std::size_t m = std::min(rf.values.size(), rg.values.size());
  double rhs = 0.0;
  for (std::size_t i = 0; i < m; ++i) rhs += rf.values[i] * rg.values[i];
  out.rhs = rhs * rf.cell_measure;
  return out;
}

SampledFunction multibump(int dim, std::size_t cells, std::uint64_t seed) {
  std::uint64_t state = seed;
  auto uniform = [&state](double lo, double hi) {
    state = splitmix64(state);
    return lo + (hi - lo) * static_cast<double>(state >> 11) * 0x1.0p-53;
  };
  const int bumps = 1 + static_cast<int>(uniform(0.0, 4.0));
  struct Bump {
    Vec center;
    double radius;
    double height;
  };
  std::vector<Bump> list;
  for (int b = 0; b < bumps; ++b) {
    Bump bump;
    bump.center.resize(dim);
    for (double& c : bump.center) c = uniform(-0.5, 0.5);
    bump.radius = uniform(0.15, 0.4);
    bump.height = uniform(0.5, 1.5);
    list.push_back(std::move(bump));
  }
  const double h = 2.0 / static_cast<double>(cells);
  return SampledFunction::from_function(dim, cells, h, [&](std::span<const double> x) {
    double v = 0.0;
    for (const auto& b : list) {
      double r2 = 0.0;
      for (int k = 0; k < dim; ++k) r2 += (x[k] - b.center[k]) * (x[k] - b.center[k]);
      const double t = 1.0 - r2 / (b.radius * b.radius);
      if (t > 0.0) v += b.height * t * t;
    }
    return v;
  });
}

}  // namespace tmlab

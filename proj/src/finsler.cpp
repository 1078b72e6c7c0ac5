#include "tmlab/finsler.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numbers>
#include <functional>
#include <limits>
#include <sstream>

#include "tmlab/errors.hpp"
#include "tmlab/numerics.hpp"

namespace tmlab {

using boost::math::quadrature::tanh_sinh;

double norm2(std::span<const double> x) {
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double v : x) s += (v / scale) * (v / scale);
  return scale * std::sqrt(s);
}

namespace detail {

class GaugeImpl {
 public:
  explicit GaugeImpl(int dim) : dim_(dim) {
    if (dim < 2) throw DomainError("gauge dimension must be >= 2");
  }
  virtual ~GaugeImpl() = default;

  int dim() const { return dim_; }
  virtual GaugeForm form() const = 0;
  virtual std::string describe() const = 0;
  virtual nlohmann::json to_json() const = 0;
  virtual double eval(std::span<const double> xi) const = 0;
  virtual double polar(std::span<const double> x) const = 0;
  virtual Vec grad(std::span<const double> xi) const = 0;
  virtual Vec grad_polar(std::span<const double> x) const = 0;
  virtual LipschitzBounds lipschitz_bounds() const = 0;
  virtual std::optional<double> wulff_volume_closed_form() const { return std::nullopt; }

 protected:
  int dim_;
};

namespace {

void check_dim(const GaugeImpl& g, std::span<const double> v) {
  if (static_cast<int>(v.size()) != g.dim()) {
    throw DomainError("vector of dimension " + std::to_string(v.size()) +
                      " passed to a gauge of dimension " + std::to_string(g.dim()));
  }
}

bool is_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

double lp_norm(std::span<const double> v, double p) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  if (m == 0.0) return 0.0;
  if (std::isinf(p)) return m;
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x) / m, p);
  return m * std::pow(s, 1.0 / p);
}

Vec lp_grad(std::span<const double> v, double p) {
  Vec g(v.size(), 0.0);
  if (std::isinf(p)) {
    std::size_t imax = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    }
    g[imax] = v[imax] > 0 ? 1.0 : -1.0;
    return g;
  }
  if (p == 1.0) {
    for (std::size_t i = 0; i < v.size(); ++i) g[i] = (v[i] > 0) - (v[i] < 0);
    return g;
  }
  const double f = lp_norm(v, p);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = std::abs(v[i]) / f;
    g[i] = std::copysign(std::pow(r, p - 1.0), v[i]);
    if (v[i] == 0.0) g[i] = 0.0;
  }
  return g;
}

double dual_exponent(double p) {
  if (std::isinf(p)) return 1.0;
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return p / (p - 1.0);
}

std::string format_exponent(double p) {
  if (std::isinf(p)) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << p;
  return os.str();
}

class PNormGauge final : public GaugeImpl {
 public:
  PNormGauge(int dim, double p) : GaugeImpl(dim), p_(p), dual_(dual_exponent(p)) {
    if (!(p >= 1.0)) throw DomainError("p-norm exponent must be >= 1");
  }
  GaugeForm form() const override { return GaugeForm::PNorm; }
  std::string describe() const override {
    return "pnorm p=" + format_exponent(p_) + " N=" + std::to_string(dim_);
  }
  nlohmann::json to_json() const override {
    nlohmann::json j{{"form", "pnorm"}, {"N", dim_}};
    if (std::isinf(p_)) {
      j["p"] = "inf";
    } else {
      j["p"] = p_;
    }
    return j;
  }
  double eval(std::span<const double> xi) const override {
    check_dim(*this, xi);
    return lp_norm(xi, p_);
  }
  double polar(std::span<const double> x) const override {
    check_dim(*this, x);
    return lp_norm(x, dual_);
  }
  Vec grad(std::span<const double> xi) const override {
    check_dim(*this, xi);
    if (is_zero(xi)) throw DomainError("gauge gradient undefined at the origin");
    return lp_grad(xi, p_);
  }
  Vec grad_polar(std::span<const double> x) const override {
    check_dim(*this, x);
    if (is_zero(x)) throw DomainError("polar gradient undefined at the origin");
    return lp_grad(x, dual_);
  }
  LipschitzBounds lipschitz_bounds() const override {
    const double inv_p = std::isinf(p_) ? 0.0 : 1.0 / p_;
    const double diag = std::pow(static_cast<double>(dim_), inv_p - 0.5);
    return {std::min(1.0, diag), std::max(1.0, diag)};
  }
  std::optional<double> wulff_volume_closed_form() const override {
    // Unit ball of the dual exponent q: (2 Gamma(1 + 1/q))^N / Gamma(1 + N/q).
    const double inv_q = std::isinf(dual_) ? 0.0 : 1.0 / dual_;
    const double n = dim_;
    return std::exp(n * std::log(2.0 * std::tgamma(1.0 + inv_q)) - std::lgamma(1.0 + n * inv_q));
  }

 private:
  double p_;
  double dual_;
};

class EllipsoidGauge final : public GaugeImpl {
 public:
  explicit EllipsoidGauge(const Eigen::MatrixXd& a)
      : GaugeImpl(static_cast<int>(a.rows())), a_(a) {
    if (a.rows() != a.cols()) throw DomainError("ellipsoid matrix must be square");
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * a.cwiseAbs().maxCoeff()) {
      throw DomainError("ellipsoid matrix must be symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) throw DomainError("ellipsoid matrix must be positive definite");
    a_inv_ = llt.solve(Eigen::MatrixXd::Identity(dim_, dim_));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    eig_min_ = eig.eigenvalues().minCoeff();
    eig_max_ = eig.eigenvalues().maxCoeff();
    det_ = eig.eigenvalues().prod();
  }
  GaugeForm form() const override { return GaugeForm::Ellipsoid; }
  std::string describe() const override {
    std::ostringstream os;
    os.precision(17);
    os << "ellipsoid N=" << dim_ << " A=[";
    for (int i = 0; i < dim_; ++i) {
      os << (i ? ";" : "");
      for (int j = 0; j < dim_; ++j) os << (j ? " " : "") << a_(i, j);
    }
    os << "]";
    return os.str();
  }
  nlohmann::json to_json() const override {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < dim_; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int j = 0; j < dim_; ++j) row.push_back(a_(i, j));
      rows.push_back(row);
    }
    return {{"form", "ellipsoid"}, {"A", rows}};
  }
  double eval(std::span<const double> xi) const override {
    check_dim(*this, xi);
    return quad(a_, xi);
  }
  double polar(std::span<const double> x) const override {
    check_dim(*this, x);
    return quad(a_inv_, x);
  }
  Vec grad(std::span<const double> xi) const override {
    check_dim(*this, xi);
    if (is_zero(xi)) throw DomainError("gauge gradient undefined at the origin");
    return lin(a_, xi, quad(a_, xi));
  }
  Vec grad_polar(std::span<const double> x) const override {
    check_dim(*this, x);
    if (is_zero(x)) throw DomainError("polar gradient undefined at the origin");
    return lin(a_inv_, x, quad(a_inv_, x));
  }
  LipschitzBounds lipschitz_bounds() const override {
    return {std::sqrt(eig_min_), std::sqrt(eig_max_)};
  }
  std::optional<double> wulff_volume_closed_form() const override {
    // {x^T A^{-1} x <= 1} has semi-axes sqrt(eig(A)).
    return unit_ball_volume(dim_) * std::sqrt(det_);
  }

 private:
  static double quad(const Eigen::MatrixXd& m, std::span<const double> v) {
    Eigen::Map<const Eigen::VectorXd> x(v.data(), static_cast<Eigen::Index>(v.size()));
    return std::sqrt(std::max(0.0, x.dot(m * x)));
  }
  static Vec lin(const Eigen::MatrixXd& m, std::span<const double> v, double f) {
    Eigen::Map<const Eigen::VectorXd> x(v.data(), static_cast<Eigen::Index>(v.size()));
    Eigen::VectorXd g = m * x / f;
    return Vec(g.data(), g.data() + g.size());
  }

  Eigen::MatrixXd a_;
  Eigen::MatrixXd a_inv_;
  double eig_min_ = 0.0;
  double eig_max_ = 0.0;
  double det_ = 0.0;
};

// Unit directions used for boundary sampling: uniform angles in the plane,
// a Fibonacci lattice on spheres of higher dimension (spherical coordinates
// are used only for N = 3; other N use a deterministic Gaussian-free spiral
// over the first three coordinates plus axis directions).
std::vector<Vec> sample_directions(int dim, std::size_t count) {
  std::vector<Vec> dirs;
  dirs.reserve(count);
  if (dim == 2) {
    for (std::size_t i = 0; i < count; ++i) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
      dirs.push_back({std::cos(t), std::sin(t)});
    }
    return dirs;
  }
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
    const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    Vec d(dim, 0.0);
    d[0] = rad * std::cos(phi);
    d[1] = rad * std::sin(phi);
    d[2] = z;
    dirs.push_back(std::move(d));
  }
  for (int axis = 3; axis < dim; ++axis) {
    for (double s : {1.0, -1.0}) {
      Vec d(dim, 0.0);
      d[axis] = s;
      dirs.push_back(std::move(d));
    }
  }
  return dirs;
}

class GenericGauge : public GaugeImpl {
 public:
  GenericGauge(int dim, Gauge::Evaluator f, std::string label, std::size_t samples)
      : GaugeImpl(dim), f_(std::move(f)), label_(std::move(label)) {
    if (!f_) throw DomainError("generic gauge needs an evaluator");
    if (samples == 0) samples = dim == 2 ? 1440 : 4000;
    dirs_ = sample_directions(dim, samples);
    boundary_.reserve(dirs_.size());
    double lo = kInf, hi = 0.0;
    for (const auto& d : dirs_) {
      const double fd = f_(d);
      if (!(fd > 0.0) || !std::isfinite(fd)) {
        throw DomainError("generic gauge must be positive and finite away from the origin");
      }
      lo = std::min(lo, fd);
      hi = std::max(hi, fd);
      Vec xi(d);
      for (double& v : xi) v /= fd;
      boundary_.push_back(std::move(xi));
    }
    // Sampled extremes widened for the gap between samples.
    bounds_ = {lo * (1.0 - 1e-3), hi * (1.0 + 1e-3)};
  }

  GaugeForm form() const override { return GaugeForm::Generic; }
  std::string describe() const override { return "generic " + label_ + " N=" + std::to_string(dim_); }
  nlohmann::json to_json() const override {
    return {{"form", "generic"}, {"label", label_}, {"N", dim_}};
  }
  double eval(std::span<const double> xi) const override {
    check_dim(*this, xi);
    if (is_zero(xi)) return 0.0;
    return f_(xi);
  }
  double polar(std::span<const double> x) const override {
    check_dim(*this, x);
    if (is_zero(x)) return 0.0;
    return maximize(x).value;
  }
  Vec grad(std::span<const double> xi) const override {
    check_dim(*this, xi);
    if (is_zero(xi)) throw DomainError("gauge gradient undefined at the origin");
    const double h = 1e-6 * std::max(1.0, norm2(xi));
    Vec g(dim_);
    Vec p(xi.begin(), xi.end());
    for (int i = 0; i < dim_; ++i) {
      const double orig = p[i];
      p[i] = orig + h;
      const double fp = f_(p);
      p[i] = orig - h;
      const double fm = f_(p);
      p[i] = orig;
      g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
  }
  Vec grad_polar(std::span<const double> x) const override {
    check_dim(*this, x);
    if (is_zero(x)) throw DomainError("polar gradient undefined at the origin");
    // Envelope theorem: the gradient of a support function is its maximizer.
    const auto best = maximize(x);
    Vec xi(best.direction);
    const double fd = f_(xi);
    for (double& v : xi) v /= fd;
    return xi;
  }
  LipschitzBounds lipschitz_bounds() const override { return bounds_; }

 private:
  struct Maximum {
    double value;
    Vec direction;  // unit vector
  };

  double ratio(std::span<const double> x, std::span<const double> d) const {
    double dot = 0.0;
    for (int i = 0; i < dim_; ++i) dot += x[i] * d[i];
    return dot / f_(d);
  }

  Maximum maximize(std::span<const double> x) const {
    std::size_t best = 0;
    double best_val = kNegInf;
    for (std::size_t i = 0; i < boundary_.size(); ++i) {
      double dot = 0.0;
      for (int k = 0; k < dim_; ++k) dot += x[k] * boundary_[i][k];
      if (dot > best_val) {
        best_val = dot;
        best = i;
      }
    }
    if (dim_ == 2) {
      const double spacing = 2.0 * std::numbers::pi / static_cast<double>(dirs_.size());
      const double t0 = std::atan2(dirs_[best][1], dirs_[best][0]);
      auto neg = [&](double t) {
        const double d[2] = {std::cos(t), std::sin(t)};
        return -ratio(x, d);
      };
      std::uintmax_t iters = 200;
      const auto res = boost::math::tools::brent_find_minima(neg, t0 - 1.5 * spacing,
                                                             t0 + 1.5 * spacing, 52, iters);
      if (iters >= 200) throw ConvergenceError("polar refinement did not converge", spacing);
      const double value = std::max(-res.second, best_val);
      return {value, {std::cos(res.first), std::sin(res.first)}};
    }
    return plane_refine(x, dirs_[best], best_val);
  }

  // F0(x) = 1 / min { F(xi) : <x, xi> = 1 }: a convex problem on the
  // hyperplane, solved by Powell's conjugate directions with Brent line
  // searches. Neither step needs derivatives, so near-kinks of F are harmless.
  Maximum plane_refine(std::span<const double> x, const Vec& start, double start_val) const {
    const int n = dim_;
    double xx = 0.0;
    for (int k = 0; k < n; ++k) xx += x[k] * x[k];
    Vec x0(n);
    for (int k = 0; k < n; ++k) x0[k] = x[k] / xx;
    // Orthonormal basis of the complement of x.
    std::vector<Vec> basis;
    for (int axis = 0; axis < n && static_cast<int>(basis.size()) < n - 1; ++axis) {
      Vec e(n, 0.0);
      e[axis] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        double px = 0.0;
        for (int k = 0; k < n; ++k) px += e[k] * x[k];
        for (int k = 0; k < n; ++k) e[k] -= px * x[k] / xx;
        for (const auto& b : basis) {
          double pb = 0.0;
          for (int k = 0; k < n; ++k) pb += e[k] * b[k];
          for (int k = 0; k < n; ++k) e[k] -= pb * b[k];
        }
      }
      const double len = norm2(e);
      if (len < 1e-3) continue;
      for (double& v : e) v /= len;
      basis.push_back(std::move(e));
    }
    const std::size_t m = basis.size();
    auto point = [&](const Vec& c) {
      Vec p(x0);
      for (std::size_t j = 0; j < m; ++j) {
        for (int k = 0; k < n; ++k) p[k] += c[j] * basis[j][k];
      }
      return p;
    };
    auto objective = [&](const Vec& c) { return f_(point(c)); };

    // Start from the best sampled boundary point scaled onto the plane.
    double sx = 0.0;
    for (int k = 0; k < n; ++k) sx += start[k] * x[k];
    Vec c(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      for (int k = 0; k < n; ++k) c[j] += start[k] / sx * basis[j][k];
    }
    const double scale = norm2(point(c));
    const double step0 = 2.0 * std::sqrt(4.0 * std::numbers::pi / static_cast<double>(dirs_.size())) * scale;

    // Partial minima of a convex function are convex, so minimizing one
    // coordinate at a time, innermost first, needs only 1-D bracketing.
    std::function<double(Vec&, std::size_t)> nested = [&](Vec& pt, std::size_t j) -> double {
      if (j == m) return objective(pt);
      auto phi = [&](double t) {
        Vec inner(pt);
        inner[j] = t;
        return nested(inner, j + 1);
      };
      double mid = pt[j], s = step0;
      double fm = phi(mid);
      double lo = mid - s, hi = mid + s;
      double flo = phi(lo), fhi = phi(hi);
      for (int k = 0; flo < fm && k < 200; ++k) {
        hi = mid, fhi = fm;
        mid = lo, fm = flo;
        s *= 2.0;
        lo = mid - s, flo = phi(lo);
      }
      for (int k = 0; fhi < fm && k < 200; ++k) {
        lo = mid, flo = fm;
        mid = hi, fm = fhi;
        s *= 2.0;
        hi = mid + s, fhi = phi(hi);
      }
      if (flo < fm || fhi < fm) throw ConvergenceError("polar refinement: no bracket", s / scale);
      std::uintmax_t iters = 200;
      const auto r = boost::math::tools::brent_find_minima(phi, lo, hi, std::numeric_limits<double>::digits, iters);
      pt[j] = r.first;
      return nested(pt, j + 1);
    };
    const double fc = nested(c, 0);
    Vec d = point(c);
    const double len = norm2(d);
    for (double& v : d) v /= len;
    return {std::max(1.0 / fc, start_val), std::move(d)};
  }

 protected:
  Gauge::Evaluator f_;
  std::string label_;
  std::vector<Vec> dirs_;
  std::vector<Vec> boundary_;
  LipschitzBounds bounds_;
};

// Trigonometric interpolant of the radial function of {F = 1}.
class RadialGauge2D final : public GenericGauge {
 public:
  RadialGauge2D(std::vector<double> radii, std::size_t samples)
      : GenericGauge(2, make_evaluator(radii), "radial M=" + std::to_string(radii.size()), samples),
        radii_(std::move(radii)) {}

  nlohmann::json to_json() const override {
    return {{"form", "generic"}, {"N", 2}, {"radii", radii_}};
  }

 private:
  static Gauge::Evaluator make_evaluator(const std::vector<double>& radii) {
    const std::size_t m = radii.size();
    if (m < 4 || m % 2 != 0) throw DomainError("radial gauge needs an even number (>= 4) of samples");
    for (std::size_t j = 0; j < m; ++j) {
      if (!(radii[j] > 0.0)) throw DomainError("radial gauge samples must be positive");
      if (std::abs(radii[j] - radii[(j + m / 2) % m]) > 1e-12 * radii[j]) {
        throw DomainError("radial gauge samples must be centrally symmetric");
      }
    }
    // Real DFT coefficients; the Nyquist term is halved for even m.
    const std::size_t half = m / 2;
    std::vector<double> a(half + 1, 0.0), b(half + 1, 0.0);
    for (std::size_t k = 0; k <= half; ++k) {
      for (std::size_t j = 0; j < m; ++j) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(j * k) / static_cast<double>(m);
        a[k] += radii[j] * std::cos(t);
        b[k] += radii[j] * std::sin(t);
      }
      const double scale = (k == 0 || k == half) ? 1.0 / m : 2.0 / m;
      a[k] *= scale;
      b[k] *= scale;
    }
    return [a, b, half](std::span<const double> xi) {
      const double r = norm2(xi);
      if (r == 0.0) return 0.0;
      const double t = std::atan2(xi[1], xi[0]);
      double rho = a[0];
      for (std::size_t k = 1; k <= half; ++k) {
        if (k == half) {
          rho += a[k] * std::cos(k * t);
        } else {
          rho += a[k] * std::cos(k * t) + b[k] * std::sin(k * t);
        }
      }
      return r / rho;
    };
  }

  std::vector<double> radii_;
};

}  // namespace
}  // namespace detail

Gauge::Gauge(std::shared_ptr<const detail::GaugeImpl> impl) : impl_(std::move(impl)) {}

Gauge Gauge::euclidean(int dim) { return pnorm(dim, 2.0); }

Gauge Gauge::pnorm(int dim, double p) {
  return Gauge(std::make_shared<detail::PNormGauge>(dim, p));
}

Gauge Gauge::ellipsoid(const Eigen::MatrixXd& a) {
  return Gauge(std::make_shared<detail::EllipsoidGauge>(a));
}

Gauge Gauge::generic(int dim, Evaluator f, std::string label, std::size_t samples) {
  return Gauge(std::make_shared<detail::GenericGauge>(dim, std::move(f), std::move(label), samples));
}

Gauge Gauge::radial_2d(std::vector<double> radii, std::size_t samples) {
  return Gauge(std::make_shared<detail::RadialGauge2D>(std::move(radii), samples));
}

Gauge Gauge::from_json(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("form")) throw ConfigError("gauge.form", "missing gauge form");
  const auto form = spec.at("form").get<std::string>();
  if (form == "pnorm") {
    if (!spec.contains("N")) throw ConfigError("gauge.N", "missing dimension");
    if (!spec.contains("p")) throw ConfigError("gauge.p", "missing exponent");
    const int dim = spec.at("N").get<int>();
    double p = 0.0;
    const auto& pj = spec.at("p");
    if (pj.is_string()) {
      if (pj.get<std::string>() != "inf") throw ConfigError("gauge.p", "expected a number or \"inf\"");
      p = std::numeric_limits<double>::infinity();
    } else {
      p = pj.get<double>();
    }
    if (dim < 2) throw ConfigError("gauge.N", "dimension must be >= 2");
    if (!(p >= 1.0)) throw ConfigError("gauge.p", "exponent must be >= 1");
    return pnorm(dim, p);
  }
  if (form == "ellipsoid") {
    if (!spec.contains("A")) throw ConfigError("gauge.A", "missing matrix");
    const auto rows = spec.at("A").get<std::vector<std::vector<double>>>();
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (spec.contains("N") && spec.at("N").get<int>() != n) {
      throw ConfigError("gauge.N", "does not match the matrix size");
    }
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != n) throw ConfigError("gauge.A", "matrix must be square");
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rows[i][j];
    }
    try {
      return ellipsoid(a);
    } catch (const DomainError& e) {
      throw ConfigError("gauge.A", e.what());
    }
  }
  if (form == "generic") {
    if (!spec.contains("radii")) {
      throw ConfigError("gauge.radii", "generic gauges are loaded from radial boundary samples");
    }
    try {
      return radial_2d(spec.at("radii").get<std::vector<double>>());
    } catch (const DomainError& e) {
      throw ConfigError("gauge.radii", e.what());
    }
  }
  throw ConfigError("gauge.form", "unknown form '" + form + "'");
}

nlohmann::json Gauge::to_json() const { return impl_->to_json(); }
int Gauge::dim() const { return impl_->dim(); }
GaugeForm Gauge::form() const { return impl_->form(); }
std::string Gauge::describe() const { return impl_->describe(); }
double Gauge::eval(std::span<const double> xi) const { return impl_->eval(xi); }
double Gauge::polar(std::span<const double> x) const { return impl_->polar(x); }
Vec Gauge::grad(std::span<const double> xi) const { return impl_->grad(xi); }
Vec Gauge::grad_polar(std::span<const double> x) const { return impl_->grad_polar(x); }
LipschitzBounds Gauge::lipschitz_bounds() const { return impl_->lipschitz_bounds(); }
std::optional<double> Gauge::wulff_volume_closed_form() const {
  return impl_->wulff_volume_closed_form();
}

double unit_ball_volume(int dim) {
  const double n = dim;
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

namespace {

Vec spherical(double theta, double phi) {
  return {std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi)};
}

// Tanh-sinh over consecutive sub-intervals (the breaks carry the endpoint
// singularities of corner-like Wulff shapes); accumulates the
// error estimate.
template <class F>
double integrate_pieces(F&& f, std::span<const double> breaks, double tol, double& err) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    // Non-const: Boost 1.74 rejects integrate() on a const instance.
    static tanh_sinh<double> rule;
    double e = 0.0;
    total += rule.integrate(f, breaks[i], breaks[i + 1], tol, &e);
    err += e;
  }
  return total;
}

}  // namespace

double wulff_volume(const Gauge& g, double rel_tol) {
  const int dim = g.dim();
  const double pi = std::numbers::pi;
  double err = 0.0;
  double value = 0.0;
  if (dim == 2) {
    auto f = [&](double t) {
      const double d[2] = {std::cos(t), std::sin(t)};
      const double rho = 1.0 / g.polar(d);
      return rho * rho;
    };
    // Half turn by central symmetry; breaks at the axes where p-norm Wulff
    // shapes can have corners.
    const double breaks[] = {0.0, pi / 4, pi / 2, 3 * pi / 4, pi};
    value = integrate_pieces(f, breaks, 1e-12, err);  // = 2 * (1/2) * half-turn integral
  } else if (dim == 3) {
    auto inner = [&](double theta) {
      auto f = [&](double phi) {
        const Vec d = spherical(theta, phi);
        const double rho = 1.0 / g.polar(d);
        return rho * rho * rho * std::sin(phi);
      };
      double e = 0.0;
      const double breaks[] = {0.0, pi / 4, pi / 2, 3 * pi / 4, pi};
      return integrate_pieces(f, breaks, 1e-11, e);
    };
    const double breaks[] = {0.0, pi / 4, pi / 2, 3 * pi / 4, pi};
    value = 2.0 / 3.0 * integrate_pieces(inner, breaks, 1e-10, err);
    err *= 2.0 / 3.0;
  } else {
    if (auto closed = g.wulff_volume_closed_form()) return *closed;
    throw DomainError("wulff_volume: generic quadrature is implemented for N = 2 and N = 3");
  }
  if (!(err <= rel_tol * value)) {
    throw ConvergenceError("wulff_volume: quadrature budget exceeded", err / value);
  }
  return value;
}

GaugeConstants constants_from_kappa(int dim, double kappa) {
  if (dim < 2) throw DomainError("dimension must be >= 2");
  if (!(kappa > 0.0)) throw DomainError("Wulff volume must be positive");
  const double n = dim;
  GaugeConstants c;
  c.dim = dim;
  c.kappa = kappa;
  c.omega = unit_ball_volume(dim);
  c.lambda = std::pow(n, n / (n - 1.0)) * std::pow(kappa, 1.0 / (n - 1.0));
  c.alpha = std::pow(n, n / (n - 1.0)) * std::pow(c.omega, 1.0 / (n - 1.0));
  c.gamma = std::pow(kappa / c.omega, 1.0 / n);
  return c;
}

GaugeConstants constants(const Gauge& g) { return constants_from_kappa(g.dim(), wulff_volume(g)); }

double coarea_integral(const Gauge& g, double r, double rel_tol) {
  const double pi = std::numbers::pi;
  if (!(r > 0.0)) throw DomainError("coarea_integral: radius must be positive");
  double err = 0.0;
  double value = 0.0;
  if (g.dim() == 2) {
    // x(t) = r rho(t) e_r(t); |x'| = r sqrt(rho'^2 + rho^2); grad F0 is
    // 0-homogeneous, so it is evaluated at e_r.
    auto f = [&](double t) {
      const double er[2] = {std::cos(t), std::sin(t)};
      const double et[2] = {-std::sin(t), std::cos(t)};
      const double f0 = g.polar(er);
      const double rho = 1.0 / f0;
      const Vec gr = g.grad_polar(er);
      const double drho = -(gr[0] * et[0] + gr[1] * et[1]) * rho * rho;
      const double speed = r * std::hypot(drho, rho);
      return speed / norm2(gr);
    };
    const double breaks[] = {0.0, pi / 4, pi / 2, 3 * pi / 4, pi, 5 * pi / 4, 3 * pi / 2, 7 * pi / 4, 2 * pi};
    value = integrate_pieces(f, breaks, 1e-12, err);
  } else if (g.dim() == 3) {
    auto inner = [&](double theta) {
      auto f = [&](double phi) {
        const Vec er = spherical(theta, phi);
        const Vec ephi{std::cos(phi) * std::cos(theta), std::cos(phi) * std::sin(theta), -std::sin(phi)};
        const Vec etheta{-std::sin(theta), std::cos(theta), 0.0};
        const double rho = 1.0 / g.polar(er);
        const Vec gr = g.grad_polar(er);
        auto dot = [](const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; };
        const double s = std::sin(phi);
        const double rho_phi = -dot(gr, ephi) * rho * rho;
        const double rho_theta = -dot(gr, etheta) * s * rho * rho;
        Vec xphi(3), xtheta(3);
        for (int k = 0; k < 3; ++k) {
          xphi[k] = r * (rho_phi * er[k] + rho * ephi[k]);
          xtheta[k] = r * (rho_theta * er[k] + rho * s * etheta[k]);
        }
        const double cx = xphi[1] * xtheta[2] - xphi[2] * xtheta[1];
        const double cy = xphi[2] * xtheta[0] - xphi[0] * xtheta[2];
        const double cz = xphi[0] * xtheta[1] - xphi[1] * xtheta[0];
        return std::sqrt(cx * cx + cy * cy + cz * cz) / norm2(gr);
      };
      double e = 0.0;
      const double breaks[] = {0.0, pi / 4, pi / 2, 3 * pi / 4, pi};
      return integrate_pieces(f, breaks, 1e-10, e);
    };
    const double breaks[] = {0.0, pi / 4, pi / 2, 3 * pi / 4, pi, 5 * pi / 4, 3 * pi / 2, 7 * pi / 4, 2 * pi};
    value = integrate_pieces(inner, breaks, 1e-9, err);
  } else {
    throw DomainError("coarea_integral: implemented for N = 2 and N = 3");
  }
  if (!(err <= rel_tol * std::abs(value) + 1e-14)) {
    throw ConvergenceError("coarea_integral: quadrature budget exceeded", err / value);
  }
  return value;
}

}  // namespace tmlab

#pragma once

// Wulff-radial profiles u(r), r = F0(x), stored on a grid in log r.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tmlab/finsler.hpp"

namespace tmlab {

/// Nonincreasing radial function on log-spaced nodes r_0 < ... < r_M.
///
/// Between nodes the profile is linear in ln r; for r < r_0 it equals the
/// plateau value u(r_0); for r > r_M it vanishes. A nonzero u(r_M) is a jump
/// at the support radius (indicator-like profiles).
///
/// Node radii are kept as base log-radii together with a multiplicative
/// dilation factor, and node values as base values together with a value
/// scale. This keeps radii representable far below the smallest double
/// (the plateau edge of the Moser sequence sits at e^{-n/(N-beta)}) and makes
/// repeated dilations compose exactly.
class RadialProfile {
 public:
  /// `log_r` strictly increasing, `values` nonnegative and nonincreasing.
  RadialProfile(std::vector<double> log_r, std::vector<double> values, int dim, double kappa,
                std::string gauge_label);

  /// Samples f at `count` log-spaced radii in [r_min, r_max]; the result is
  /// forced nonincreasing by a running minimum.
  static RadialProfile sample(const std::function<double(double)>& f, double r_min, double r_max,
                              std::size_t count, int dim, double kappa, std::string gauge_label);

  std::size_t size() const { return base_log_r_.size(); }
  double log_radius(std::size_t i) const;
  /// exp(log_radius(i)); may underflow to 0 for very small radii.
  double radius(std::size_t i) const;
  double value(std::size_t i) const { return base_values_[i] * value_scale_; }

  double plateau_value() const { return value(0); }
  double support_radius() const;
  double log_support_radius() const { return log_radius(size() - 1); }
  bool has_jump() const { return value(size() - 1) > 0.0; }
  bool is_zero() const;

  /// u(r) for r >= 0.
  double operator()(double r) const;
  /// u(e^s).
  double at_log_radius(double s) const;
  /// du/d(ln r) on the cell containing e^s (0 on the plateau and beyond).
  double log_slope(double s) const;

  int dim() const { return dim_; }
  double kappa() const { return kappa_; }
  const std::string& gauge_label() const { return gauge_label_; }
  double dilation() const { return dilation_; }
  double value_scale() const { return value_scale_; }

  /// r -> u(lambda r).
  RadialProfile dilated(double lambda) const;
  /// r -> c u(r).
  RadialProfile scaled(double c) const;
  /// Same nodes and values, radial with respect to a different gauge.
  RadialProfile retagged(double kappa, std::string gauge_label) const;

  /// CSV with a "# gauge=...; kappa=...; N=..." header, columns r,u and the
  /// r = 0 plateau node first. Throws DomainError if a node radius underflows.
  void write_csv(std::ostream& out) const;
  static RadialProfile read_csv(std::istream& in);

 private:
  std::size_t cell_of(double s) const;

  std::vector<double> base_log_r_;
  std::vector<double> base_values_;
  double dilation_ = 1.0;
  double value_scale_ = 1.0;
  int dim_ = 2;
  double kappa_ = 0.0;
  std::string gauge_label_;
};

/// Number of log-spaced nodes used for Moser profiles.
inline constexpr std::size_t kMoserNodes = 2048;

/// The extremal sequence u_n: plateau (1/(N kappa))^{1/N} (n/(N-beta))^{(N-1)/N}
/// for r <= e^{-n/(N-beta)}, ((N-beta)/(n N kappa))^{1/N} ln(1/r) up to r = 1,
/// zero beyond. Nodes are uniform in ln r between the plateau edge and 1.
/// Real n > 0 is accepted.
RadialProfile moser_profile(double n, double beta, const GaugeConstants& c,
                            const std::string& gauge_label, std::size_t nodes = kMoserNodes);
RadialProfile moser_profile(double n, int dim, double beta, const Gauge& g);

/// Plateau height of u_n.
double moser_plateau(double n, int dim, double beta, double kappa);

RadialProfile dilate(const RadialProfile& u, double lambda);
RadialProfile scale_values(const RadialProfile& u, double c);

/// Root c in (0, 1] of c^a + (c * lq_norm)^b = 1 by bisection carried to
/// machine precision.
double solve_scale(double lq_norm, double a, double b);

/// Root c in (0, 1] of c^a + c^N * lq_norm^N = 1.
double solve_cn(double lq_norm, double a, int dim);
/// Same, with lq_norm = ||u||_q.
double solve_cn(const RadialProfile& u, double a, int dim, double q);

}  // namespace tmlab

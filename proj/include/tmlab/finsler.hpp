#pragma once

// Finsler gauges F on R^N, their polars F0, gradients, Wulff-ball volumes and
// the sharp constants derived from them.

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace tmlab {

using Vec = std::vector<double>;

namespace detail {
class GaugeImpl;
}

enum class GaugeForm { PNorm, Ellipsoid, Generic };

/// Constants attached to a gauge in dimension N.
struct GaugeConstants {
  int dim = 0;
  double kappa = 0.0;   // |W_1| = |{F0 <= 1}|
  double omega = 0.0;   // volume of the Euclidean unit ball
  double lambda = 0.0;  // N^{N/(N-1)} kappa^{1/(N-1)}
  double alpha = 0.0;   // N^{N/(N-1)} omega^{1/(N-1)}
  double gamma = 0.0;   // (kappa / omega)^{1/N}
};

/// Bi-Lipschitz comparison a|xi| <= F(xi) <= b|xi|.
struct LipschitzBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// An even, convex, positively 1-homogeneous gauge. Immutable value handle;
/// copies share the underlying representation and are safe to use from
/// several threads.
class Gauge {
 public:
  using Evaluator = std::function<double(std::span<const double>)>;

  static Gauge euclidean(int dim);
  /// F(xi) = (sum |xi_i|^p)^{1/p}; p in [1, inf], p = inf gives the max norm.
  static Gauge pnorm(int dim, double p);
  /// F(xi) = sqrt(xi^T A xi) for symmetric positive-definite A.
  static Gauge ellipsoid(const Eigen::MatrixXd& a);
  /// Gauge given only by an evaluator. The polar is computed by maximizing
  /// <x, xi> over sampled points of {F = 1} followed by local refinement.
  /// `samples` = 0 picks a default density for the dimension.
  static Gauge generic(int dim, Evaluator f, std::string label, std::size_t samples = 0);
  /// Planar generic gauge whose unit sphere {F = 1} has radius radii[j] in
  /// direction 2*pi*j/M; trigonometric interpolation in between. The sample
  /// count must be even and the samples centrally symmetric.
  static Gauge radial_2d(std::vector<double> radii, std::size_t samples = 0);

  static Gauge from_json(const nlohmann::json& spec);
  nlohmann::json to_json() const;

  int dim() const;
  GaugeForm form() const;
  std::string describe() const;

  double eval(std::span<const double> xi) const;
  double polar(std::span<const double> x) const;
  /// Gradient of F; throws DomainError at xi = 0.
  Vec grad(std::span<const double> xi) const;
  /// Gradient of F0; throws DomainError at x = 0.
  Vec grad_polar(std::span<const double> x) const;
  LipschitzBounds lipschitz_bounds() const;

  /// Closed-form |{F0 <= 1}| where the family has one (p-norms, ellipsoids).
  std::optional<double> wulff_volume_closed_form() const;

 private:
  explicit Gauge(std::shared_ptr<const detail::GaugeImpl> impl);
  std::shared_ptr<const detail::GaugeImpl> impl_;
};

/// Volume of the Euclidean unit ball in R^N.
double unit_ball_volume(int dim);

/// |{x : F0(x) <= 1}| by adaptive quadrature in polar coordinates, where the
/// radial boundary in direction theta is 1 / F0(theta). Implemented for
/// N = 2, 3; higher dimensions fall back to the closed form when available.
/// Throws ConvergenceError when the relative error estimate exceeds rel_tol.
double wulff_volume(const Gauge& g, double rel_tol = 1e-7);

/// All five constants; kappa from wulff_volume.
GaugeConstants constants(const Gauge& g);
/// Constants for an explicitly given Wulff volume.
GaugeConstants constants_from_kappa(int dim, double kappa);

/// Surface integral of 1/|grad F0| over the Wulff sphere {F0 = r}, computed
/// from the parametrized surface and its area element (N = 2, 3).
double coarea_integral(const Gauge& g, double r, double rel_tol = 1e-8);

/// Euclidean norm helper.
double norm2(std::span<const double> x);

}  // namespace tmlab

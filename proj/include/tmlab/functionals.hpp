#pragma once

// Truncated exponential series, radial norms and the singular
// Trudinger-Moser integrals and ratios, all reduced to one-dimensional
// quadrature in ln r.

#include <functional>
#include <string>

#include "json.hpp"
#include "tmlab/numerics.hpp"
#include "tmlab/profiles.hpp"

namespace tmlab {

/// Parameter bundle shared by the functionals. `lambda` is absolute (not
/// relative to lambda_N).
struct TMParams {
  int N = 2;
  double q = 2.0;
  double p = 2.0;
  double beta = 0.0;
  double lambda = 1.0;
  double d = 1.0;
  double k = 2.0;
  double a = 2.0;
  double b = 2.0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  nlohmann::json to_json() const;
  static TMParams from_json(const nlohmann::json& j);
};

struct FunctionalValue {
  double value = 0.0;        // +inf when saturated
  double log_value = kNegInf;
  double error_estimate = 0.0;  // absolute, same scale as value
  double log_plateau = kNegInf;  // log of the plateau contribution (a lower bound)
  int truncation_terms = 0;
  bool saturated = false;
  bool within_hypothesis = true;
};

// ---------------------------------------------------------------------------
// Phi_{N,q,beta}

/// First index of the truncated series: the smallest j > theta if beta > 0,
/// the smallest j >= theta if beta == 0, theta = q (N-1)/N (1 - beta/N).
int phi_start_index(int N, double q, double beta);

struct PhiValue {
  double value = 0.0;  // +inf when saturated
  double log_value = kNegInf;
  int terms = 0;
  bool saturated = false;
};

/// Phi(t) = sum_{j >= j0} t^j / j!.
PhiValue phi_series(double t, int N, double q, double beta);
/// log Phi(t), finite for every t > 0.
double log_phi(double t, int j0);

// ---------------------------------------------------------------------------
// Radial integrals

/// N kappa * integral of exp(log_f(u(r))) r^{weight_exponent - 1} dr over
/// the support intersected with r >= e^{log_r_min}; log_f(0) may be -inf.
/// Gauss-Legendre panels in ln r with the plateau integrated in closed form.
FunctionalValue radial_integral(const RadialProfile& u, const std::function<double(double)>& log_f,
                                double weight_exponent, double log_r_min = kNegInf);

/// (N kappa int |u'(r)|^N r^{N-1} dr)^{1/N}; exact on log-linear cells,
/// +inf for profiles with a jump.
double dirichlet_norm(const RadialProfile& u);
/// Same, checking that u is radial with respect to a gauge of matching dimension.
double dirichlet_norm(const RadialProfile& u, const Gauge& g);

/// (N kappa int u^q r^{N-1} dr)^{1/q}.
double lq_norm(const RadialProfile& u, double q);
double log_lq_norm(const RadialProfile& u, double q);

enum class TMVariant { ExpP, Phi, PhiExactGrowth, PhiExactGrowthK };
enum class Theorem { T11, T14, T15, T16 };
enum class ConstraintKind { GradOnly, SumAB, SumAKN };

std::string to_string(TMVariant v);
std::string to_string(Theorem t);
std::string to_string(ConstraintKind k);
TMVariant variant_from_string(const std::string& s);
Theorem theorem_from_string(const std::string& s);

/// log of the integrand numerator at value u (without the weight).
double tm_log_integrand(double u, const TMParams& params, TMVariant variant);

/// int numerator(u) / F0(x)^beta dx via the radial reduction.
FunctionalValue tm_integral(const RadialProfile& u, const TMParams& params, TMVariant variant);

struct ConstraintResult {
  bool satisfied = false;
  double slack = 0.0;  // 1 - lhs
};

/// Feasibility tolerance on the slack.
inline constexpr double kConstraintTol = 1e-8;

ConstraintResult constraint_check(const RadialProfile& u, const TMParams& params, ConstraintKind kind);

TMVariant theorem_variant(Theorem t);
ConstraintKind theorem_constraint(Theorem t);
/// Exponent of ||u||_q in the divisor of the theorem's ratio (0 for T15).
double theorem_norm_power(Theorem t, const TMParams& params);
/// The theorem's hypothesis on p: T11 needs p > q(1-beta/N) (p >= q when
/// beta = 0); T14, T15, T16 need p >= q.
bool theorem_hypothesis(Theorem t, const TMParams& params);

/// Integral divided by the theorem's power of ||u||_q. Throws DomainError
/// ("degenerate input") for the zero profile and when the theorem's
/// constraint is violated, unless `check_constraint` is false.
FunctionalValue ratio(const RadialProfile& u, const TMParams& params, Theorem theorem,
                      bool check_constraint = true);

}  // namespace tmlab

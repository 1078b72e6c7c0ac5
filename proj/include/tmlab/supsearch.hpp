#pragma once

// Supremum estimates for the subcritical and constrained constants,
// the identity linking them, sharpness sweeps along the extremal
// sequences, and the scaling identities behind symmetrization and the
// equivalence of the two exact-growth forms.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tmlab/functionals.hpp"
#include "tmlab/profiles.hpp"

namespace tmlab {

enum class FamilyKind { Moser, MoserPerturbed, TruncatedPower };

std::string to_string(FamilyKind k);
FamilyKind family_from_string(const std::string& s);

/// Search space of radial profiles parametrized by a box.
///  - Moser: x = (ln n).
///  - MoserPerturbed: x = (ln n, d_1..d_m); the profile rises from 0 at r = 1
///    to the plateau edge e^{-T}, T = n/(N-beta), in m equal steps of ln r
///    with increments (P/m) e^{d_i}, P the Moser plateau height.
///  - TruncatedPower: x = (ln T, sigma); u = min(ln(1/r), T)^sigma on r <= 1.
struct ProfileFamily {
  FamilyKind kind = FamilyKind::Moser;
  int knots = 0;
  std::vector<double> lower;
  std::vector<double> upper;

  static ProfileFamily moser(double ln_n_min = -3.0, double ln_n_max = 7.0);
  static ProfileFamily moser_perturbed(int knots, double ln_n_min = -3.0, double ln_n_max = 7.0,
                                       double delta = 2.0);
  static ProfileFamily truncated_power(double ln_t_min = -3.0, double ln_t_max = 7.0,
                                       double sigma_min = 0.25, double sigma_max = 2.0);

  std::size_t dimension() const { return lower.size(); }
  /// Maps a point of [0, 1]^d onto the box.
  std::vector<double> from_unit(std::span<const double> y) const;
  RadialProfile realize(std::span<const double> x, double beta, const GaugeConstants& c,
                        const std::string& gauge_label) const;
  nlohmann::json to_json() const;
};

struct SearchOptions {
  std::size_t budget = 2000;  // objective evaluations
  std::uint64_t seed = 0;
  int jobs = 1;
  double initial_step = 0.25;
  double min_step = 1e-4;
};

struct SearchResult {
  double best = kNegInf;
  std::vector<double> argmax_unit;  // in [0, 1]^d
  std::size_t evaluations = 0;
  bool budget_exhausted = false;
};

/// Maximizes f over [0, 1]^d by compass search with step halving and seeded
/// random restarts (the first start is the cube center). The evaluation
/// sequence does not depend on the budget, which only truncates it, so the
/// best value is nondecreasing in the budget. Poll points are evaluated
/// concurrently and reduced by (value, poll index). Evaluations that throw or
/// return NaN count as -inf.
SearchResult pattern_search(const std::function<double(std::span<const double>)>& f, std::size_t dim,
                            const SearchOptions& options);

struct SupEstimate {
  double value = 0.0;  // exp(log_value); +inf when saturated
  double log_value = kNegInf;
  std::vector<double> argmax;  // family box coordinates (plus the mass split t for ATMC)
  std::size_t evaluations = 0;
  bool saturated = false;
  bool budget_exhausted = false;

  nlohmann::json to_json() const;
};

/// log of the subcritical ratio int Phi(lambda (1-beta/N) u^{N/(N-1)}) / F0^beta
/// divided by ||u||_q^{q(1-beta/N)}, after scaling u to unit gradient norm.
double atmsc_log_objective(const RadialProfile& u, int N, double q, double lambda, double beta);

/// log of int Phi(lambda_N (1-beta/N) v^{N/(N-1)}) / F0^beta for
/// v = dilate(c u, s), where c and s put t of the constraint budget on the
/// gradient term and 1 - t on the norm term: ||F(grad v)||_N^a = t and
/// ||v||_q^b = 1 - t.
double atmc_log_objective(const RadialProfile& u, int N, double q, double beta, double a, double b,
                          double t, double lambda_N);

SupEstimate estimate_atmsc(int N, double q, double lambda, double beta, const GaugeConstants& c,
                           const ProfileFamily& family, const SearchOptions& options);
SupEstimate estimate_atmc(int N, double q, double beta, double a, double b, const GaugeConstants& c,
                          const ProfileFamily& family, const SearchOptions& options);

/// ((1 - l^{a(N-1)/N}) / l^{b(N-1)/N})^{(q/b)(1-beta/N)} with l = lambda/lambda_N.
double atmc_bracket(double lambda_rel, int N, double q, double beta, double a, double b);

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double reldiff = 0.0;
  double best_lambda_rel = 0.0;
  std::vector<double> lambda_grid;  // relative to lambda_N
  std::vector<double> atmsc;        // estimate per grid point
  std::vector<double> products;     // bracket * estimate per grid point
  SupEstimate atmc;

  nlohmann::json to_json() const;
};

/// lhs = estimate_atmc, rhs = max over the grid of bracket * estimate_atmsc.
IdentityCheck atmc_identity_check(int N, double q, double beta, double a, double b,
                                  std::span<const double> lambda_grid_rel, const GaugeConstants& c,
                                  const ProfileFamily& family, const SearchOptions& options);

// ---------------------------------------------------------------------------
// Sharpness sweeps

struct GrowthPoint {
  double n = 0.0;
  double scale = 1.0;  // c_n (1 for the plain sequence)
  double log_integral = kNegInf;
  double log_norm = kNegInf;  // log ||u||_q
  double log_ratio = kNegInf;
  double error_estimate = 0.0;
  bool saturated = false;
  bool within_hypothesis = true;
};

struct GrowthReport {
  Theorem theorem = Theorem::T11;
  TMParams params;
  double lambda_rel = 1.0;
  std::string sequence;        // "u_n", "c_n u_n"
  std::string fit_target;      // "ratio" or "integral"
  std::string fit_mode;        // "log-log" (power of n) or "log-linear" (exponential in n)
  double fitted_exponent = 0.0;
  double predicted_exponent = 0.0;
  double r_squared = 0.0;
  std::size_t fit_skip = 3;
  bool divergent = false;
  double top_half_slope = 0.0;
  double top_half_r_squared = 0.0;
  std::vector<GrowthPoint> points;

  nlohmann::json to_json() const;
};

struct SweepOptions {
  std::string fit_target;  // empty: "integral" for T11 at lambda >= lambda_N, else "ratio"
  std::string fit_mode;    // empty: "log-linear" when lambda > lambda_N, else "log-log"
  std::size_t fit_skip = 3;
  int jobs = 1;
};

/// Leading growth exponent of the fitted quantity along the sequence.
double predicted_growth(Theorem t, const TMParams& params, double lambda_rel,
                        const std::string& fit_target, const std::string& fit_mode);

/// Slope > 0.05 of log(value) against log n on the top half of the points
/// with R^2 >= 0.98.
bool detect_divergence(std::span<const double> n, std::span<const double> log_values,
                       double* slope = nullptr, double* r_squared = nullptr);

/// Evaluates the theorem's ratio along u_n (T11, T14), c_n u_n with
/// c^a + (c ||u_n||_q)^{kN} = 1 (T15) or c^a + (c ||u_n||_q)^N = 1 (T16),
/// and fits the growth. params.lambda is absolute.
GrowthReport sharpness_sweep(Theorem theorem, const TMParams& params, const GaugeConstants& c,
                             const std::string& gauge_label, std::span<const double> n_list,
                             const SweepOptions& options = {});

/// Maximum over t in (0, 1) of the ATMC objective for the shape u_n, for
/// each n, and the divergence fit of the resulting sequence.
struct AtmcGrowth {
  std::vector<double> n;
  std::vector<double> log_values;
  std::vector<double> best_t;
  double slope = 0.0;
  double r_squared = 0.0;
  bool divergent = false;

  nlohmann::json to_json() const;
};
AtmcGrowth atmc_moser_growth(int N, double q, double beta, double a, double b, const GaugeConstants& c,
                             std::span<const double> n_list, int jobs = 1);

// ---------------------------------------------------------------------------
// Scaling identities

/// Convex against Schwarz symmetrization of the same u#: u* = dilate(u_star, 1/gamma)
/// radial for the Euclidean norm.
struct SymmetrizationIdentity {
  double dirichlet_lhs = 0.0;  // ||F(grad u_star)||_N^N
  double dirichlet_rhs = 0.0;  // gamma^N ||grad u*||_N^N
  double integral_lhs = 0.0;   // log of int f(u_star) / F0^beta
  double integral_rhs = 0.0;   // log of gamma^beta int f(u*) / |x|^beta
  double dirichlet_reldiff = 0.0;
  double integral_reldiff = 0.0;
};
SymmetrizationIdentity symmetrization_identity(const RadialProfile& u_star, const TMParams& params,
                                               TMVariant variant);

/// Moves a profile admissible for the norm-weighted exact-growth form
/// (||F(grad v)||_N^a + ||v||_q^N <= 1) to the unweighted form
/// (||F(grad u)||_N^a + ||u||_q^{kN} <= 1) by u(x) = v(lambda x),
/// lambda = ||v||_q^{(1-1/k) q/N}, and compares both sides.
struct ScalingEquivalence {
  double lambda = 0.0;
  double constraint_v = 0.0;   // ||F(grad v)||^a + ||v||^N
  double constraint_u = 0.0;   // ||F(grad u)||^a + ||u||^{kN}
  double ratio_weighted = 0.0;    // log ratio for v (norm-weighted form)
  double ratio_unweighted = 0.0;  // log integral for u
  double integral_v = 0.0;  // log integral for v
  double integral_u_scaled = 0.0;  // log of lambda^{N-beta} integral for u
  double ratio_reldiff = 0.0;
  double integral_reldiff = 0.0;
  double constraint_reldiff = 0.0;
  // Reverse direction: v' = dilate(u, ||u||_q^{-(k-1) q/N}) recovers v.
  double roundtrip_reldiff = 0.0;
};
ScalingEquivalence scaling_equivalence(const RadialProfile& v, const TMParams& params);

/// Random nonincreasing piecewise log-linear profile with compact support.
RadialProfile random_profile(int dim, double kappa, const std::string& gauge_label, std::uint64_t seed,
                             std::size_t nodes = 64);

}  // namespace tmlab

#pragma once

// The discrete problem mu(h) = inf { ||a||_e : ||a||_1 = h, ||a||_N <= 1 }
// with ||a||_e = (sum a_k^q e^k)^{1/q}, and the discretization bound for
// radial profiles that it controls.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tmlab/profiles.hpp"

namespace tmlab {

struct SeqNorms {
  double l1 = 0.0;
  double lN = 0.0;
  double le = 0.0;
};

/// (||a||_1, ||a||_N, ||a||_e) for a nonnegative sequence.
SeqNorms seq_norms(std::span<const double> a, double q, double N);

struct MuResult {
  double mu_upper = 0.0;      // ||a||_e at the returned point
  double kkt_residual = 0.0;  // max relative stationarity residual
  double multiplier_N = 0.0;  // multiplier of ||a||_N^N <= 1 (0 when slack)
  std::string active_constraint;  // "l1" or "l1+lN"
  std::vector<double> a;
  std::size_t K = 0;       // entries a_0..a_K
  int best_start = 0;      // index of the start that produced the point
  bool converged = false;  // kkt_residual <= 1e-6
};

/// K = max(64, ceil(4 h^{N/(N-1)})).
std::size_t mu_truncation(double h, double N);

struct MuOptions {
  std::size_t K = 0;  // 0 selects mu_truncation(h, N)
  int starts = 8;     // start 0 is the KKT point; others are perturbed descents
  std::uint64_t seed = 0;
  int jobs = 1;
};

/// Upper bound on mu(h). The KKT system of the convex problem is solved by
/// nested monotone root finding (per-entry stationarity, the l1 multiplier,
/// then the l_N multiplier); additional starts run projected descent on the
/// simplex {sum a = h} with a penalty on ||a||_N and keep any feasible
/// improvement. Throws DomainError if h > (K+1)^{(N-1)/N} (infeasible).
MuResult mu_estimate(double h, double q, double N, const MuOptions& options = {});

/// exp(h^{N/(N-1)} / q) / h^{1/(N-1)} for h > 1.
double mu_asymptotic(double h, double q, double N);

struct Lemma32Report {
  double threshold = 0.0;    // (1/N)(K/kappa)^{1/N}
  double u_R = 0.0;
  double tail_energy = 0.0;  // int_{F0 > R} F^N(grad u) dx
  bool value_hypothesis = false;
  bool energy_hypothesis = false;
  std::vector<double> h;  // h_k = N (kappa/K)^{1/N} u(R e^{k/N}), last entry 0
  std::vector<double> a;  // a_k = h_k - h_{k+1}
  double a_norm_N = 0.0;
  double telescoping_residual = 0.0;  // |sum a - (h_0 - h_last)|
  double log_lhs = 0.0;
  double log_rhs = 0.0;       // without the constant
  double log_constant = 0.0;  // log_lhs - log_rhs
  double constant = 0.0;

  bool hypotheses() const { return value_hypothesis && energy_hypothesis; }
};

/// Evaluates both sides of
///   exp(lambda_N K^{1/(1-N)} u(R)^{N/(N-1)}) R^N / u(R)^{q/(N-1)}
///     <= C int_R^inf u^q r^{N-1} dr / K^{q/(N-1)}
/// and the sequence (a_k) behind it. Throws DomainError if a hypothesis
/// fails and `require_hypotheses` is set.
Lemma32Report lemma32_check(const RadialProfile& u, double R, double K, double q,
                            bool require_hypotheses = true);

/// Energy of u outside the Wulff ball of radius R.
double tail_energy(const RadialProfile& u, double R);

}  // namespace tmlab

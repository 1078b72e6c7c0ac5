#include "tmlab/seqopt.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "tmlab/errors.hpp"
#include "tmlab/functionals.hpp"
#include "tmlab/numerics.hpp"

namespace tmlab {

SeqNorms seq_norms(std::span<const double> a, double q, double N) {
  if (!(q >= 1.0) || !(N >= 1.0)) throw DomainError("seq_norms: need q >= 1 and N >= 1");
  SeqNorms out;
  double sn = 0.0, se = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!(a[k] >= 0.0)) throw DomainError("seq_norms: entries must be nonnegative");
    if (a[k] == 0.0) continue;
    out.l1 += a[k];
    sn += std::pow(a[k], N);
    se += std::exp(static_cast<double>(k) + q * std::log(a[k]));
  }
  out.lN = std::pow(sn, 1.0 / N);
  out.le = std::pow(se, 1.0 / q);
  return out;
}

std::size_t mu_truncation(double h, double N) {
  return std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil(4.0 * std::pow(h, N / (N - 1.0)))));
}

double mu_asymptotic(double h, double q, double N) {
  if (!(h > 1.0)) throw DomainError("mu_asymptotic: requires h > 1");
  if (!(q >= 1.0) || !(N > 1.0)) throw DomainError("mu_asymptotic: need q >= 1 and N > 1");
  return std::exp(std::pow(h, N / (N - 1.0)) / q) / std::pow(h, 1.0 / (N - 1.0));
}

namespace {

constexpr std::size_t kMaxEntries = 700;  // e^k stays finite

// Minimize sum e^k a_k^q subject to sum a_k = h, sum a_k^N <= 1, a >= 0.
class KktSolver {
 public:
  KktSolver(double h, double q, double N, std::size_t K) : h_(h), q_(q), N_(N), K_(K) {}

  // Solution of q e^k a^{q-1} + nu N a^{N-1} = tau with a >= 0.
  double entry(std::size_t k, double tau, double nu) const {
    const double ek = std::exp(static_cast<double>(k));
    if (q_ == 1.0) {
      if (tau <= ek) return 0.0;
      if (nu <= 0.0) return kInf;
      return std::pow((tau - ek) / (nu * N_), 1.0 / (N_ - 1.0));
    }
    const double a1 = std::pow(tau / (q_ * ek), 1.0 / (q_ - 1.0));
    if (nu <= 0.0) return a1;
    const double a2 = std::pow(tau / (nu * N_), 1.0 / (N_ - 1.0));
    // Monotone in x = ln a; the root lies in [ln(min/2^p), ln(min)].
    double hi = std::log(std::min(a1, a2));
    double lo = hi - std::log(2.0) * std::max(1.0 / (q_ - 1.0), 1.0 / (N_ - 1.0)) - 1e-12;
    const double log_tau = std::log(tau);
    auto psi = [&](double x) {
      const double t1 = std::log(q_) + static_cast<double>(k) + (q_ - 1.0) * x;
      const double t2 = std::log(nu * N_) + (N_ - 1.0) * x;
      const double m = std::max(t1, t2);
      return m + std::log(std::exp(t1 - m) + std::exp(t2 - m)) - log_tau;
    };
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double f = psi(x);
      if (std::abs(f) < 1e-15) break;
      if (f > 0.0) {
        hi = x;
      } else {
        lo = x;
      }
      // Newton step on psi; its slope is a convex combination of q-1 and N-1.
      const double t1 = std::log(q_) + static_cast<double>(k) + (q_ - 1.0) * x;
      const double t2 = std::log(nu * N_) + (N_ - 1.0) * x;
      const double w1 = 1.0 / (1.0 + std::exp(t2 - t1));
      const double slope = (q_ - 1.0) * w1 + (N_ - 1.0) * (1.0 - w1);
      double next = x - f / slope;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - x) < 1e-15 * std::max(1.0, std::abs(x))) {
        x = next;
        break;
      }
      x = next;
    }
    return std::exp(x);
  }

  std::vector<double> point(double tau, double nu) const {
    std::vector<double> a(K_ + 1);
    for (std::size_t k = 0; k <= K_; ++k) a[k] = entry(k, tau, nu);
    return a;
  }

  double sum(const std::vector<double>& a) const {
    double s = 0.0;
    for (double v : a) s += v;
    return s;
  }

  // tau with sum_k a_k(tau, nu) = h.
  double solve_tau(double nu) const {
    auto f = [&](double log_tau) { return std::log(sum(point(std::exp(log_tau), nu))) - std::log(h_); };
    double lo = q_ == 1.0 ? 1e-12 : -10.0;
    double hi = lo + 2.0;
    auto safe = [&](double x) {
      const double v = f(x);
      return std::isnan(v) ? kNegInf : v;
    };
    while (safe(lo) > 0.0) lo -= 4.0;
    while (safe(hi) < 0.0) {
      lo = hi;
      hi += 4.0;
      if (hi > 2000.0) throw ConvergenceError("mu_estimate: l1 multiplier not bracketed", hi);
    }
    std::uintmax_t iters = 300;
    boost::math::tools::eps_tolerance<double> tol(50);
    const auto r = boost::math::tools::toms748_solve(safe, lo, hi, tol, iters);
    return std::exp(0.5 * (r.first + r.second));
  }

  double sum_pow_N(const std::vector<double>& a) const {
    double s = 0.0;
    for (double v : a) s += std::pow(v, N_);
    return s;
  }

  struct Solution {
    std::vector<double> a;
    double tau = 0.0;
    double nu = 0.0;
  };

  Solution solve() const {
    Solution sol;
    // Unconstrained in l_N first.
    if (q_ == 1.0) {
      if (h_ <= 1.0) {
        sol.a.assign(K_ + 1, 0.0);
        sol.a[0] = h_;
        sol.tau = 1.0;
        return sol;
      }
    } else {
      sol.tau = solve_tau(0.0);
      sol.a = point(sol.tau, 0.0);
      if (sum_pow_N(sol.a) <= 1.0) return sol;
    }
    // l_N active: find nu with sum a^N = 1; the map nu -> sum a^N decreases.
    auto g = [&](double log_nu) {
      const double nu = std::exp(log_nu);
      return std::log(sum_pow_N(point(solve_tau(nu), nu)));
    };
    double lo = -10.0, hi = -6.0;
    while (g(lo) < 0.0) {
      lo -= 8.0;
      if (lo < -700.0) throw ConvergenceError("mu_estimate: l_N multiplier not bracketed", lo);
    }
    while (g(hi) > 0.0) {
      lo = hi;
      hi += 4.0;
      if (hi > 700.0) throw ConvergenceError("mu_estimate: l_N multiplier not bracketed", hi);
    }
    std::uintmax_t iters = 300;
    boost::math::tools::eps_tolerance<double> tol(50);
    const auto r = boost::math::tools::toms748_solve(g, lo, hi, tol, iters);
    sol.nu = std::exp(0.5 * (r.first + r.second));
    sol.tau = solve_tau(sol.nu);
    sol.a = point(sol.tau, sol.nu);
    return sol;
  }

  double residual(const std::vector<double>& a, double tau, double nu) const {
    double res = 0.0;
    for (std::size_t k = 0; k <= K_; ++k) {
      const double ek = std::exp(static_cast<double>(k));
      if (a[k] > 0.0) {
        const double grad = q_ * ek * std::pow(a[k], q_ - 1.0) + nu * N_ * std::pow(a[k], N_ - 1.0);
        res = std::max(res, std::abs(grad - tau) / tau);
      } else {
        const double grad0 = q_ == 1.0 ? ek : 0.0;
        res = std::max(res, std::max(0.0, tau - grad0) / tau);
      }
    }
    const double sn = sum_pow_N(a);
    res = std::max(res, std::max(0.0, sn - 1.0));
    if (nu > 0.0) res = std::max(res, std::abs(1.0 - sn));
    return res;
  }

 private:
  double h_, q_, N_;
  std::size_t K_;
};

double objective(const std::vector<double>& a, double q) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] > 0.0) s += std::exp(static_cast<double>(k) + q * std::log(a[k]));
  }
  return s;
}

double sum_pow(const std::vector<double>& a, double N) {
  double s = 0.0;
  for (double v : a) s += std::pow(v, N);
  return s;
}

void rescale_to(std::vector<double>& a, double h) {
  double s = 0.0;
  for (double v : a) s += v;
  if (s > 0.0) {
    for (double& v : a) v *= h / s;
  }
}

// Exponentiated-gradient descent on {sum a = h, a > 0} with a quadratic
// penalty on the l_N constraint, then repaired toward `anchor` (feasible)
// until sum a^N <= 1.
std::vector<double> descend(std::vector<double> a, const std::vector<double>& anchor, double h,
                            double q, double N, int iterations) {
  const std::size_t n = a.size();
  std::vector<double> grad(n);
  double rho = 10.0;
  for (int it = 0; it < iterations; ++it) {
    const double excess = std::max(0.0, sum_pow(a, N) - 1.0);
    double gmax = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double ek = std::exp(static_cast<double>(k));
      grad[k] = q * ek * std::pow(a[k], q - 1.0) + 2.0 * rho * excess * N * std::pow(a[k], N - 1.0);
      gmax = std::max(gmax, std::abs(grad[k]));
    }
    if (!(gmax > 0.0) || !std::isfinite(gmax)) break;
    const double eta = 0.5 / (1.0 + 0.05 * it);
    for (std::size_t k = 0; k < n; ++k) a[k] *= std::exp(-eta * grad[k] / gmax);
    rescale_to(a, h);
    if (it % 50 == 49) rho *= 4.0;
  }
  if (sum_pow(a, N) > 1.0) {
    double lo = 0.0, hi = 1.0;
    std::vector<double> trial(n);
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      for (std::size_t k = 0; k < n; ++k) trial[k] = (1.0 - mid) * a[k] + mid * anchor[k];
      if (sum_pow(trial, N) <= 1.0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    for (std::size_t k = 0; k < n; ++k) a[k] = (1.0 - hi) * a[k] + hi * anchor[k];
  }
  return a;
}

}  // namespace

MuResult mu_estimate(double h, double q, double N, const MuOptions& options) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("mu_estimate: h must be positive");
  if (!(q >= 1.0) || !(N > 1.0)) throw DomainError("mu_estimate: need q >= 1 and N > 1");
  const std::size_t K = options.K == 0 ? mu_truncation(h, N) : options.K;
  if (K + 1 > kMaxEntries) throw DomainError("mu_estimate: truncation too long for double range");
  if (h > std::pow(static_cast<double>(K + 1), (N - 1.0) / N)) {
    throw DomainError("mu_estimate: h is infeasible for truncation K (h > (K+1)^{(N-1)/N})");
  }
  KktSolver solver(h, q, N, K);
  auto sol = solver.solve();
  rescale_to(sol.a, h);

  MuResult out;
  out.K = K;
  out.multiplier_N = sol.nu;
  out.active_constraint = sol.nu > 0.0 ? "l1+lN" : "l1";
  out.kkt_residual = solver.residual(sol.a, sol.tau, sol.nu);

  const int starts = std::max(1, options.starts);
  std::vector<std::vector<double>> points(static_cast<std::size_t>(starts));
  std::vector<double> values(static_cast<std::size_t>(starts), kInf);
  points[0] = sol.a;
  values[0] = objective(sol.a, q);
  parallel_for(static_cast<std::size_t>(starts - 1), options.jobs, [&](std::size_t i) {
    const std::size_t s = i + 1;
    std::uint64_t state = child_seed(options.seed, s);
    std::vector<double> a(sol.a);
    for (double& v : a) {
      state = splitmix64(state);
      const double u = static_cast<double>(state >> 11) * 0x1.0p-53;
      v = std::max(v, 1e-300) * std::exp(0.5 * (2.0 * u - 1.0));
    }
    rescale_to(a, h);
    a = descend(std::move(a), sol.a, h, q, N, 300);
    const double sn = sum_pow(a, N);
    double s1 = 0.0;
    for (double v : a) s1 += v;
    if (sn <= 1.0 + 1e-10 && std::abs(s1 - h) <= 1e-10 * h) {
      points[s] = std::move(a);
      values[s] = objective(points[s], q);
    }
  });
  std::size_t best = 0;
  for (std::size_t s = 1; s < values.size(); ++s) {
    if (values[s] < values[best]) best = s;
  }
  out.best_start = static_cast<int>(best);
  out.a = points[best];
  out.mu_upper = std::pow(values[best], 1.0 / q);
  out.converged = out.kkt_residual <= 1e-6;
  return out;
}

double tail_energy(const RadialProfile& u, double R) {
  if (!(R > 0.0)) throw DomainError("tail_energy: R must be positive");
  if (u.has_jump() && u.support_radius() > R) return kInf;
  const double n = u.dim();
  const double lo = std::log(R);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double sa = std::max(u.log_radius(i), lo);
    const double sb = u.log_radius(i + 1);
    if (sb <= sa) continue;
    const double slope = (u.value(i) - u.value(i + 1)) / (u.log_radius(i + 1) - u.log_radius(i));
    sum += std::pow(slope, n) * (sb - sa);
  }
  return n * u.kappa() * sum;
}

Lemma32Report lemma32_check(const RadialProfile& u, double R, double K, double q,
                            bool require_hypotheses) {
  if (!(R > 0.0) || !(K > 0.0) || !(q >= 1.0)) throw DomainError("lemma32_check: need R > 0, K > 0, q >= 1");
  const int dim = u.dim();
  const double n = dim;
  const double kappa = u.kappa();
  const auto c = constants_from_kappa(dim, kappa);

  Lemma32Report rep;
  rep.threshold = std::pow(K / kappa, 1.0 / n) / n;
  rep.u_R = u(R);
  rep.tail_energy = tail_energy(u, R);
  rep.value_hypothesis = rep.u_R > rep.threshold;
  rep.energy_hypothesis = rep.tail_energy <= K;
  if (require_hypotheses && !rep.hypotheses()) {
    std::string why;
    if (!rep.value_hypothesis) why += " u(R) <= (1/N)(K/kappa)^{1/N};";
    if (!rep.energy_hypothesis) why += " tail energy exceeds K;";
    throw DomainError("lemma32_check: hypotheses violated:" + why);
  }

  const double scale = n * std::pow(kappa / K, 1.0 / n);
  const double log_R = std::log(R);
  const double log_supp = u.log_support_radius();
  for (int k = 0;; ++k) {
    const double s = log_R + k / n;
    rep.h.push_back(scale * u.at_log_radius(s));
    if (s > log_supp) break;
  }
  double sum_a = 0.0, sum_aN = 0.0;
  for (std::size_t k = 0; k + 1 < rep.h.size(); ++k) {
    const double ak = rep.h[k] - rep.h[k + 1];
    rep.a.push_back(ak);
    sum_a += ak;
    sum_aN += std::pow(std::abs(ak), n);
  }
  rep.a_norm_N = std::pow(sum_aN, 1.0 / n);
  rep.telescoping_residual = std::abs(sum_a - (rep.h.front() - rep.h.back()));

  rep.log_lhs = c.lambda * std::pow(K, 1.0 / (1.0 - n)) * std::pow(rep.u_R, n / (n - 1.0)) + n * log_R -
                q / (n - 1.0) * std::log(rep.u_R);
  auto log_f = [q](double v) { return v > 0.0 ? q * std::log(v) : kNegInf; };
  const auto tail = radial_integral(u, log_f, n, log_R);
  rep.log_rhs = tail.log_value - std::log(n * kappa) - q / (n - 1.0) * std::log(K);
  rep.log_constant = rep.log_lhs - rep.log_rhs;
  rep.constant = std::exp(rep.log_constant);
  return rep;
}

}  // namespace tmlab

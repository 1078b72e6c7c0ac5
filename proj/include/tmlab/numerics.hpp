#pragma once

// Small numerical building blocks shared by the modules: Gauss-Legendre
// rules, log-domain accumulation, least-squares line fits, seeded RNG
// streams and a deterministic parallel loop.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace tmlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]; rules are cached per n.
const GaussRule& gauss_legendre(int n);

/// log(sum_i exp(logs[i])); returns -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> logs);

/// Accumulates terms given by their logarithms without overflow.
class LogAccumulator {
 public:
  void add(double log_term) { logs_.push_back(log_term); }
  double log_total() const { return log_sum_exp(logs_); }
  std::size_t size() const { return logs_.size(); }

 private:
  std::vector<double> logs_;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares fit y = slope * x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// SplitMix64 step; used to derive independent child seeds from one seed.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `stream` derived from `seed`; distinct streams never share state.
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t stream);

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Each index is
/// processed exactly once; callers write results by index, so output order
/// never depends on scheduling. If several bodies throw, the exception from
/// the lowest index is rethrown.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

/// Bisection for a root of an increasing function on [lo, hi] with f(lo) <= 0 <= f(hi).
double bisect_increasing(const std::function<double(double)>& f, double lo, double hi,
                         double x_tol, int max_iter = 200);

}  // namespace tmlab

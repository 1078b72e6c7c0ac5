#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "tmlab/errors.hpp"
#include "tmlab/supsearch.hpp"

using namespace tmlab;
using doctest::Approx;

namespace {

double bowl(std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - 0.3 - 0.1 * static_cast<double>(i);
    s -= d * d;
  }
  return s;
}

}  // namespace

TEST_CASE("pattern search finds a smooth maximum") {
  SearchOptions o;
  o.budget = 3000;
  const auto r = pattern_search(bowl, 3, o);
  CHECK(r.best > -1e-6);
  CHECK(r.argmax_unit[0] == Approx(0.3).epsilon(1e-2));
  CHECK(r.argmax_unit[2] == Approx(0.5).epsilon(1e-2));
  CHECK(r.evaluations <= o.budget);
}

TEST_CASE("property: pattern search is deterministic and monotone in the budget") {
  auto f = [](std::span<const double> y) { return std::sin(7 * y[0]) * std::cos(5 * y[1]) + y[0]; };
  double prev = kNegInf;
  for (std::size_t budget : {10, 30, 100, 300, 1000}) {
    SearchOptions o;
    o.budget = budget;
    o.seed = 5;
    const auto a = pattern_search(f, 2, o);
    o.jobs = 4;
    const auto b = pattern_search(f, 2, o);
    CHECK(a.best == b.best);
    CHECK(a.argmax_unit == b.argmax_unit);
    CHECK(a.best >= prev);
    prev = a.best;
  }
}

TEST_CASE("pattern search treats failures as -inf") {
  auto f = [](std::span<const double> y) {
    if (y[0] > 0.6) throw std::runtime_error("boom");
    if (y[0] < 0.2) return std::nan("");
    return y[0];
  };
  SearchOptions o;
  o.budget = 500;
  const auto r = pattern_search(f, 1, o);
  CHECK(r.best <= 0.6);
  CHECK(r.best > 0.55);
}

TEST_CASE("bracket of the constrained identity") {
  // l = 1/4, a = b = N = 2: ((1 - l) / l)^1
  CHECK(atmc_bracket(0.25, 2, 2.0, 0.0, 2.0, 2.0) == Approx(3.0).epsilon(1e-14));
  CHECK(atmc_bracket(0.25, 2, 2.0, 1.0, 2.0, 1.0) == Approx(0.75 / 0.5).epsilon(1e-14));
  // diverges as lambda -> 0 and vanishes as lambda -> lambda_N
  CHECK(atmc_bracket(1e-8, 2, 2.0, 0.0, 2.0, 2.0) > 1e3);
  CHECK(atmc_bracket(1.0 - 1e-12, 2, 2.0, 0.0, 2.0, 2.0) < 1e-5);
}

TEST_CASE("families realize admissible profiles") {
  const auto c = constants(Gauge::euclidean(2));
  for (const auto& fam : {ProfileFamily::moser(), ProfileFamily::moser_perturbed(4), ProfileFamily::truncated_power()}) {
    for (double y0 : {0.0, 0.37, 1.0}) {
      std::vector<double> y(fam.dimension(), y0);
      const auto x = fam.from_unit(y);
      for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(x[i] >= fam.lower[i]);
        CHECK(x[i] <= fam.upper[i]);
      }
      const auto u = fam.realize(x, 0.0, c, "l2");
      CHECK_FALSE(u.is_zero());
      CHECK(u.support_radius() <= 1.0 + 1e-12);
      CHECK(std::isfinite(dirichlet_norm(u)));
    }
  }
  CHECK(family_from_string(to_string(FamilyKind::TruncatedPower)) == FamilyKind::TruncatedPower);
  CHECK_THROWS(family_from_string("nope"));
}

TEST_CASE("subcritical estimate vanishes as lambda goes to zero") {
  const auto c = constants(Gauge::euclidean(2));
  SearchOptions o;
  o.budget = 150;
  double prev = kInf;
  for (double rel : {0.5, 0.1, 0.01, 0.001}) {
    const auto e = estimate_atmsc(2, 2.0, rel * c.lambda, 0.0, c, ProfileFamily::moser(), o);
    CHECK(std::isfinite(e.log_value));
    CHECK(e.value < prev);
    prev = e.value;
  }
  // Phi(t) ~ t for q = N = 2, so the ratio tends to lambda itself
  CHECK(prev == Approx(0.001 * c.lambda).epsilon(0.05));
}

TEST_CASE("objectives are invariant under dilation of the shape") {
  const auto c = constants(Gauge::euclidean(2));
  const auto u = moser_profile(6.0, 0.0, c, "l2");
  const double l0 = atmsc_log_objective(u, 2, 2.0, 0.6 * c.lambda, 0.0);
  CHECK(atmsc_log_objective(dilate(u, 3.0), 2, 2.0, 0.6 * c.lambda, 0.0) == Approx(l0).epsilon(1e-9));
  CHECK(atmsc_log_objective(u.scaled(2.0), 2, 2.0, 0.6 * c.lambda, 0.0) == Approx(l0).epsilon(1e-9));
  const double a0 = atmc_log_objective(u, 2, 2.0, 0.0, 2.0, 2.0, 0.4, c.lambda);
  CHECK(atmc_log_objective(dilate(u, 0.2), 2, 2.0, 0.0, 2.0, 2.0, 0.4, c.lambda) == Approx(a0).epsilon(1e-9));
}

TEST_CASE("growth detection") {
  std::vector<double> n{4, 8, 16, 32, 64, 128};
  std::vector<double> flat, grow;
  for (double x : n) {
    flat.push_back(1.0 + 0.01 / x);
    grow.push_back(0.5 * std::log(x));
  }
  double slope = 0.0, r2 = 0.0;
  CHECK_FALSE(detect_divergence(n, flat, &slope, &r2));
  CHECK(detect_divergence(n, grow, &slope, &r2));
  CHECK(slope == Approx(0.5));
  CHECK(r2 == Approx(1.0));
}

TEST_CASE("sharpness sweep at the critical exponent") {
  const auto c = constants(Gauge::euclidean(2));
  TMParams p;
  p.lambda = c.lambda;
  std::vector<double> n{4, 8, 16, 32, 64, 128, 256};
  for (double pexp : {2.0, 3.0}) {
    p.p = pexp;
    const auto rep = sharpness_sweep(Theorem::T11, p, c, "l2", n);
    CHECK(rep.predicted_exponent == Approx(pexp / 2.0));
    CHECK(std::abs(rep.fitted_exponent - rep.predicted_exponent) <= 0.1 * rep.predicted_exponent);
    CHECK(rep.points.size() == n.size());
  }
}

TEST_CASE("exact growth above the critical exponent is exponential") {
  const auto c = constants(Gauge::euclidean(2));
  TMParams p;
  p.lambda = 1.2 * c.lambda;
  std::vector<double> n{4, 8, 16, 32, 64};
  const auto rep = sharpness_sweep(Theorem::T14, p, c, "l2", n);
  CHECK(rep.fit_mode == "log-linear");
  CHECK(rep.fitted_exponent == Approx(0.2).epsilon(0.1));
}

TEST_CASE("constrained supremum diverges past b = N") {
  const auto c = constants(Gauge::euclidean(2));
  std::vector<double> n{8, 16, 32, 64, 128, 256, 512, 1024};
  CHECK(atmc_moser_growth(2, 2.0, 0.0, 2.0, 3.0, c, n).divergent);
  CHECK_FALSE(atmc_moser_growth(2, 2.0, 0.0, 2.0, 2.0, c, n).divergent);
}

TEST_CASE("property: symmetrization and scaling identities on random profiles") {
  const auto g = Gauge::pnorm(2, 4);
  const auto c = constants(g);
  TMParams p;
  p.lambda = 0.7 * c.lambda;
  p.beta = 0.5;
  p.k = 3.0;
  for (std::uint64_t s = 0; s < 8; ++s) {
    const auto u = random_profile(2, c.kappa, g.describe(), s);
    const auto sym = symmetrization_identity(u, p, TMVariant::Phi);
    CHECK(sym.dirichlet_reldiff <= 1e-10);
    CHECK(sym.integral_reldiff <= 1e-10);
    const auto unit = u.scaled(1.0 / dirichlet_norm(u));
    const auto v = unit.scaled(0.999 * solve_scale(lq_norm(unit, p.q), p.a, 2));
    const auto e = scaling_equivalence(v, p);
    CHECK(e.ratio_reldiff <= 1e-6);
    CHECK(e.integral_reldiff <= 1e-6);
    CHECK(e.constraint_reldiff <= 1e-6);
    CHECK(e.roundtrip_reldiff <= 1e-6);
  }
}

TEST_CASE("random profiles are reproducible") {
  const auto a = random_profile(3, 4.0, "x", 42);
  const auto b = random_profile(3, 4.0, "x", 42);
  const auto d = random_profile(3, 4.0, "x", 43);
  CHECK(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.value(i) == b.value(i));
  CHECK(lq_norm(a, 2.0) != lq_norm(d, 2.0));
}

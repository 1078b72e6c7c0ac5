#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tmlab/errors.hpp"
#include "tmlab/finsler.hpp"

using namespace tmlab;
using doctest::Approx;

namespace {

Eigen::MatrixXd diag2(double a, double b) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

std::vector<Gauge> catalogue() {
  Eigen::MatrixXd a3(3, 3);
  a3 << 2, 0.3, 0, 0.3, 1, 0.1, 0, 0.1, 0.5;
  Eigen::MatrixXd a2(2, 2);
  a2 << 4, 1, 1, 1;
  return {Gauge::euclidean(2), Gauge::pnorm(2, 4), Gauge::pnorm(2, 16), Gauge::ellipsoid(a2),
          Gauge::euclidean(3), Gauge::pnorm(3, 4), Gauge::pnorm(3, 16), Gauge::ellipsoid(a3)};
}

Vec random_vector(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> nd;
  Vec v(dim);
  for (double& x : v) x = nd(rng);
  return v;
}

}  // namespace

TEST_CASE("gauge values") {
  const double v34[] = {3, 4};
  CHECK(Gauge::euclidean(2).eval(v34) == Approx(5.0));
  const double zero[] = {0, 0};
  for (const auto& g : {Gauge::euclidean(2), Gauge::pnorm(2, 4), Gauge::ellipsoid(diag2(4, 1))}) {
    CHECK(g.eval(zero) == 0.0);
  }
  const double ones[] = {1, 1};
  CHECK(Gauge::pnorm(2, 4).eval(ones) == Approx(std::pow(2.0, 0.25)).epsilon(1e-14));
  CHECK(Gauge::pnorm(2, 4).eval(ones) == Approx(1.18921).epsilon(1e-5));
}

TEST_CASE("dimension mismatch is rejected") {
  const double v[] = {1, 2, 3};
  CHECK_THROWS_AS(Gauge::euclidean(2).eval(v), DomainError);
  CHECK_THROWS_AS(Gauge::euclidean(2).polar(v), DomainError);
}

TEST_CASE("polar gauges") {
  const double x[] = {1, -2};
  CHECK(Gauge::pnorm(2, 1).polar(x) == Approx(2.0));
  CHECK(Gauge::euclidean(2).polar(x) == Approx(std::sqrt(5.0)));
  const double e1[] = {1, 0};
  CHECK(Gauge::ellipsoid(diag2(4, 1)).polar(e1) == Approx(0.5));
}

TEST_CASE("gauge gradients") {
  const double v34[] = {3, 4};
  const auto g = Gauge::euclidean(2).grad(v34);
  CHECK(g[0] == Approx(0.6));
  CHECK(g[1] == Approx(0.8));
  const double ones[] = {1, 1};
  const auto g4 = Gauge::pnorm(2, 4).grad(ones);
  CHECK(g4[0] == Approx(std::pow(2.0, -0.75)).epsilon(1e-14));
  CHECK(g4[1] == Approx(std::pow(2.0, -0.75)).epsilon(1e-14));
  const double zero[] = {0, 0};
  CHECK_THROWS_AS(Gauge::euclidean(2).grad(zero), DomainError);
}

TEST_CASE("Wulff volumes") {
  CHECK(wulff_volume(Gauge::euclidean(2)) == Approx(std::numbers::pi).epsilon(1e-3 / std::numbers::pi));
  // The polar of the max norm is l1, whose unit ball has area 2.
  CHECK(std::abs(wulff_volume(Gauge::pnorm(2, INFINITY)) - 2.0) <= 1e-3);
  CHECK(std::abs(wulff_volume(Gauge::ellipsoid(diag2(4, 1))) - 2.0 * std::numbers::pi) <= 1e-2);
  for (const auto& g : catalogue()) {
    CAPTURE(g.describe());
    CHECK(wulff_volume(g) == Approx(*g.wulff_volume_closed_form()).epsilon(1e-4));
  }
}

TEST_CASE("gauge constants") {
  const auto c2 = constants(Gauge::euclidean(2));
  CHECK(c2.lambda == Approx(4 * std::numbers::pi));
  CHECK(c2.alpha == Approx(4 * std::numbers::pi));
  CHECK(c2.gamma == Approx(1.0));
  const auto ci = constants(Gauge::pnorm(2, INFINITY));
  CHECK(ci.lambda == Approx(8.0).epsilon(1e-6));
  CHECK(ci.gamma == Approx(0.79788).epsilon(1e-5));
  const auto c3 = constants(Gauge::euclidean(3));
  CHECK(c3.lambda == Approx(c3.alpha).epsilon(1e-9));
  CHECK(c3.kappa == Approx(4.0 / 3.0 * std::numbers::pi).epsilon(1e-9));
}

TEST_CASE("property: homogeneity, positivity, triangle inequality, bi-Lipschitz bounds") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ut(-5, 5);
  for (const auto& g : catalogue()) {
    CAPTURE(g.describe());
    const auto b = g.lipschitz_bounds();
    for (int i = 0; i < 100; ++i) {
      const Vec xi = random_vector(rng, g.dim());
      const double t = ut(rng);
      Vec s(xi);
      for (double& v : s) v *= t;
      CHECK(std::abs(g.eval(s) - std::abs(t) * g.eval(xi)) <= 1e-10 * std::abs(t) * g.eval(xi));
      CHECK(g.eval(xi) > 0.0);
      const Vec y = random_vector(rng, g.dim());
      Vec sum(xi);
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += y[k];
      CHECK(g.eval(sum) <= (g.eval(xi) + g.eval(y)) * (1 + 1e-12));
    }
    for (int i = 0; i < 1000; ++i) {
      Vec d = random_vector(rng, g.dim());
      const double n = norm2(d);
      for (double& v : d) v /= n;
      CHECK(g.eval(d) >= b.lower * (1 - 1e-12));
      CHECK(g.eval(d) <= b.upper * (1 + 1e-12));
    }
  }
}

TEST_CASE("property: Euler identity and polar-gradient identities") {
  std::mt19937_64 rng(12);
  for (const auto& g : catalogue()) {
    CAPTURE(g.describe());
    for (int i = 0; i < 50; ++i) {
      const Vec xi = random_vector(rng, g.dim());
      const Vec gr = g.grad(xi);
      double dot = 0.0;
      for (std::size_t k = 0; k < xi.size(); ++k) dot += xi[k] * gr[k];
      CHECK(std::abs(dot - g.eval(xi)) <= 1e-6 * g.eval(xi));
      CHECK(std::abs(g.polar(gr) - 1.0) <= 1e-5);
      CHECK(std::abs(g.eval(g.grad_polar(xi)) - 1.0) <= 1e-5);
    }
  }
}

TEST_CASE("property: polar of the polar returns the gauge for p-norms") {
  std::mt19937_64 rng(13);
  for (double p : {2.0, 4.0, 16.0}) {
    for (int dim : {2, 3}) {
      const auto g = Gauge::pnorm(dim, p);
      const auto dual = Gauge::generic(dim, [g](std::span<const double> x) { return g.polar(x); }, "dual");
      for (int i = 0; i < 10; ++i) {
        const Vec xi = random_vector(rng, dim);
        CHECK(dual.polar(xi) == Approx(g.eval(xi)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("property: coarea constant") {
  for (const auto& g : catalogue()) {
    CAPTURE(g.describe());
    const auto c = constants(g);
    for (double r : {0.3, 1.0, 2.5}) {
      CHECK(coarea_integral(g, r) == Approx(g.dim() * c.kappa * std::pow(r, g.dim() - 1)).epsilon(1e-3));
    }
  }
}

TEST_CASE("generic gauges match the closed forms they sample") {
  const auto l4 = Gauge::pnorm(2, 4);
  const auto gen = Gauge::generic(2, [l4](std::span<const double> x) { return l4.eval(x); }, "l4");
  std::mt19937_64 rng(14);
  for (int i = 0; i < 20; ++i) {
    const Vec x = random_vector(rng, 2);
    CHECK(gen.polar(x) == Approx(l4.polar(x)).epsilon(1e-8));
    const auto a = gen.grad(x), b = l4.grad(x);
    CHECK(a[0] == Approx(b[0]).epsilon(1e-6));
    CHECK(a[1] == Approx(b[1]).epsilon(1e-6));
  }
  CHECK(wulff_volume(gen) == Approx(*l4.wulff_volume_closed_form()).epsilon(1e-4));
}

TEST_CASE("radial_2d gauges") {
  const auto circle = Gauge::radial_2d(std::vector<double>(16, 1.0));
  CHECK(wulff_volume(circle) == Approx(std::numbers::pi).epsilon(1e-6));
  const double x[] = {0.3, -0.4};
  CHECK(circle.eval(x) == Approx(0.5).epsilon(1e-9));
  CHECK_THROWS_AS(Gauge::radial_2d({1.0, 2.0, 1.0}), DomainError);
  CHECK_THROWS_AS(Gauge::radial_2d({1.0, 2.0, 1.0, 3.0}), DomainError);
}

TEST_CASE("gauge specs round-trip through JSON") {
  for (const auto& g : catalogue()) {
    const auto back = Gauge::from_json(g.to_json());
    CHECK(back.describe() == g.describe());
  }
  CHECK_THROWS_AS(Gauge::from_json({{"form", "banana"}}), ConfigError);
  CHECK_THROWS_AS(Gauge::from_json({{"form", "pnorm"}, {"N", 2}, {"p", 0.5}}), ConfigError);
  CHECK_THROWS_AS(Gauge::from_json({{"form", "ellipsoid"}, {"A", {{1, 2}, {2, 1}}}}), ConfigError);
  const auto inf = Gauge::from_json({{"form", "pnorm"}, {"N", 2}, {"p", "inf"}});
  const double v[] = {1, -3};
  CHECK(inf.eval(v) == 3.0);
}

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>

#include "lrucluster/quadrature.hpp"

using namespace lrucluster;

TEST_CASE("gauss-kronrod integrates smooth functions") {
  auto r = integrate([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-13, 1e-15, 100);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(std::numbers::e - 1.0).epsilon(1e-14));
  CHECK(r.error < 1e-12);

  r = integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-10, 1e-14, 400);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0 / 3.0).epsilon(1e-10));

  r = integrate([](double x) { return x * x * x; }, -1.0, 2.0, QuadratureConfig{});
  CHECK(r.value == doctest::Approx(3.75).epsilon(1e-14));
}

TEST_CASE("empty and reversed intervals integrate to zero") {
  auto r = integrate([](double) { return 1.0; }, 1.0, 1.0, 1e-10, 1e-12, 10);
  CHECK(r.value == 0.0);
  r = integrate([](double) { return 1.0; }, 2.0, 1.0, 1e-10, 1e-12, 10);
  CHECK(r.value == 0.0);
}

TEST_CASE("exhausted subdivisions are reported") {
  auto r = integrate([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, 1e-14, 1e-16, 3);
  CHECK_FALSE(r.converged);
  CHECK_THROWS_AS(require_converged(r, "test"), ToleranceNotMet);
}

TEST_CASE("piecewise integration across a kink") {
  auto f = [](double x) { return std::abs(x - 0.3); };
  auto r = integrate_pieces(f, {0.3}, 0.0, 1.0, 1e-13, 1e-15, 10);
  CHECK(r.value == doctest::Approx(0.045 + 0.245).epsilon(1e-14));
}

TEST_CASE("quadrature config validation") {
  QuadratureConfig q;
  CHECK_NOTHROW(q.validate());
  q.tail_mass_cut = 1e-6;
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
  q = {};
  q.rel_tol = 0.0;
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
  q = {};
  q.max_depth = 0;
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

TEST_CASE("monotone root finding") {
  auto g = [](double t) { return t * t * t + t; };
  const double root = solve_increasing(g, 10.0, 0.1, 1e-12);
  CHECK(std::abs(g(root) - 10.0) <= 1e-12);
  CHECK(solve_increasing(g, 0.0, 1.0, 1e-12) == 0.0);
  CHECK_THROWS_AS(solve_increasing(g, -1.0, 1.0, 1e-12), std::domain_error);
  CHECK_THROWS_AS(solve_increasing([](double) { return 0.0; }, 1.0, 1.0, 1e-12, 10),
                  std::runtime_error);
  // a flat stretch still lands within the value tolerance
  auto step = [](double t) { return t < 1.0 ? t : (t < 2.0 ? 1.0 : t - 1.0); };
  const double s = solve_increasing(step, 1.5, 0.5, 1e-10);
  CHECK(std::abs(step(s) - 1.5) <= 1e-10);
}

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "lrucluster/laws.hpp"
#include "lrucluster/rng.hpp"

using namespace lrucluster;

TEST_CASE("lomax parameters are validated") {
  CHECK_THROWS_AS(LomaxParams(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(LomaxParams(0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(LomaxParams(1.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(LomaxParams(1.5, -2.0), std::invalid_argument);
  CHECK_NOTHROW(LomaxParams(1.0001, 1e-9));
}

TEST_CASE("lomax closed forms") {
  const LomaxParams rho(1.9, 22.5);
  const LomaxParams life(1.7, 0.07);
  CHECK(rho.mean() == doctest::Approx(25.0).epsilon(1e-15));
  CHECK(life.mean() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(life.cdf(0.1) == doctest::Approx(0.7787396975652879).epsilon(1e-14));
  CHECK(life.survival(0.0) == 1.0);
  CHECK(life.quantile(life.cdf(0.3)) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(life.survival(life.upper_quantile(1e-9)) == doctest::Approx(1e-9).epsilon(1e-9));
  CHECK(life.upper_quantile(1e-9) == doctest::Approx(13778.86613100628).epsilon(1e-12));
  // E[(X - t)^+] and E[X 1{X > x}] against direct quadrature-free identities
  CHECK(life.mean_excess(0.0) == doctest::Approx(life.mean()).epsilon(1e-15));
  CHECK(life.partial_mean_above(0.0) == doctest::Approx(life.mean()).epsilon(1e-15));
  const double x = 0.4;
  CHECK(life.partial_mean_above(x) ==
        doctest::Approx(x * life.survival(x) + life.mean_excess(x)).epsilon(1e-15));
}

TEST_CASE("inverse transform maps zero to zero") {
  const LomaxParams p(1.9, 22.5);
  CHECK(p.from_uniform(0.0) == 0.0);
  CHECK(p.from_uniform(0.5) == doctest::Approx(p.quantile(0.5)).epsilon(1e-14));
}

TEST_CASE("lomax sample mean matches sigma / (alpha - 1)") {
  const LomaxParams p(1.9, 22.5);
  Rng rng(20240611);
  const int n = 1'000'000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_lomax(p, rng);
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double stderr_ = std::sqrt((sum_sq / n - mean * mean) / n);
  CHECK(std::abs(mean - 25.0) <= 3.0 * stderr_);
}

TEST_CASE("lomax empirical cdf") {
  const LomaxParams p(1.7, 0.07);
  Rng rng(7);
  const int n = 1'000'000;
  int below = 0;
  for (int i = 0; i < n; ++i) below += sample_lomax(p, rng) <= 0.1;
  const double target = 1.0 - std::pow(0.07 / 0.17, 1.7);
  const double se = std::sqrt(target * (1 - target) / n);
  CHECK(std::abs(static_cast<double>(below) / n - target) <= 4.0 * se);
}

TEST_CASE("point-mass marks") {
  CHECK_THROWS_AS(MarkLaw::point(0.0), std::invalid_argument);
  const MarkLaw m = MarkLaw::point(2.0);
  Rng rng(1);
  CHECK(m.is_point());
  CHECK(m.sample(rng) == 2.0);
  CHECK(m.mean() == 2.0);
  CHECK(m.survival(1.9) == 1.0);
  CHECK(m.survival(2.0) == 0.0);
  CHECK(m.mean_excess(0.5) == doctest::Approx(1.5));
  CHECK(m.mean_excess(3.0) == 0.0);
  const MarkLaw l = LomaxParams(1.7, 0.07);
  CHECK_FALSE(l.is_point());
  CHECK(l.mean() == doctest::Approx(0.1));
}

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a = Rng::stream(42, 3);
  Rng b = Rng::stream(42, 3);
  Rng c = Rng::stream(42, 4);
  for (int i = 0; i < 10; ++i) {
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
  }
  Rng d(9);
  for (int i = 0; i < 1000; ++i) {
    const double u = d.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <sstream>

#include "lrucluster/experiment.hpp"
#include "lrucluster/oracle.hpp"

using namespace lrucluster;

TEST_CASE("running statistics") {
  RunningStats a;
  RunningStats b;
  RunningStats all;
  for (int i = 0; i < 100; ++i) {
    const double x = std::sin(i) * 3 + i * 0.01;
    (i < 37 ? a : b).push(x);
    all.push(x);
  }
  a.merge(b);
  CHECK(a.count() == 100);
  CHECK(a.mean() == doctest::Approx(all.mean()).epsilon(1e-14));
  CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
  const OracleReport r = all.report(0.0);
  CHECK(r.std_error > 0.0);
  CHECK(r.z_score == doctest::Approx(r.estimate / r.std_error));
  std::ostringstream out;
  print_report(out, "demo", r);
  CHECK(out.str().find("demo") == 0);
}

TEST_CASE("ttl miss count of one document") {
  CHECK(ttl_misses_of({}, 1.0) == 0);
  CHECK(ttl_misses_of({0.0, 0.5, 2.0, 2.1}, 1.0) == 2);
  CHECK(ttl_misses_of({0.0, 0.5, 2.0, 2.1}, 0.0) == 4);
}

TEST_CASE("monte carlo ttl misses, deterministic marks") {
  const auto model = CanonicalIntensity::box(MarkLaw::point(1.0), MarkLaw::point(1.0));
  const OracleReport r = mc_ttl_misses(model, 0.5, 1'000'000, 2024);
  CHECK(r.target == doctest::Approx(0.6967346701436833).epsilon(1e-12));
  CHECK(std::abs(r.z_score) <= 3.0);
  const OracleReport zero = mc_ttl_misses(model, 0.0, 100'000, 1);
  CHECK(std::abs(zero.estimate - 1.0) <= 4.0 * zero.std_error);
  const OracleReport huge = mc_ttl_misses(model, 1e9, 100'000, 2);
  CHECK(std::abs(huge.estimate - (1.0 - std::exp(-1.0))) <= 4.0 * huge.std_error);
  CHECK_THROWS_AS(mc_ttl_misses(model, -1.0, 1000, 1), std::invalid_argument);
  CHECK_THROWS_AS(mc_ttl_misses(model, 1.0, 999, 1), std::invalid_argument);
}

TEST_CASE("monte carlo ttl misses, lomax marks") {
  const auto model = default_box_model();
  for (double t : {0.01, 0.1, 1.0}) {
    const OracleReport r = mc_ttl_misses(model, t, 200'000, 77);
    CHECK(std::abs(r.z_score) <= 4.0);
  }
}

TEST_CASE("holding-time functional") {
  const TabulatedIntensity box({0.0, 1.0}, {1.0, 1.0});
  const QuadratureConfig q;
  CHECK(box.total() == 1.0);
  const auto one = [](double) { return 1.0; };
  const Integral gaps = holding_time_functional(one, box, q);
  const double expected_gaps = 1.0 - (1.0 - std::exp(-1.0));
  CHECK(gaps.value == doctest::Approx(expected_gaps).epsilon(1e-10));

  const double t = 0.5;
  const auto long_gap = [t](double w) { return w > t ? 1.0 : 0.0; };
  const Integral longer = holding_time_functional(long_gap, box, q, {t});
  CHECK(longer.value ==
        doctest::Approx(0.6967346701436833 - (1.0 - std::exp(-1.0))).epsilon(1e-10));

  CHECK(holding_time_functional([](double) { return 0.0; }, box, q).value == 0.0);

  // a triangular intensity with total mass 3
  const TabulatedIntensity tri({0.0, 0.5, 2.0}, {0.0, 3.0, 0.0});
  CHECK(tri.total() == doctest::Approx(3.0));
  const Integral tri_gaps = holding_time_functional(one, tri, q);
  CHECK(tri_gaps.value == doctest::Approx(3.0 - (1.0 - std::exp(-3.0))).epsilon(1e-9));

  const auto sq = [](double w) { return w * w; };
  const std::vector<std::tuple<std::function<double(double)>, const TabulatedIntensity*, double>>
      cases = {{one, &box, gaps.value},
               {long_gap, &box, longer.value},
               {one, &tri, tri_gaps.value},
               {sq, &tri, holding_time_functional(sq, tri, q).value}};
  std::uint64_t seed = 50;
  for (const auto& [fn, intensity, target] : cases) {
    const OracleReport r = mc_holding_time_functional(fn, *intensity, 200'000, ++seed, target);
    CHECK(std::abs(r.z_score) <= 3.0);
  }
  CHECK_THROWS_AS(TabulatedIntensity({0.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(TabulatedIntensity({0.0, 1.0}, {1.0, -1.0}), std::invalid_argument);
}

TEST_CASE("kolmogorov-smirnov helpers") {
  CHECK(kolmogorov_p_value(0.0, 100) == 1.0);
  // critical value 1.628 / sqrt(n) is the asymptotic 1% point
  CHECK(kolmogorov_p_value(1.628 / std::sqrt(1e6), 1'000'000) == doctest::Approx(0.01).epsilon(0.05));
  Rng rng(3);
  std::vector<double> u(5000);
  for (auto& x : u) x = rng.uniform();
  const double d = ks_statistic(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(kolmogorov_p_value(d, u.size()) > 0.01);
  std::vector<double> shifted(u);
  for (auto& x : shifted) x = std::min(1.0, x + 0.05);
  const double d2 = ks_statistic(shifted, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(kolmogorov_p_value(d2, u.size()) < 1e-6);
}

TEST_CASE("exit-time law") {
  const auto model = default_box_model();
  const ExitTimeReport one = mc_exit_time_law(50.0, model, 1, 0.0, 4000, 7);
  CHECK(one.p_value >= 0.01);
  CHECK_FALSE(one.excessive_censoring);

  const ExitTimeReport five = mc_exit_time_law(50.0, model, 5, 0.0, 10'000, 8);
  CHECK(five.n_samples + five.n_censored == 10'000);
  CHECK_FALSE(five.excessive_censoring);
  CHECK(five.p_value >= 0.01);

  for (double s : {10.0, 50.0}) {
    const ExitTimeReport shifted = mc_exit_time_law(50.0, model, 5, s, 4000, 9);
    CHECK(shifted.p_value >= 0.01);
  }
}

TEST_CASE("distinct-document counts follow M") {
  const auto model = default_box_model();
  const auto reports = mc_distinct_documents(100.0, model, {0.05, 0.2}, 10, 200, 3);
  REQUIRE(reports.size() == 2);
  for (const auto& r : reports) CHECK(std::abs(r.z_score) <= 4.0);
  CHECK_THROWS_AS(mc_distinct_documents(100.0, model, {}, 1, 1, 1), std::invalid_argument);
}

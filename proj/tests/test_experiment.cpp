#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <sstream>

#include "lrucluster/experiment.hpp"

using namespace lrucluster;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return ExperimentConfig::parse(in);
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse(
      "# comment line\n"
      "gamma_list = 50, 500\n"
      "capacity_list = 1..3, 8   # trailing comment\n"
      "replications = 4\n"
      "seed = 99\n"
      "sim_time = auto\n"
      "sim_time_cap = 1234.5\n"
      "rel_tol = 1e-8\n"
      "with_exact = false\n");
  CHECK(c.gamma_list == std::vector<double>{50.0, 500.0});
  CHECK(c.capacity_list == std::vector<std::size_t>{1, 2, 3, 8});
  CHECK(c.replications == 4);
  CHECK(c.seed == 99);
  CHECK_FALSE(c.sim_time.has_value());
  CHECK(c.sim_time_cap == 1234.5);
  CHECK(c.quadrature.rel_tol == 1e-8);
  CHECK_FALSE(c.with_exact);
  CHECK_NOTHROW(c.validate());
  CHECK(c.model.kind == IntensityKind::Box);
  CHECK(c.model.mean_requests() == doctest::Approx(2.5));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("gamma_list\n"), ConfigError);
  CHECK_THROWS_AS(parse("replications = -3\n"), ConfigError);
  CHECK_THROWS_AS(parse("rho_alpha = 0.9\n"), ConfigError);
  CHECK_THROWS_AS(parse("model = fifo\n"), ConfigError);
  CHECK_THROWS_AS(parse("gamma_list = 1\ncapacity_list = 3..1\n"), ConfigError);
  CHECK_THROWS_AS(parse("gamma_list = 5\n").validate(), ConfigError);  // no sweep axis
  CHECK_THROWS_AS(parse("gamma_list = 5\ncapacity_list = 1\ntheta_list = 0.1\n").validate(),
                  ConfigError);
  CHECK_THROWS_AS(parse("capacity_list = 1\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse("gamma_list = 5\ncapacity_list = 1\nreplications = 0\n").validate(),
                  ConfigError);
  CHECK_THROWS_AS(parse("gamma_list = 5\ncapacity_list = 0\n").validate(), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_file("/nonexistent/config.txt"), ConfigError);
}

TEST_CASE("model keys") {
  const ExperimentConfig c = parse("rho_point = 2\nlifespan_point = 3\n");
  CHECK(c.model.rho_law.is_point());
  CHECK(c.model.mean_requests() == 6.0);
  const ExperimentConfig s = parse("model = scale_family\nlifespan_alpha = 2.5\nlifespan_sigma = 0.3\n");
  CHECK(s.model.kind == IntensityKind::ScaleFamily);
  CHECK(s.model.shape.has_value());
  CHECK(s.model.lifespan_law.mean() == doctest::Approx(0.2));
}

TEST_CASE("theta axis derives capacities") {
  const ExperimentConfig c = parse("gamma_list = 500\ntheta_list = 0.01, 0.0375, 0.25\n");
  CHECK(c.capacities_for(500.0) == std::vector<std::size_t>{5, 19, 125});
  for (auto cap : c.capacities_for(500.0)) {
    CHECK(static_cast<double>(cap) / 500.0 == doctest::Approx(cap * 0.002));
  }
  CHECK_THROWS_AS(c.capacities_for(1.0), ConfigError);
}

TEST_CASE("stable-law constant") {
  CHECK(stable_law_constant(LomaxParams(1.7, 0.07)) == doctest::Approx(0.1537006161662943).epsilon(1e-12));
  CHECK_THROWS_AS(stable_law_constant(LomaxParams(2.5, 0.07)), std::invalid_argument);
}

TEST_CASE("simulation-time sizing") {
  const auto model = default_box_model();
  const SimTimeSizing at50 = size_simulation_time(model, 50.0);
  // n = (K 10^3)^(alpha / (alpha - 1)) = 204408.008..., mu0 = 0.39157924...
  CHECK(at50.stable_term == doctest::Approx(10440.186150205593).epsilon(1e-8));
  CHECK(at50.coverage_term == doctest::Approx(137788.6613100628).epsilon(1e-12));
  CHECK(at50.value == at50.coverage_term);

  const SimTimeSizing at1 = size_simulation_time(model, 1.0);
  const SimTimeSizing at2 = size_simulation_time(model, 2.0);
  CHECK(at1.value == at1.stable_term);
  CHECK(at2.value == at2.stable_term);
  CHECK(at2.value == doctest::Approx(at1.value / 2).epsilon(1e-14));

  CHECK(size_simulation_time(model, 1.0, 1e-2).value < at1.value);

  const auto light = CanonicalIntensity::box(MarkLaw::lomax(1.9, 22.5), MarkLaw::lomax(2.5, 0.15));
  CHECK_THROWS_AS(size_simulation_time(light, 50.0), std::invalid_argument);
  const auto det = CanonicalIntensity::box(MarkLaw::point(1.0), MarkLaw::point(1.0));
  CHECK_THROWS_AS(size_simulation_time(det, 50.0), std::invalid_argument);
}

TEST_CASE("sweep rows and determinism") {
  ExperimentConfig c = parse(
      "gamma_list = 20, 40\n"
      "capacity_list = 1..3\n"
      "replications = 2\n"
      "sim_time = 200\n"
      "seed = 5\n");
  const auto rows = run_sweep(c);
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK(r.error.empty());
    CHECK(r.n_reps == 2);
    CHECK(r.sim_time == 200.0);
    CHECK(r.theta == doctest::Approx(r.capacity / r.gamma));
    CHECK((r.emp_hit > 0.0 && r.emp_hit < 1.0));
    CHECK(r.exact_hit.has_value());
  }
  CHECK(rows[0].gamma == 20.0);
  CHECK(rows[0].capacity == 1);
  CHECK(rows[5].gamma == 40.0);

  c.replications = 1;
  std::ostringstream a;
  std::ostringstream b;
  write_sweep_csv(run_sweep(c), a);
  c.threads = 3;
  write_sweep_csv(run_sweep(c), b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("gamma,C,theta,emp_hit,emp_stderr,zero_hit,first_hit,exact_hit,char_time,"
                      "e_term,n_reps,sim_time\n",
                      0) == 0);

  c.capacity_list.clear();
  CHECK_THROWS_AS(run_sweep(c), ConfigError);
}

TEST_CASE("csv writers") {
  std::ostringstream est;
  Estimate e;
  e.gamma = 50;
  e.capacity = 5;
  write_estimate_csv({e}, est);
  CHECK(est.str().rfind("gamma,C,theta,char_time,m_char,e_term,zero_order_hit,first_order_hit,exact_hit\n", 0) == 0);
  std::ostringstream stats;
  SimStats s;
  s.total_requests = 10;
  s.misses = 4;
  write_stats_csv({{3, s}}, stats);
  CHECK(stats.str() == "capacity,total_requests,misses,hit_ratio\n3,10,4,0.6\n");
}

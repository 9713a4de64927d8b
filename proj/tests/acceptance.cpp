// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: acceptance [--only N]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "lrucluster/analytics.hpp"
#include "lrucluster/cache.hpp"
#include "lrucluster/experiment.hpp"
#include "lrucluster/oracle.hpp"
#include "lrucluster/traffic.hpp"

using namespace lrucluster;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

Outcome closed_forms() {
  const BoxModelSpec unit{MarkLaw::point(1.0), MarkLaw::point(1.0)};
  const QuadratureConfig q;
  const double m_ref = 1.0 - 0.5 * std::exp(-0.5);
  const double big_ref = 2.0 / std::exp(1.0);
  const double d_pointwise = std::abs(box_ttl_misses(0.5, 1.0, 1.0) - m_ref);
  const double d_m = std::abs(ttl_misses(0.5, unit, q).value - m_ref);
  const double d_big = std::abs(cumulative_ttl_misses(1.0, unit, q).value - big_ref);
  const bool ok = d_pointwise <= 1e-10 && d_m <= 1e-10 && d_big <= 1e-10;
  return {ok, fmt("|m(0.5) - (1 - 0.5e^-0.5)| = %.1e (pointwise %.1e), |M(1) - 2/e| = %.1e", d_m,
                  d_pointwise, d_big)};
}

Outcome gamma_facts() {
  bool ok = true;
  double worst = 0.0;
  for (double c : {2.0, 10.0, 100.0}) {
    const double rel = std::abs(gamma_central_moment(c, 2) * c - 1.0);
    worst = std::max(worst, rel);
    ok = ok && rel <= 4 * std::numeric_limits<double>::epsilon();
  }
  std::string detail = fmt("max |C mu2 - 1| = %.1e;", worst);
  Rng rng(8128);
  for (double c : {10.0, 100.0}) {
    std::gamma_distribution<double> g(c, 1.0);
    std::vector<double> xs(1'000'000);
    for (auto& x : xs) x = g(rng) / c;
    for (double eta : {0.2, 0.5}) {
      std::size_t n = 0;
      for (double x : xs) n += std::abs(x - 1.0) >= eta;
      const double freq = static_cast<double>(n) / static_cast<double>(xs.size());
      const double bound = gamma_tail_bound(c, eta);
      ok = ok && freq <= bound;
      detail += fmt(" (C=%g, eta=%g) freq %.3g <= bound %.3g;", c, eta, freq, bound);
    }
  }
  return {ok, detail};
}

Outcome distinct_documents() {
  const auto reports =
      mc_distinct_documents(100.0, default_box_model(), {0.05, 0.1, 0.2}, 50, 1000, 31337);
  bool ok = true;
  std::string detail;
  const double ts[] = {0.05, 0.1, 0.2};
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const double rel = std::abs(r.estimate - r.target) / r.target;
    ok = ok && rel <= 0.02;
    detail += fmt(" t=%g: X/gamma %.5f vs M %.5f (rel %.2e, se %.1e);", ts[i], r.estimate, r.target,
                  rel, r.std_error);
  }
  return {ok, detail};
}

Outcome oracle_agreement() {
  bool ok = true;
  std::string detail;
  for (double t : {0.01, 0.1, 1.0}) {
    const OracleReport r = mc_ttl_misses(default_box_model(), t, 1'000'000, 4242);
    ok = ok && std::abs(r.z_score) <= 4.0;
    detail += fmt(" t=%g: MC %.5f vs m %.5f, z %+.2f;", t, r.estimate, r.target, r.z_score);
  }
  return {ok, detail};
}

ExperimentConfig sweep_config(double gamma, std::size_t reps, double cap, std::uint64_t seed) {
  ExperimentConfig c;
  c.gamma_list = {gamma};
  c.replications = reps;
  c.sim_time_cap = cap;
  c.seed = seed;
  c.with_exact = true;
  return c;
}

Outcome zero_order_sweep() {
  ExperimentConfig c = sweep_config(500.0, 20, 4000.0, 500);
  for (int i = 0; i < 10; ++i) c.theta_list.push_back(0.01 + 0.24 * i / 9.0);
  const auto rows = run_sweep(c);
  double worst = 0.0;
  bool ok = rows.size() == 10;
  for (const auto& r : rows) {
    ok = ok && r.error.empty();
    worst = std::max(worst, std::abs(r.emp_hit - r.zero_hit));
  }
  ok = ok && worst <= 0.02;
  return {ok, fmt("gamma=500, %zu theta points, S=%.0f: max |emp - zero| = %.4f", rows.size(),
                  rows.empty() ? 0.0 : rows.front().sim_time, worst)};
}

Outcome first_order_sweep() {
  ExperimentConfig c = sweep_config(50.0, 50, 20000.0, 50);
  for (std::size_t cap = 1; cap <= 10; ++cap) c.capacity_list.push_back(cap);
  const auto rows = run_sweep(c);
  int better = 0;
  double max_zero = 0.0;
  double max_first = 0.0;
  bool ok = rows.size() == 10;
  for (const auto& r : rows) {
    ok = ok && r.error.empty();
    const double ez = std::abs(r.zero_hit - r.emp_hit);
    const double ef = std::abs(r.first_hit - r.emp_hit);
    better += ef <= ez;
    max_zero = std::max(max_zero, ez);
    max_first = std::max(max_first, ef);
  }
  ok = ok && better >= 8 && max_first < max_zero;
  return {ok, fmt("gamma=50, C=1..10, S=%.0f: first-order no worse on %d/10, max error %.4f "
                  "(first) vs %.4f (zero)",
                  rows.empty() ? 0.0 : rows.front().sim_time, better, max_first, max_zero)};
}

Outcome first_order_limit() {
  const MissModel model(BoxModelSpec{MarkLaw::lomax(1.9, 22.5), MarkLaw::lomax(1.7, 0.07)});
  const double theta = 0.1;
  const double t = characteristic_time(theta, model);
  const double m = model.m(t).value;
  const double e = first_order_term(t, theta, model);
  std::string detail = fmt("e(t_theta) = %.6f;", e);
  double deviation = 0.0;
  for (std::size_t c : {64, 128, 256, 512}) {
    const double exact = expected_lru_misses(c, static_cast<double>(c) / theta, model).value;
    const double scaled = static_cast<double>(c) * (exact - m);
    deviation = std::abs(scaled - e) / std::abs(e);
    detail += fmt(" C=%zu: %.6f;", c, scaled);
  }
  detail += fmt(" relative deviation at 512 = %.2e", deviation);
  return {deviation <= 0.10, detail};
}

Outcome lru_structure() {
  bool ok = true;
  std::uint64_t requests = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const RequestTrace trace = generate_trace(20.0, default_box_model(), {0.0, 50.0}, 9000 + seed);
    std::unordered_set<DocId> docs;
    for (const auto& ev : trace.events) docs.insert(ev.doc);
    requests += trace.events.size();
    std::uint64_t previous = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t c = 1; c <= 20; ++c) {
      const SimStats s = lru_process(trace, c, true);
      ok = ok && s.misses <= previous;
      previous = s.misses;
      ok = ok && s.hits() + s.misses == s.total_requests && s.total_requests == trace.events.size();
      ok = ok && s.first_request_misses == docs.size() && s.misses >= docs.size();
      for (const auto& [doc, tally] : s.per_doc) ok = ok && tally.misses >= 1;
    }
  }
  return {ok, fmt("100 traces, %llu requests, C = 1..20", static_cast<unsigned long long>(requests))};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  const std::vector<Criterion> criteria = {
      {1, "closed-form identities", 1.0, closed_forms},
      {2, "gamma moments and tail bound", 30.0, gamma_facts},
      {3, "distinct documents follow gamma M(t)", 300.0, distinct_documents},
      {4, "Monte-Carlo TTL misses agree with m(t)", 120.0, oracle_agreement},
      {5, "zero-order estimate at gamma = 500", 900.0, zero_order_sweep},
      {6, "first-order correction at gamma = 50", 900.0, first_order_sweep},
      {7, "exact expectation converges to first order", 120.0, first_order_limit},
      {8, "LRU structural properties", 60.0, lru_structure},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = out.pass && in_time;
    failures += !pass;
    std::printf("[%s] %d. %s (%.1f s, budget %.0f s%s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                secs, c.budget_seconds, in_time ? "" : ", OVER BUDGET", out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

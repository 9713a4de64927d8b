#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "lrucluster/analytics.hpp"
#include "lrucluster/intensity.hpp"
#include "lrucluster/quadrature.hpp"

namespace lrucluster {

/// Monte-Carlo estimate compared against an analytic target.
struct OracleReport {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  double target = 0.0;
  double z_score = 0.0;
};

void print_report(std::ostream& out, const char* label, const OracleReport& r);

/// Welford running mean and variance.
class RunningStats {
 public:
  void push(double x) noexcept {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  void merge(const RunningStats& other) noexcept;

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept {
    return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
  }
  double std_error() const noexcept {
    return n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
  }
  OracleReport report(double target) const noexcept;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Misses of one document's request times in a TTL cache of eviction time
/// t: the first request plus every gap longer than t.
std::uint64_t ttl_misses_of(const std::vector<double>& request_times, double t) noexcept;

/// Samples (rho, L) and the document's requests n_samples times, counts its
/// TTL misses and compares to m(t). Throws std::invalid_argument for t < 0
/// or n_samples < 1000.
OracleReport mc_ttl_misses(const CanonicalIntensity& model, double t, std::uint64_t n_samples,
                           std::uint64_t seed, const QuadratureConfig& q = {});

/// Deterministic, piecewise-linear, non-negative intensity on [nodes.front(),
/// nodes.back()], zero elsewhere.
class TabulatedIntensity {
 public:
  TabulatedIntensity(std::vector<double> nodes, std::vector<double> values);

  double value(double u) const noexcept;
  /// Lambda(u) = integral of the intensity from the first node to u.
  double cumulative(double u) const noexcept;
  double total() const noexcept { return prefix_.back(); }
  double start() const noexcept { return nodes_.front(); }
  double end() const noexcept { return nodes_.back(); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  double peak() const noexcept;

  /// Poisson request times with this intensity, sorted.
  std::vector<double> sample(Rng& rng) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> prefix_;
};

/// E[sum over consecutive gaps w of F(w)] for a Poisson process with the
/// given intensity, as the double integral
///   int F(w) int lambda(u) lambda(u + w) exp(-(Lambda(u + w) - Lambda(u))) du dw.
/// Discontinuities of F should be listed in `breakpoints`.
/// Throws ToleranceNotMet when the quadrature does not converge.
Integral holding_time_functional(const std::function<double(double)>& gap_fn,
                                 const TabulatedIntensity& intensity, const QuadratureConfig& q,
                                 const std::vector<double>& breakpoints = {});

/// Direct simulation of the same gap functional.
OracleReport mc_holding_time_functional(const std::function<double(double)>& gap_fn,
                                        const TabulatedIntensity& intensity,
                                        std::uint64_t n_samples, std::uint64_t seed,
                                        double target);

/// P(sqrt(n) D_n > x) from the Kolmogorov series with Stephens' finite-n
/// correction.
double kolmogorov_p_value(double statistic, std::uint64_t n);

/// One-sample Kolmogorov-Smirnov statistic of `samples` against a continuous CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

struct ExitTimeReport {
  double ks_statistic = 0.0;
  double p_value = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t n_censored = 0;
  /// More than 5% of the start points were censored.
  bool excessive_censoring = false;
  /// Uncensored observations of T_C^s - s, sorted.
  std::vector<double> exit_times;
};

/// Checks that T_C^s - s follows M^{-1}(G_C / gamma) with G_C ~ Gamma(C, 1).
///
/// Start points s, s + d, s + 2d, ... are placed on simulated traces, with
/// the spacing d chosen so that consecutive exit periods rarely overlap;
/// by stationarity each start point is one replication. The exit time is
/// measured on the whole process, which at a fixed time is the law of the
/// rest process seen by a tagged request.
ExitTimeReport mc_exit_time_law(double gamma, const CanonicalIntensity& model,
                                std::size_t capacity, double s, std::uint64_t n_reps,
                                std::uint64_t seed, const QuadratureConfig& q = {});

/// Mean distinct-document count of [s, s + t] divided by gamma, for each t,
/// next to M(t). Each replication is one trace carrying `windows_per_rep`
/// disjoint start points; the standard error is across replications.
std::vector<OracleReport> mc_distinct_documents(double gamma, const CanonicalIntensity& model,
                                                const std::vector<double>& lengths,
                                                std::uint64_t n_reps,
                                                std::uint64_t windows_per_rep,
                                                std::uint64_t seed,
                                                const QuadratureConfig& q = {});

}  // namespace lrucluster

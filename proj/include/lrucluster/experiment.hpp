#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrucluster/analytics.hpp"
#include "lrucluster/cache.hpp"
#include "lrucluster/intensity.hpp"

namespace lrucluster {

/// Invalid or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Box model with rho ~ Lomax(1.9, 22.5) and L ~ Lomax(1.7, 0.07), so that
/// E[rho] = 25, E[L] = 0.1 and E[Lambda_hat] = 2.5.
CanonicalIntensity default_box_model();

/// Shape e^{-v} tabulated on [0, -log(1e-7)] with `n_nodes` nodes.
ShapeFunction exponential_shape(std::size_t n_nodes = 2001);

/// Flat `key = value` configuration; `#` starts a comment. Keys:
///
///   gamma_list        comma-separated catalog rates
///   capacity_list     capacities, e.g. `1,2,5` or `1..10`
///   theta_list        mean sojourn times; C = round(gamma theta)
///   replications      traces per gamma (>= 1)
///   seed              base seed
///   sim_time          observation length S, or `auto`
///   sim_time_cap      upper bound applied to an automatic S
///   sizing_threshold  accuracy target of the automatic S (default 1e-3)
///   model             `box` or `scale_family`
///   rho_alpha, rho_sigma | rho_point
///   lifespan_alpha, lifespan_sigma | lifespan_point
///   shape             `exponential` or a CSV file of `v,f` rows
///   rel_tol, abs_tol, max_depth, tail_mass_cut
///   output_path       CSV destination (`-` for stdout)
///   threads           worker count, 0 for the hardware concurrency
///   with_exact        `true` to add the Gamma-quadrature expectation
struct ExperimentConfig {
  std::vector<double> gamma_list;
  std::vector<std::size_t> capacity_list;
  std::vector<double> theta_list;
  CanonicalIntensity model = default_box_model();
  std::size_t replications = 1;
  std::uint64_t seed = 1;
  std::optional<double> sim_time;
  double sim_time_cap = 20000.0;
  double sizing_threshold = 1e-3;
  QuadratureConfig quadrature;
  std::string output_path = "-";
  unsigned threads = 0;
  bool with_exact = true;

  /// Applies one key; throws ConfigError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig from_file(const std::string& path);

  /// Throws ConfigError unless exactly one sweep axis is set, the gamma
  /// list is non-empty and replications >= 1.
  void validate() const;

  /// Capacities swept at the given rate, ascending and de-duplicated.
  std::vector<std::size_t> capacities_for(double gamma) const;
  /// The fixed sim_time, or the automatic size capped by sim_time_cap.
  double simulation_time_for(double gamma) const;

 private:
  // Pending mark parameters, folded into `model` by set().
  double rho_alpha_ = 1.9, rho_sigma_ = 22.5, lifespan_alpha_ = 1.7, lifespan_sigma_ = 0.07;
  std::optional<double> rho_point_, lifespan_point_;
  std::string kind_ = "box";
  std::string shape_ = "exponential";
  void rebuild_model();
};

/// K_alpha = sigma (Gamma(2 - alpha) |cos(pi alpha / 2)| / (alpha - 1))^(1 / alpha),
/// the scale of the stable limit of sums of Lomax(alpha, sigma) variables.
double stable_law_constant(const LomaxParams& lifespan);

struct SimTimeSizing {
  /// Smallest S with K_alpha / n^(1 - 1/alpha) <= threshold, n = gamma S mu0.
  double stable_term = 0.0;
  /// 10 times the (1 - tail_mass_cut) quantile of L.
  double coverage_term = 0.0;
  double value = 0.0;
};

/// Throws std::invalid_argument unless the model is Box with a Lomax
/// lifespan of tail index in (1, 2), gamma > 0 and threshold > 0.
SimTimeSizing size_simulation_time(const CanonicalIntensity& model, double gamma,
                                   double threshold = 1e-3, const QuadratureConfig& q = {});

struct SweepRow {
  double gamma = 0.0;
  std::size_t capacity = 0;
  double theta = 0.0;
  double emp_hit = 0.0;
  double emp_stderr = 0.0;
  double zero_hit = 0.0;
  double first_hit = 0.0;
  std::optional<double> exact_hit;
  double char_time = 0.0;
  double e_term = 0.0;
  std::size_t n_reps = 0;
  double sim_time = 0.0;
  bool clamped = false;
  /// Non-empty when this cell failed; the sweep carries on.
  std::string error;
};

/// Simulates `replications` traces per rate, replays every capacity through
/// LRU and attaches the analytic estimates. Rows are sorted by (gamma, C).
std::vector<SweepRow> run_sweep(const ExperimentConfig& config);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void write_estimate_csv(const std::vector<Estimate>& rows, std::ostream& out);
void write_stats_csv(const std::vector<std::pair<std::size_t, SimStats>>& rows, std::ostream& out);

}  // namespace lrucluster

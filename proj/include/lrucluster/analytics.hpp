#pragma once

#include <cstddef>
#include <optional>
#include <variant>

#include "lrucluster/intensity.hpp"
#include "lrucluster/laws.hpp"
#include "lrucluster/quadrature.hpp"

namespace lrucluster {

/// Box intensity rho 1{0 <= u <= L} with independent (rho, L).
struct BoxModelSpec {
  MarkLaw rho_law;
  MarkLaw lifespan_law;

  double mean_requests() const noexcept { return rho_law.mean() * lifespan_law.mean(); }
};

/// Scale family rho f(u / L) with a tabulated shape and independent marks.
struct ScaleFamilySpec {
  MarkLaw rho_law;
  MarkLaw lifespan_law;
  ShapeFunction shape;

  double mean_requests() const noexcept { return rho_law.mean() * lifespan_law.mean(); }
};

/// Expected misses of one Box document with fixed marks in a TTL cache of
/// eviction time t. Throws std::invalid_argument for t < 0 or non-positive marks.
double box_ttl_misses(double t, double rho, double lifespan);

// Box-model expectations over the (rho, L) law. All throw ToleranceNotMet
// when an adaptive quadrature runs out of subdivisions.

/// m(t): expected misses per document of a TTL cache with eviction time t.
Integral ttl_misses(double t, const BoxModelSpec& spec, const QuadratureConfig& q);
/// m'(t) and m''(t), t > 0.
Integral ttl_misses_d1(double t, const BoxModelSpec& spec, const QuadratureConfig& q);
Integral ttl_misses_d2(double t, const BoxModelSpec& spec, const QuadratureConfig& q);
/// M(t) = integral of m over [0, t]: the mean number of distinct documents
/// requested in a window of length t, per unit catalog rate.
Integral cumulative_ttl_misses(double t, const BoxModelSpec& spec, const QuadratureConfig& q);
/// mu0 = E[1 - exp(-rho L)] = lim m(t) as t grows.
Integral single_miss_floor(const BoxModelSpec& spec, const QuadratureConfig& q);

/// The TTL miss function of either intensity family together with the
/// tolerances used to evaluate it. Cheap to copy.
class MissModel {
 public:
  MissModel(BoxModelSpec spec, QuadratureConfig q = {});
  MissModel(ScaleFamilySpec spec, QuadratureConfig q = {});
  /// Builds the matching spec from a traffic model.
  static MissModel from_intensity(const CanonicalIntensity& model, QuadratureConfig q = {});

  Integral m(double t) const;
  Integral m_d1(double t) const;
  Integral m_d2(double t) const;
  Integral cumulative(double t) const;
  Integral floor_mu0() const;
  double mean_requests() const noexcept;

  const QuadratureConfig& quadrature() const noexcept { return q_; }
  bool is_box() const noexcept { return std::holds_alternative<BoxModelSpec>(spec_); }

 private:
  std::variant<BoxModelSpec, ScaleFamilySpec> spec_;
  QuadratureConfig q_;
};

/// Root of M(t) = theta, to within max(abs_tol, rel_tol theta) in M.
/// Throws std::invalid_argument for theta <= 0 and std::runtime_error if
/// the bracket cannot be grown.
double characteristic_time(double theta, const MissModel& model);

/// e(t) = theta^2 / (2 m^2) (m'' - m'^2 / m) evaluated at t = t_theta.
double first_order_term(double t_theta, double theta, const MissModel& model);

struct HitRatioEstimates {
  double zero_order = 0.0;
  double first_order = 0.0;
  bool zero_clamped = false;
  bool first_clamped = false;
};

/// Che (zero-order) and first-order LRU hit ratios for capacity C at mean
/// sojourn time theta = C / gamma.
HitRatioEstimates hit_ratio_estimates(double theta, std::size_t capacity, const MissModel& model);

/// E[misses per document] of an LRU cache of capacity C under catalog rate
/// gamma: E[m(M^{-1}(G / gamma))] with G ~ Gamma(C, 1), computed by
/// quadrature without asymptotics.
Integral expected_lru_misses(std::size_t capacity, double gamma, const MissModel& model);

/// Bundle of analytic outputs for one (gamma, C) pair.
struct Estimate {
  double gamma = 0.0;
  std::size_t capacity = 0;
  double theta = 0.0;
  double char_time = 0.0;
  double m_at_char = 0.0;
  double e_term = 0.0;
  double zero_order_hit = 0.0;
  double first_order_hit = 0.0;
  bool clamped = false;
  std::optional<double> exact_expected_misses;
  std::optional<double> exact_hit;
};

Estimate estimate(const MissModel& model, double gamma, std::size_t capacity,
                  bool with_exact = true);

/// 2 exp(-C phi(1 + eta)) with phi(x) = x - 1 - log x: a bound on
/// P(|G_C / C - 1| >= eta). Requires C > 1 and eta > 0.
double gamma_tail_bound(double capacity, double eta);

/// E[(G_C / C - 1)^k] for G_C ~ Gamma(C, 1), from the cumulant recursion of
/// the Gamma law (all terms positive, no cancellation). Requires C > 1, k >= 0.
double gamma_central_moment(double capacity, int k);

}  // namespace lrucluster

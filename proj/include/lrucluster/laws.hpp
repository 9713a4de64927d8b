#pragma once

#include <variant>

#include "lrucluster/rng.hpp"

namespace lrucluster {

/// Pareto-Lomax law with density alpha sigma^alpha / (sigma + x)^(alpha + 1).
/// Only the finite-mean range alpha > 1 is admitted.
class LomaxParams {
 public:
  /// Throws std::invalid_argument unless alpha > 1 and sigma > 0.
  LomaxParams(double alpha, double sigma);

  double alpha() const noexcept { return alpha_; }
  double sigma() const noexcept { return sigma_; }

  double mean() const noexcept { return sigma_ / (alpha_ - 1.0); }
  double pdf(double x) const noexcept;
  double cdf(double x) const noexcept;
  /// P(X > x) = (sigma / (sigma + x))^alpha.
  double survival(double x) const noexcept;
  double quantile(double p) const;
  /// x with P(X > x) = tail_mass, accurate for tiny tail masses.
  double upper_quantile(double tail_mass) const;
  /// E[X 1{X > x}].
  double partial_mean_above(double x) const noexcept;
  /// E[(X - t)^+] = sigma^alpha (sigma + t)^(1 - alpha) / (alpha - 1).
  double mean_excess(double t) const noexcept;
  /// Inverse-CDF transform sigma ((1 - u)^(-1/alpha) - 1).
  double from_uniform(double u) const noexcept;

  bool operator==(const LomaxParams&) const = default;

 private:
  double alpha_;
  double sigma_;
};

double sample_lomax(const LomaxParams& params, Rng& rng) noexcept;

/// Law of one positive mark (request rate or lifespan): a Lomax law or a
/// point mass. Point masses give the deterministic-mark specializations.
class MarkLaw {
 public:
  MarkLaw(LomaxParams lomax) : law_(lomax) {}  // NOLINT: implicit on purpose

  static MarkLaw lomax(double alpha, double sigma) { return MarkLaw(LomaxParams(alpha, sigma)); }
  /// Throws std::invalid_argument unless value > 0.
  static MarkLaw point(double value);

  bool is_point() const noexcept { return std::holds_alternative<double>(law_); }
  const LomaxParams* as_lomax() const noexcept { return std::get_if<LomaxParams>(&law_); }
  double point_value() const { return std::get<double>(law_); }

  double mean() const noexcept;
  double survival(double x) const noexcept;
  double mean_excess(double t) const noexcept;
  double quantile(double p) const;
  double sample(Rng& rng) const noexcept;

  bool operator==(const MarkLaw&) const = default;

 private:
  struct PointTag {};
  explicit MarkLaw(double value, PointTag) : law_(value) {}

  std::variant<LomaxParams, double> law_;
};

}  // namespace lrucluster

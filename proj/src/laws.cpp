#include "lrucluster/laws.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lrucluster {

LomaxParams::LomaxParams(double alpha, double sigma) : alpha_(alpha), sigma_(sigma) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("Lomax tail index must satisfy alpha > 1, got " +
                                std::to_string(alpha));
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("Lomax scale must be positive, got " + std::to_string(sigma));
  }
}

double LomaxParams::pdf(double x) const noexcept {
  if (x < 0.0) return 0.0;
  return alpha_ / sigma_ * std::pow(sigma_ / (sigma_ + x), alpha_ + 1.0);
}

double LomaxParams::cdf(double x) const noexcept { return 1.0 - survival(x); }

double LomaxParams::survival(double x) const noexcept {
  if (x <= 0.0) return 1.0;
  return std::pow(sigma_ / (sigma_ + x), alpha_);
}

double LomaxParams::quantile(double p) const {
  if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("Lomax quantile needs p in [0, 1)");
  return from_uniform(p);
}

double LomaxParams::upper_quantile(double tail_mass) const {
  if (!(tail_mass > 0.0 && tail_mass <= 1.0)) {
    throw std::domain_error("Lomax upper quantile needs tail mass in (0, 1]");
  }
  return sigma_ * std::expm1(-std::log(tail_mass) / alpha_);
}

double LomaxParams::partial_mean_above(double x) const noexcept {
  x = std::max(x, 0.0);
  return x * survival(x) + mean_excess(x);
}

double LomaxParams::mean_excess(double t) const noexcept {
  if (t <= 0.0) return mean() - t;
  return (sigma_ + t) * survival(t) / (alpha_ - 1.0);
}

double LomaxParams::from_uniform(double u) const noexcept {
  // (1 - u)^(-1/alpha) - 1 == expm1(-log1p(-u) / alpha), accurate near u = 0.
  return sigma_ * std::expm1(-std::log1p(-u) / alpha_);
}

double sample_lomax(const LomaxParams& params, Rng& rng) noexcept {
  return params.from_uniform(rng.uniform());
}

MarkLaw MarkLaw::point(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("point-mass mark must be positive and finite");
  }
  return MarkLaw(value, PointTag{});
}

double MarkLaw::mean() const noexcept {
  if (const auto* l = as_lomax()) return l->mean();
  return std::get<double>(law_);
}

double MarkLaw::survival(double x) const noexcept {
  if (const auto* l = as_lomax()) return l->survival(x);
  return std::get<double>(law_) > x ? 1.0 : 0.0;
}

double MarkLaw::mean_excess(double t) const noexcept {
  if (const auto* l = as_lomax()) return l->mean_excess(t);
  return std::max(std::get<double>(law_) - t, 0.0);
}

double MarkLaw::quantile(double p) const {
  if (const auto* l = as_lomax()) return l->quantile(p);
  return std::get<double>(law_);
}

double MarkLaw::sample(Rng& rng) const noexcept {
  if (const auto* l = as_lomax()) return sample_lomax(*l, rng);
  return std::get<double>(law_);
}

}  // namespace lrucluster

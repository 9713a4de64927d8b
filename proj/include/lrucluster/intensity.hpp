#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lrucluster/laws.hpp"

namespace lrucluster {

/// Piecewise-linear tabulation of a request-intensity shape f on [0, V],
/// taken as zero beyond the last node. The cumulative F is integrated
/// exactly on the tabulation.
///
/// Requirements checked at construction: nodes start at 0 and increase,
/// values are strictly positive, unimodal (non-decreasing then
/// non-increasing), the tabulated integral is 1 within 1e-3 (the table is
/// then rescaled to exactly 1) and the value at the last node is below
/// 1e-6 of the peak so that truncating at V is negligible.
class ShapeFunction {
 public:
  ShapeFunction(std::vector<double> nodes, std::vector<double> values);

  /// Samples `fn` on n uniformly spaced nodes over [0, support_end].
  static ShapeFunction tabulate(const std::function<double(double)>& fn, double support_end,
                                std::size_t n_nodes);

  double operator()(double v) const noexcept { return value(v); }
  double value(double v) const noexcept;
  /// Right derivative of the tabulation (piecewise constant).
  double derivative(double v) const noexcept;
  double cumulative(double v) const noexcept;

  double support_end() const noexcept { return nodes_.back(); }
  double peak() const noexcept { return peak_; }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Integral of f^2 and total variation of f over the tabulation.
  double square_integral() const noexcept;
  double total_variation() const noexcept;

 private:
  std::size_t segment(double v) const noexcept;

  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> prefix_;  // F at each node
  double peak_ = 0.0;
};

enum class IntensityKind { Box, ScaleFamily };

/// Law of the canonical request intensity lambda(u) = rho f(u / L):
/// Box uses f = 1 on [0, 1]; ScaleFamily carries a tabulated shape.
/// The marks (rho, L) are independent.
struct CanonicalIntensity {
  IntensityKind kind = IntensityKind::Box;
  MarkLaw rho_law;
  MarkLaw lifespan_law;
  std::optional<ShapeFunction> shape;

  static CanonicalIntensity box(MarkLaw rho, MarkLaw lifespan);
  static CanonicalIntensity scale_family(MarkLaw rho, MarkLaw lifespan, ShapeFunction shape);

  /// Throws std::invalid_argument if kind and shape presence disagree.
  void validate() const;

  /// Intensity of one document with marks (rho, L) at age u >= 0.
  double intensity(double rho, double lifespan, double age) const noexcept;
  /// Lambda(age) = integral of the intensity over [0, age].
  double mean_function(double rho, double lifespan, double age) const noexcept;
  /// Complementary mean Lambda_hat - Lambda(age).
  double complementary_mean(double rho, double lifespan, double age) const noexcept;
  /// Age beyond which the intensity is zero, in units of the lifespan.
  double support_scale() const noexcept;
  /// E[Lambda_hat] = E[rho] E[L].
  double mean_requests() const noexcept;
};

}  // namespace lrucluster

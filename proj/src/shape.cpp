#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lrucluster/intensity.hpp"

namespace lrucluster {

ShapeFunction::ShapeFunction(std::vector<double> nodes, std::vector<double> values)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
  if (nodes_.size() < 2 || nodes_.size() != values_.size()) {
    throw std::invalid_argument("shape needs at least two (node, value) pairs");
  }
  if (nodes_.front() != 0.0) throw std::invalid_argument("shape nodes must start at 0");
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) throw std::invalid_argument("shape nodes must increase");
  }
  for (double f : values_) {
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw std::invalid_argument("shape values must be strictly positive");
    }
  }
  const auto top = std::max_element(values_.begin(), values_.end());
  if (!std::is_sorted(values_.begin(), top + 1) ||
      !std::is_sorted(top, values_.end(), std::greater<>())) {
    throw std::invalid_argument("shape must be unimodal");
  }
  peak_ = *top;
  if (values_.back() > 1e-6 * peak_) {
    throw std::invalid_argument("shape must have decayed to < 1e-6 of its peak at the last node");
  }

  double total = 0.0;
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    total += 0.5 * (values_[i] + values_[i - 1]) * (nodes_[i] - nodes_[i - 1]);
  }
  if (std::abs(total - 1.0) > 1e-3) {
    throw std::invalid_argument("shape must integrate to 1 (got " + std::to_string(total) + ")");
  }
  for (double& f : values_) f /= total;
  peak_ /= total;

  prefix_.assign(nodes_.size(), 0.0);
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    prefix_[i] = prefix_[i - 1] + 0.5 * (values_[i] + values_[i - 1]) * (nodes_[i] - nodes_[i - 1]);
  }
}

ShapeFunction ShapeFunction::tabulate(const std::function<double(double)>& fn,
                                      double support_end, std::size_t n_nodes) {
  if (n_nodes < 2 || !(support_end > 0.0)) {
    throw std::invalid_argument("tabulate needs n_nodes >= 2 and a positive support");
  }
  std::vector<double> nodes(n_nodes);
  std::vector<double> values(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    nodes[i] = support_end * static_cast<double>(i) / static_cast<double>(n_nodes - 1);
    values[i] = fn(nodes[i]);
  }
  return ShapeFunction(std::move(nodes), std::move(values));
}

std::size_t ShapeFunction::segment(double v) const noexcept {
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), v);
  const auto idx = static_cast<std::size_t>(it - nodes_.begin());
  return std::min(idx == 0 ? 0 : idx - 1, nodes_.size() - 2);
}

double ShapeFunction::value(double v) const noexcept {
  if (v < 0.0 || v > nodes_.back()) return 0.0;
  const std::size_t i = segment(v);
  const double w = (v - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
  return values_[i] + w * (values_[i + 1] - values_[i]);
}

double ShapeFunction::derivative(double v) const noexcept {
  if (v < 0.0 || v >= nodes_.back()) return 0.0;
  const std::size_t i = segment(v);
  return (values_[i + 1] - values_[i]) / (nodes_[i + 1] - nodes_[i]);
}

double ShapeFunction::cumulative(double v) const noexcept {
  if (v <= 0.0) return 0.0;
  if (v >= nodes_.back()) return prefix_.back();
  const std::size_t i = segment(v);
  const double dv = v - nodes_[i];
  const double slope = (values_[i + 1] - values_[i]) / (nodes_[i + 1] - nodes_[i]);
  return prefix_[i] + dv * (values_[i] + 0.5 * slope * dv);
}

double ShapeFunction::square_integral() const noexcept {
  double acc = 0.0;
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    const double a = values_[i - 1];
    const double b = values_[i];
    acc += (a * a + a * b + b * b) / 3.0 * (nodes_[i] - nodes_[i - 1]);
  }
  return acc;
}

double ShapeFunction::total_variation() const noexcept {
  double acc = values_.front() + values_.back();  // jumps at 0 and V
  for (std::size_t i = 1; i < values_.size(); ++i) acc += std::abs(values_[i] - values_[i - 1]);
  return acc;
}

CanonicalIntensity CanonicalIntensity::box(MarkLaw rho, MarkLaw lifespan) {
  return CanonicalIntensity{IntensityKind::Box, std::move(rho), std::move(lifespan), std::nullopt};
}

CanonicalIntensity CanonicalIntensity::scale_family(MarkLaw rho, MarkLaw lifespan,
                                                    ShapeFunction shape) {
  return CanonicalIntensity{IntensityKind::ScaleFamily, std::move(rho), std::move(lifespan),
                            std::move(shape)};
}

void CanonicalIntensity::validate() const {
  if ((kind == IntensityKind::Box) == shape.has_value()) {
    throw std::invalid_argument("Box intensities carry no shape; scale families require one");
  }
}

double CanonicalIntensity::intensity(double rho, double lifespan, double age) const noexcept {
  if (age < 0.0) return 0.0;
  if (kind == IntensityKind::Box) return age <= lifespan ? rho : 0.0;
  return rho * shape->value(age / lifespan);
}

double CanonicalIntensity::mean_function(double rho, double lifespan, double age) const noexcept {
  if (age <= 0.0) return 0.0;
  if (kind == IntensityKind::Box) return rho * std::min(age, lifespan);
  return rho * lifespan * shape->cumulative(age / lifespan);
}

double CanonicalIntensity::complementary_mean(double rho, double lifespan,
                                              double age) const noexcept {
  return rho * lifespan - mean_function(rho, lifespan, age);
}

double CanonicalIntensity::support_scale() const noexcept {
  return kind == IntensityKind::Box ? 1.0 : shape->support_end();
}

double CanonicalIntensity::mean_requests() const noexcept {
  return rho_law.mean() * lifespan_law.mean();
}

}  // namespace lrucluster

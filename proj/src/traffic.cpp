#include "lrucluster/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace lrucluster {

namespace {

std::uint64_t poisson(double mean, Rng& rng) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<long long> dist(mean);
  return static_cast<std::uint64_t>(dist(rng));
}

}  // namespace

bool RequestTrace::is_sorted() const noexcept {
  return std::is_sorted(events.begin(), events.end(),
                        [](const Request& a, const Request& b) { return a.time < b.time; });
}

void RequestTrace::validate() const {
  if (!is_sorted()) throw std::invalid_argument("trace events are not sorted by time");
  for (const auto& e : events) {
    if (!window.contains(e.time)) throw std::invalid_argument("trace event outside its window");
  }
}

std::vector<double> sample_catalog(double gamma, TimeWindow window, Rng& rng) {
  if (!(gamma > 0.0)) throw std::invalid_argument("catalog rate gamma must be positive");
  std::vector<double> arrivals;
  if (!(window.length() > 0.0)) return arrivals;
  const std::uint64_t n = poisson(gamma * window.length(), rng);
  arrivals.resize(n);
  for (auto& a : arrivals) a = window.start + window.length() * rng.uniform();
  std::sort(arrivals.begin(), arrivals.end());
  return arrivals;
}

DocumentProfile sample_profile(DocId id, double arrival, const CanonicalIntensity& model,
                               Rng& rng) {
  DocumentProfile p;
  p.doc_id = id;
  p.arrival = arrival;
  p.rho = model.rho_law.sample(rng);
  p.lifespan = model.lifespan_law.sample(rng);
  // A zero draw (U == 0 exactly) would violate rho, L > 0.
  p.rho = std::max(p.rho, std::numeric_limits<double>::min());
  p.lifespan = std::max(p.lifespan, std::numeric_limits<double>::min());
  return p;
}

std::vector<double> sample_document_requests(const DocumentProfile& profile,
                                             const CanonicalIntensity& model, Rng& rng) {
  const TimeWindow life{profile.arrival,
                        profile.arrival + profile.lifespan * model.support_scale()};
  return sample_document_requests(profile, model, life, rng);
}

std::vector<double> sample_document_requests(const DocumentProfile& profile,
                                             const CanonicalIntensity& model,
                                             TimeWindow window, Rng& rng) {
  std::vector<double> times;
  const double lo = std::max(profile.arrival, window.start);
  const double hi =
      std::min(profile.arrival + profile.lifespan * model.support_scale(), window.end);
  if (!(hi > lo)) return times;
  const double span = hi - lo;

  if (model.kind == IntensityKind::Box) {
    times.resize(poisson(profile.rho * span, rng));
    for (auto& t : times) t = lo + span * rng.uniform();
  } else {
    const ShapeFunction& f = *model.shape;
    const double majorant = profile.rho * f.peak();
    const std::uint64_t proposals = poisson(majorant * span, rng);
    times.reserve(proposals);
    for (std::uint64_t i = 0; i < proposals; ++i) {
      const double t = lo + span * rng.uniform();
      const double accept = f.value((t - profile.arrival) / profile.lifespan) / f.peak();
      if (rng.uniform() < accept) times.push_back(t);
    }
  }
  std::sort(times.begin(), times.end());
  return times;
}

namespace {

// Expected requests inside [0, W] per catalog rate from documents arriving
// before -B, for an activity span X ~ Lomax(alpha, sigma) and rate at most
// rho_bound: rho_bound P(X > B) E[h(X - B) | X > B], h(y) = int_0^y min(z, W) dz.
// The excess over B is Lomax(alpha, sigma + B).
double requests_before_margin(double alpha, double sigma, double rho_bound, double b, double w) {
  const double s = sigma + b;
  const double z = 1.0 + w / s;
  const double log_z = std::log1p(w / s);
  // int_0^W y (1 + y/s)^-alpha dy, with the alpha = 1 and alpha = 2 limits.
  auto power_integral = [&](double p) {
    return std::abs(p) < 1e-9 ? log_z : std::expm1(p * log_z) / p;
  };
  const double near = s * s * (power_integral(2.0 - alpha) - power_integral(1.0 - alpha));
  const double far = w * s / (alpha - 1.0) * std::pow(z, 1.0 - alpha);
  return rho_bound * std::pow(1.0 + b / sigma, -alpha) * (near + far);
}

}  // namespace

double pre_extension_margin(const CanonicalIntensity& model, double window_length) {
  const double v = model.support_scale();
  const double threshold = 1e-3 * model.mean_requests() * std::max(window_length, 0.0);
  const double mean_rho = model.rho_law.mean();
  if (model.lifespan_law.is_point()) return model.lifespan_law.point_value() * v;

  const auto& law = *model.lifespan_law.as_lomax();
  const double rho_bound = mean_rho * (model.shape ? model.shape->peak() : 1.0);
  auto lost = [&](double b) {
    return requests_before_margin(law.alpha(), law.sigma() * v, rho_bound, b, window_length);
  };
  auto excess = [&](double b) { return law.survival(b / v) * mean_rho * b; };
  // Both criteria decrease beyond the peak of b P(L V > b).
  auto too_small = [&](double b) { return excess(b) >= threshold || lost(b) > threshold; };
  double lo = law.sigma() * v / (law.alpha() - 1.0);
  if (!too_small(lo)) return lo;
  double hi = 2.0 * lo;
  while (too_small(hi)) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw std::runtime_error("pre-extension margin diverged");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-9 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (too_small(mid) ? lo : hi) = mid;
  }
  return hi;
}

RequestTrace generate_trace(double gamma, const CanonicalIntensity& model,
                            TimeWindow observation_window, std::uint64_t seed,
                            const TraceOptions& options) {
  model.validate();
  if (!(observation_window.length() >= 0.0)) {
    throw std::invalid_argument("observation window must satisfy start <= end");
  }
  RequestTrace trace;
  trace.window = observation_window;
  trace.gamma = gamma;
  trace.seed = seed;

  const double margin = options.margin >= 0.0
                            ? options.margin
                            : pre_extension_margin(model, observation_window.length());
  trace.diagnostics.margin = margin;

  Rng catalog_rng = Rng::stream(seed, 0);
  const TimeWindow catalog_window{observation_window.start - margin, observation_window.end};
  const std::vector<double> arrivals = sample_catalog(gamma, catalog_window, catalog_rng);
  trace.diagnostics.documents_sampled = arrivals.size();

  const double span_scale = model.support_scale();
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    Rng doc_rng = Rng::stream(seed, i + 1);
    const DocumentProfile profile = sample_profile(i, arrivals[i], model, doc_rng);
    if (profile.lifespan * span_scale > margin) ++trace.diagnostics.documents_outliving_margin;
    const auto times = sample_document_requests(profile, model, observation_window, doc_rng);
    if (times.empty()) {
      ++trace.diagnostics.documents_without_requests;
      continue;
    }
    for (double t : times) trace.events.push_back({t, profile.doc_id});
  }
  std::stable_sort(trace.events.begin(), trace.events.end(),
                   [](const Request& a, const Request& b) { return a.time < b.time; });
  return trace;
}

}  // namespace lrucluster

#pragma once

#include <cstdint>
#include <vector>

#include "lrucluster/intensity.hpp"
#include "lrucluster/rng.hpp"

namespace lrucluster {

using DocId = std::uint64_t;

struct TimeWindow {
  double start = 0.0;
  double end = 0.0;

  double length() const noexcept { return end - start; }
  bool contains(double t) const noexcept { return t >= start && t <= end; }
};

/// One document of the catalog: arrival time and its intensity marks.
struct DocumentProfile {
  DocId doc_id = 0;
  double arrival = 0.0;
  double rho = 0.0;
  double lifespan = 0.0;

  /// Lambda_hat for the given intensity law.
  double mean_requests(const CanonicalIntensity& model) const noexcept {
    return model.mean_function(rho, lifespan, lifespan * model.support_scale());
  }
};

struct Request {
  double time = 0.0;
  DocId doc = 0;

  bool operator==(const Request&) const = default;
};

struct TraceDiagnostics {
  /// Pre-extension margin B: catalog arrivals were drawn on [start - B, end].
  double margin = 0.0;
  std::uint64_t documents_sampled = 0;
  /// Documents with no request inside the window (never enter a cache).
  std::uint64_t documents_without_requests = 0;
  /// Sampled documents whose activity outlasts the margin; a large count
  /// means earlier, unsampled arrivals could still reach the window.
  std::uint64_t documents_outliving_margin = 0;
};

/// Time-ordered request events of the total request process.
struct RequestTrace {
  std::vector<Request> events;
  TimeWindow window;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  TraceDiagnostics diagnostics;

  bool is_sorted() const noexcept;
  /// Throws std::invalid_argument if events are unsorted or fall outside the window.
  void validate() const;
};

/// Homogeneous Poisson catalog of rate gamma on the window, sorted.
/// Throws std::invalid_argument for gamma <= 0.
std::vector<double> sample_catalog(double gamma, TimeWindow window, Rng& rng);

/// Draws (rho, L) for a document arriving at `arrival`.
DocumentProfile sample_profile(DocId id, double arrival, const CanonicalIntensity& model,
                               Rng& rng);

/// All request times of one document, sorted. Box: Poisson with rate rho on
/// [a, a + L]. ScaleFamily: thinning of rho f((u - a) / L) against rho max f.
std::vector<double> sample_document_requests(const DocumentProfile& profile,
                                             const CanonicalIntensity& model, Rng& rng);

/// Same law as sample_document_requests restricted to `window`, but only
/// the overlap of the document's support with the window is simulated.
std::vector<double> sample_document_requests(const DocumentProfile& profile,
                                             const CanonicalIntensity& model,
                                             TimeWindow window, Rng& rng);

/// Smallest margin B beyond the peak of B P(L' > B) with
/// P(L' > B) E[rho] B < 1e-3 E[Lambda_hat] |window| and with the expected
/// in-window requests of documents arriving before the margin at most
/// 1e-3 E[Lambda_hat] |window|. L' = L V is the activity span (V the shape
/// support, 1 for Box).
double pre_extension_margin(const CanonicalIntensity& model, double window_length);

struct TraceOptions {
  /// Overrides the automatic margin when >= 0.
  double margin = -1.0;
};

/// Samples the cluster process on `observation_window`. Deterministic in
/// (gamma, model, window, seed). Document ids are catalog indices.
RequestTrace generate_trace(double gamma, const CanonicalIntensity& model,
                            TimeWindow observation_window, std::uint64_t seed,
                            const TraceOptions& options = {});

}  // namespace lrucluster

#include "lrucluster/oracle.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include <boost/math/special_functions/gamma.hpp>

#include "lrucluster/cache.hpp"
#include "lrucluster/traffic.hpp"

namespace lrucluster {

void print_report(std::ostream& out, const char* label, const OracleReport& r) {
  char line[256];
  std::snprintf(line, sizeof line, "%-28s estimate %-14.8g stderr %-12.4g target %-14.8g z %+.3f n %llu\n",
                label, r.estimate, r.std_error, r.target, r.z_score,
                static_cast<unsigned long long>(r.n_samples));
  out << line;
}

void RunningStats::merge(const RunningStats& other) noexcept {
  if (other.n_ == 0) return;
  const double n = static_cast<double>(n_ + other.n_);
  const double delta = other.mean_ - mean_;
  m2_ += other.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(other.n_) / n;
  mean_ += delta * static_cast<double>(other.n_) / n;
  n_ += other.n_;
}

OracleReport RunningStats::report(double target) const noexcept {
  OracleReport r;
  r.estimate = mean_;
  r.std_error = std_error();
  r.n_samples = n_;
  r.target = target;
  r.z_score = r.std_error > 0.0 ? (r.estimate - r.target) / r.std_error : 0.0;
  return r;
}

std::uint64_t ttl_misses_of(const std::vector<double>& request_times, double t) noexcept {
  if (request_times.empty()) return 0;
  std::uint64_t misses = 1;
  for (std::size_t i = 1; i < request_times.size(); ++i) {
    if (request_times[i] - request_times[i - 1] > t) ++misses;
  }
  return misses;
}

OracleReport mc_ttl_misses(const CanonicalIntensity& model, double t, std::uint64_t n_samples,
                           std::uint64_t seed, const QuadratureConfig& q) {
  if (!(t >= 0.0)) throw std::invalid_argument("mc_ttl_misses needs t >= 0");
  if (n_samples < 1000) throw std::invalid_argument("mc_ttl_misses needs n_samples >= 1000");
  model.validate();
  RunningStats stats;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    Rng rng = Rng::stream(seed, i);
    const DocumentProfile doc = sample_profile(i, 0.0, model, rng);
    stats.push(static_cast<double>(ttl_misses_of(sample_document_requests(doc, model, rng), t)));
  }
  const MissModel analytic = MissModel::from_intensity(model, q);
  return stats.report(analytic.m(t).value);
}

// ------------------------------------------------------------ holding times

TabulatedIntensity::TabulatedIntensity(std::vector<double> nodes, std::vector<double> values)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
  if (nodes_.size() < 2 || nodes_.size() != values_.size()) {
    throw std::invalid_argument("intensity table needs >= 2 nodes and matching values");
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
      throw std::invalid_argument("intensity values must be finite and non-negative");
    }
    if (i > 0 && !(nodes_[i] > nodes_[i - 1])) {
      throw std::invalid_argument("intensity nodes must be strictly increasing");
    }
  }
  prefix_.assign(nodes_.size(), 0.0);
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    prefix_[i] = prefix_[i - 1] + 0.5 * (values_[i] + values_[i - 1]) * (nodes_[i] - nodes_[i - 1]);
  }
}

double TabulatedIntensity::value(double u) const noexcept {
  if (u < nodes_.front() || u > nodes_.back()) return 0.0;
  const auto k = static_cast<std::size_t>(
      std::upper_bound(nodes_.begin(), nodes_.end(), u) - nodes_.begin());
  if (k >= nodes_.size()) return values_.back();
  const double w = (u - nodes_[k - 1]) / (nodes_[k] - nodes_[k - 1]);
  return values_[k - 1] + w * (values_[k] - values_[k - 1]);
}

double TabulatedIntensity::cumulative(double u) const noexcept {
  if (u <= nodes_.front()) return 0.0;
  if (u >= nodes_.back()) return prefix_.back();
  const auto k = static_cast<std::size_t>(
      std::upper_bound(nodes_.begin(), nodes_.end(), u) - nodes_.begin());
  const double h = u - nodes_[k - 1];
  const double slope = (values_[k] - values_[k - 1]) / (nodes_[k] - nodes_[k - 1]);
  return prefix_[k - 1] + values_[k - 1] * h + 0.5 * slope * h * h;
}

double TabulatedIntensity::peak() const noexcept {
  return *std::max_element(values_.begin(), values_.end());
}

std::vector<double> TabulatedIntensity::sample(Rng& rng) const {
  std::vector<double> times;
  const double majorant = peak();
  if (!(majorant > 0.0)) return times;
  const double span = end() - start();
  std::poisson_distribution<long long> count(majorant * span);
  const long long proposals = count(rng);
  for (long long i = 0; i < proposals; ++i) {
    const double u = start() + span * rng.uniform();
    if (rng.uniform() * majorant < value(u)) times.push_back(u);
  }
  std::sort(times.begin(), times.end());
  return times;
}

Integral holding_time_functional(const std::function<double(double)>& gap_fn,
                                 const TabulatedIntensity& intensity, const QuadratureConfig& q,
                                 const std::vector<double>& breakpoints) {
  q.validate();
  const double span = intensity.end() - intensity.start();
  const auto& nodes = intensity.nodes();

  double inner_error = 0.0;
  bool inner_ok = true;
  auto inner = [&](double w) {
    std::vector<double> cuts;
    for (double x : nodes) {
      cuts.push_back(x);
      cuts.push_back(x - w);
    }
    auto density = [&](double u) {
      return intensity.value(u) * intensity.value(u + w) *
             std::exp(-(intensity.cumulative(u + w) - intensity.cumulative(u)));
    };
    const Integral r = integrate_pieces(density, cuts, intensity.start(), intensity.end() - w,
                                        q.rel_tol * 0.1, q.abs_tol * 0.1, q.max_depth);
    inner_error = std::max(inner_error, r.error);
    inner_ok = inner_ok && r.converged;
    return r.value;
  };
  auto outer = [&](double w) {
    const double f = gap_fn(w);
    return f == 0.0 ? 0.0 : f * inner(w);
  };

  std::vector<double> cuts;
  for (double b : breakpoints) {
    if (b > 0.0 && b < span) cuts.push_back(b);
  }
  if (nodes.size() <= 64) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::size_t j = i + 1; j < nodes.size(); ++j) cuts.push_back(nodes[j] - nodes[i]);
    }
  }
  Integral out = integrate_pieces(outer, cuts, 0.0, span, q.rel_tol, q.abs_tol, q.max_depth);
  out.error += inner_error * span;
  out.converged = out.converged && inner_ok;
  require_converged(out, "holding_time_functional");
  return out;
}

OracleReport mc_holding_time_functional(const std::function<double(double)>& gap_fn,
                                        const TabulatedIntensity& intensity,
                                        std::uint64_t n_samples, std::uint64_t seed,
                                        double target) {
  RunningStats stats;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    Rng rng = Rng::stream(seed, i);
    const auto times = intensity.sample(rng);
    double sum = 0.0;
    for (std::size_t k = 1; k < times.size(); ++k) sum += gap_fn(times[k] - times[k - 1]);
    stats.push(sum);
  }
  return stats.report(target);
}

// ---------------------------------------------------------------- KS tests

double kolmogorov_p_value(double statistic, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("kolmogorov_p_value needs n >= 1");
  const double rn = std::sqrt(static_cast<double>(n));
  const double lambda = (rn + 0.12 + 0.11 / rn) * statistic;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

ExitTimeReport mc_exit_time_law(double gamma, const CanonicalIntensity& model,
                                std::size_t capacity, double s, std::uint64_t n_reps,
                                std::uint64_t seed, const QuadratureConfig& q) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (capacity == 0) throw std::invalid_argument("capacity must be >= 1");
  if (n_reps == 0) throw std::invalid_argument("n_reps must be >= 1");
  const MissModel analytic = MissModel::from_intensity(model, q);
  const double c = static_cast<double>(capacity);
  const double t_high = characteristic_time(boost::math::gamma_q_inv(c, 1e-3) / gamma, analytic);
  const double spacing = 4.0 * t_high;
  const double horizon = 20.0 * t_high;

  constexpr std::uint64_t kPerTrace = 2000;
  ExitTimeReport report;
  for (std::uint64_t chunk = 0; chunk * kPerTrace < n_reps; ++chunk) {
    const std::uint64_t points = std::min(kPerTrace, n_reps - chunk * kPerTrace);
    const double first = s + static_cast<double>(chunk * kPerTrace) * spacing;
    const TimeWindow window{first, first + static_cast<double>(points - 1) * spacing + horizon};
    const RequestTrace trace = generate_trace(gamma, model, window, derive_seed(seed, chunk));
    for (std::uint64_t j = 0; j < points; ++j) {
      const double start = first + static_cast<double>(j) * spacing;
      if (const auto exit = estimate_exit_time(trace, start, capacity)) {
        report.exit_times.push_back(*exit - start);
      } else {
        ++report.n_censored;
      }
    }
  }
  report.n_samples = report.exit_times.size();
  report.excessive_censoring =
      static_cast<double>(report.n_censored) > 0.05 * static_cast<double>(n_reps);
  if (report.exit_times.empty()) return report;
  std::sort(report.exit_times.begin(), report.exit_times.end());
  auto cdf = [&](double x) {
    return x <= 0.0 ? 0.0 : boost::math::gamma_p(c, gamma * analytic.cumulative(x).value);
  };
  report.ks_statistic = ks_statistic(report.exit_times, cdf);
  report.p_value = kolmogorov_p_value(report.ks_statistic, report.n_samples);
  return report;
}

std::vector<OracleReport> mc_distinct_documents(double gamma, const CanonicalIntensity& model,
                                                const std::vector<double>& lengths,
                                                std::uint64_t n_reps,
                                                std::uint64_t windows_per_rep,
                                                std::uint64_t seed, const QuadratureConfig& q) {
  if (lengths.empty()) throw std::invalid_argument("no window lengths given");
  if (n_reps == 0 || windows_per_rep == 0) {
    throw std::invalid_argument("n_reps and windows_per_rep must be >= 1");
  }
  std::vector<double> sorted = lengths;
  std::sort(sorted.begin(), sorted.end());
  if (!(sorted.front() > 0.0)) throw std::invalid_argument("window lengths must be positive");
  const double spacing = sorted.back();

  std::vector<RunningStats> across(sorted.size());
  for (std::uint64_t rep = 0; rep < n_reps; ++rep) {
    const TimeWindow window{0.0, spacing * static_cast<double>(windows_per_rep)};
    const RequestTrace trace = generate_trace(gamma, model, window, derive_seed(seed, rep));
    std::vector<double> totals(sorted.size(), 0.0);
    auto it = trace.events.begin();
    std::unordered_set<DocId> seen;
    for (std::uint64_t w = 0; w < windows_per_rep; ++w) {
      const double start = spacing * static_cast<double>(w);
      while (it != trace.events.end() && it->time < start) ++it;
      seen.clear();
      auto scan = it;
      for (std::size_t k = 0; k < sorted.size(); ++k) {
        const double stop = start + sorted[k];
        for (; scan != trace.events.end() && scan->time <= stop; ++scan) {
          seen.insert(scan->doc);
        }
        totals[k] += static_cast<double>(seen.size());
      }
    }
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      across[k].push(totals[k] / static_cast<double>(windows_per_rep) / gamma);
    }
  }

  const MissModel analytic = MissModel::from_intensity(model, q);
  std::vector<OracleReport> out;
  for (double t : lengths) {
    const auto k = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
    out.push_back(across[k].report(analytic.cumulative(t).value));
  }
  return out;
}

}  // namespace lrucluster

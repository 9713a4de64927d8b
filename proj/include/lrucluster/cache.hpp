#pragma once

#include <cstdint>
#include <list>
#include <optional>
#include <unordered_map>
#include <vector>

#include "lrucluster/traffic.hpp"

namespace lrucluster {

/// LRU recency list: most recent first, O(1) membership and move-to-front.
class LruCache {
 public:
  /// Throws std::invalid_argument for capacity 0.
  explicit LruCache(std::size_t capacity);

  /// Records a request; returns true on a hit. A miss inserts at the front
  /// and evicts the least recent document when over capacity.
  bool access(DocId doc);

  bool contains(DocId doc) const { return index_.contains(doc); }
  std::size_t size() const noexcept { return order_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  /// Documents from most to least recent.
  std::vector<DocId> contents() const { return {order_.begin(), order_.end()}; }

 private:
  std::size_t capacity_;
  std::list<DocId> order_;
  std::unordered_map<DocId, std::list<DocId>::iterator> index_;
};

/// TTL cache: a request at u hits iff the same document was requested in
/// [u - t, u].
class TtlCache {
 public:
  /// Throws std::invalid_argument for negative or NaN eviction times.
  explicit TtlCache(double eviction_time);

  bool access(DocId doc, double time);
  bool contains(DocId doc, double time) const;
  double eviction_time() const noexcept { return eviction_time_; }

 private:
  double eviction_time_;
  std::unordered_map<DocId, double> last_seen_;
};

struct DocTally {
  std::uint64_t requests = 0;
  std::uint64_t misses = 0;
};

struct SimStats {
  std::uint64_t total_requests = 0;
  std::uint64_t misses = 0;
  std::uint64_t first_request_misses = 0;
  /// Filled only when per-document tracking is requested.
  std::unordered_map<DocId, DocTally> per_doc;

  std::uint64_t hits() const noexcept { return total_requests - misses; }
  double hit_ratio() const noexcept {
    return total_requests == 0 ? 0.0
                               : static_cast<double>(hits()) / static_cast<double>(total_requests);
  }
  SimStats& operator+=(const SimStats& other);
};

/// Replays the trace through an LRU cache of the given capacity.
/// Throws std::invalid_argument for unsorted traces or capacity 0.
SimStats lru_process(const RequestTrace& trace, std::size_t capacity, bool per_doc = false);

/// Replays the trace through a TTL cache. Throws for t < 0.
SimStats ttl_process(const RequestTrace& trace, double eviction_time, bool per_doc = false);

/// Misses of every LRU capacity 1..max_capacity in one pass, from LRU stack
/// distances (a request hits a size-C cache iff its stack distance is <= C).
struct LruMissCurve {
  std::uint64_t total_requests = 0;
  std::uint64_t cold_misses = 0;
  /// misses[C] for C in [1, max_capacity]; misses[0] == total_requests.
  std::vector<std::uint64_t> misses;

  double hit_ratio(std::size_t capacity) const;
};

LruMissCurve lru_miss_curve(const RequestTrace& trace, std::size_t max_capacity);

/// Stack distance of every request (1 = re-request of the most recent
/// document); 0 marks a first request.
std::vector<std::uint64_t> lru_stack_distances(const RequestTrace& trace);

/// Number of distinct documents with at least one request in [s, t].
/// Throws std::out_of_range unless window.start <= s <= t <= window.end.
std::size_t measure_distinct(const RequestTrace& trace, double s, double t);

/// First time u >= s at which C distinct documents (other than `exclude`)
/// have been requested in [s, u]; nullopt when the window ends first.
std::optional<double> estimate_exit_time(const RequestTrace& trace, double s,
                                         std::size_t capacity,
                                         std::optional<DocId> exclude = std::nullopt);

}  // namespace lrucluster

#include "lrucluster/cache.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace lrucluster {

namespace {

void require_sorted(const RequestTrace& trace) {
  if (!trace.is_sorted()) throw std::invalid_argument("trace must be sorted by time");
}

// Maps document ids onto 0..n-1 in order of first appearance.
std::vector<std::uint32_t> dense_ids(const RequestTrace& trace, std::size_t& n_docs) {
  std::vector<std::uint32_t> out(trace.events.size());
  DocId max_id = 0;
  for (const auto& e : trace.events) max_id = std::max(max_id, e.doc);
  n_docs = 0;
  if (max_id < 8 * trace.events.size() + 1024) {
    std::vector<std::uint32_t> table(max_id + 1, UINT32_MAX);
    for (std::size_t i = 0; i < out.size(); ++i) {
      auto& slot = table[trace.events[i].doc];
      if (slot == UINT32_MAX) slot = static_cast<std::uint32_t>(n_docs++);
      out[i] = slot;
    }
  } else {
    std::unordered_map<DocId, std::uint32_t> table;
    table.reserve(trace.events.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      auto [it, fresh] = table.try_emplace(trace.events[i].doc, static_cast<std::uint32_t>(n_docs));
      if (fresh) ++n_docs;
      out[i] = it->second;
    }
  }
  return out;
}

void tally(SimStats& stats, DocId doc, bool hit, bool first, bool per_doc) {
  ++stats.total_requests;
  if (!hit) ++stats.misses;
  if (first) ++stats.first_request_misses;
  if (per_doc) {
    auto& d = stats.per_doc[doc];
    ++d.requests;
    if (!hit) ++d.misses;
  }
}

}  // namespace

LruCache::LruCache(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("LRU capacity must be >= 1");
  index_.reserve(capacity + 1);
}

bool LruCache::access(DocId doc) {
  if (auto it = index_.find(doc); it != index_.end()) {
    order_.splice(order_.begin(), order_, it->second);
    return true;
  }
  order_.push_front(doc);
  index_.emplace(doc, order_.begin());
  if (order_.size() > capacity_) {
    index_.erase(order_.back());
    order_.pop_back();
  }
  return false;
}

TtlCache::TtlCache(double eviction_time) : eviction_time_(eviction_time) {
  if (!(eviction_time >= 0.0)) throw std::invalid_argument("TTL eviction time must be >= 0");
}

bool TtlCache::contains(DocId doc, double time) const {
  const auto it = last_seen_.find(doc);
  return it != last_seen_.end() && time - it->second <= eviction_time_;
}

bool TtlCache::access(DocId doc, double time) {
  const bool hit = contains(doc, time);
  last_seen_[doc] = time;
  return hit;
}

SimStats& SimStats::operator+=(const SimStats& other) {
  total_requests += other.total_requests;
  misses += other.misses;
  first_request_misses += other.first_request_misses;
  for (const auto& [doc, t] : other.per_doc) {
    auto& mine = per_doc[doc];
    mine.requests += t.requests;
    mine.misses += t.misses;
  }
  return *this;
}

SimStats lru_process(const RequestTrace& trace, std::size_t capacity, bool per_doc) {
  require_sorted(trace);
  LruCache cache(capacity);
  SimStats stats;
  std::unordered_set<DocId> seen;
  for (const auto& e : trace.events) {
    const bool first = seen.insert(e.doc).second;
    tally(stats, e.doc, cache.access(e.doc), first, per_doc);
  }
  return stats;
}

SimStats ttl_process(const RequestTrace& trace, double eviction_time, bool per_doc) {
  require_sorted(trace);
  TtlCache cache(eviction_time);
  SimStats stats;
  std::unordered_set<DocId> seen;
  for (const auto& e : trace.events) {
    const bool first = seen.insert(e.doc).second;
    tally(stats, e.doc, cache.access(e.doc, e.time), first, per_doc);
  }
  return stats;
}

std::vector<std::uint64_t> lru_stack_distances(const RequestTrace& trace) {
  require_sorted(trace);
  std::size_t n_docs = 0;
  const auto ids = dense_ids(trace, n_docs);
  const std::size_t n = ids.size();
  // Fenwick tree over request positions; position i is marked while it is
  // the latest request of its document.
  std::vector<std::uint32_t> tree(n + 1, 0);
  auto add = [&](std::size_t pos, int delta) {
    for (std::size_t i = pos + 1; i <= n; i += i & (~i + 1)) tree[i] += delta;
  };
  auto prefix = [&](std::size_t pos) {  // marks in [0, pos)
    std::uint64_t s = 0;
    for (std::size_t i = pos; i > 0; i -= i & (~i + 1)) s += tree[i];
    return s;
  };
  std::vector<std::int64_t> last(n_docs, -1);
  std::vector<std::uint64_t> distance(n, 0);
  std::uint64_t marked = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = ids[i];
    if (last[d] >= 0) {
      const auto prev = static_cast<std::size_t>(last[d]);
      distance[i] = marked - prefix(prev + 1) + 1;
      add(prev, -1);
      --marked;
    }
    add(i, +1);
    ++marked;
    last[d] = static_cast<std::int64_t>(i);
  }
  return distance;
}

double LruMissCurve::hit_ratio(std::size_t capacity) const {
  if (capacity == 0 || capacity >= misses.size()) {
    throw std::out_of_range("capacity outside the computed miss curve");
  }
  if (total_requests == 0) return 0.0;
  return 1.0 - static_cast<double>(misses[capacity]) / static_cast<double>(total_requests);
}

LruMissCurve lru_miss_curve(const RequestTrace& trace, std::size_t max_capacity) {
  if (max_capacity == 0) throw std::invalid_argument("max_capacity must be >= 1");
  const auto distances = lru_stack_distances(trace);
  LruMissCurve curve;
  curve.total_requests = distances.size();
  // histogram[k] = requests with stack distance k (k <= max_capacity),
  // histogram[max_capacity + 1] collects everything deeper.
  std::vector<std::uint64_t> histogram(max_capacity + 2, 0);
  for (auto d : distances) {
    if (d == 0) {
      ++curve.cold_misses;
    } else {
      ++histogram[std::min<std::uint64_t>(d, max_capacity + 1)];
    }
  }
  curve.misses.assign(max_capacity + 1, 0);
  curve.misses[0] = curve.total_requests;
  std::uint64_t deeper = histogram[max_capacity + 1];
  for (std::size_t c = max_capacity; c >= 1; --c) {
    curve.misses[c] = curve.cold_misses + deeper;
    deeper += histogram[c];
  }
  return curve;
}

std::size_t measure_distinct(const RequestTrace& trace, double s, double t) {
  if (!(trace.window.start <= s && s <= t && t <= trace.window.end)) {
    throw std::out_of_range("measure_distinct: [s, t] must lie inside the trace window");
  }
  auto by_time = [](const Request& r, double v) { return r.time < v; };
  auto first = std::lower_bound(trace.events.begin(), trace.events.end(), s, by_time);
  std::unordered_set<DocId> docs;
  for (auto it = first; it != trace.events.end() && it->time <= t; ++it) docs.insert(it->doc);
  return docs.size();
}

std::optional<double> estimate_exit_time(const RequestTrace& trace, double s,
                                         std::size_t capacity, std::optional<DocId> exclude) {
  if (!(trace.window.start <= s && s <= trace.window.end)) {
    throw std::out_of_range("estimate_exit_time: s must lie inside the trace window");
  }
  if (capacity == 0) return s;
  auto by_time = [](const Request& r, double v) { return r.time < v; };
  auto it = std::lower_bound(trace.events.begin(), trace.events.end(), s, by_time);
  std::unordered_set<DocId> docs;
  docs.reserve(capacity * 2);
  for (; it != trace.events.end(); ++it) {
    if (exclude && it->doc == *exclude) continue;
    docs.insert(it->doc);
    if (docs.size() == capacity) return it->time;
  }
  return std::nullopt;
}

}  // namespace lrucluster

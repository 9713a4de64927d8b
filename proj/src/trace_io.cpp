#include "lrucluster/trace_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace lrucluster {

void write_trace_csv(const RequestTrace& trace, std::ostream& out) {
  out << "time,doc_id\n";
  char buf[64];
  for (const auto& e : trace.events) {
    const int n = std::snprintf(buf, sizeof buf, "%.17g,%llu\n", e.time,
                                static_cast<unsigned long long>(e.doc));
    out.write(buf, n);
  }
}

void write_trace_csv(const RequestTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_trace_csv(trace, out);
  if (!out) throw std::runtime_error("failed writing " + path);
}

RequestTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trace file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "time,doc_id") throw std::runtime_error("trace header must be 'time,doc_id'");

  RequestTrace trace;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("row " + std::to_string(row) + ": expected 'time,doc_id'");
    }
    Request r;
    const char* begin = line.data();
    const char* end = begin + line.size();
    auto [p1, e1] = std::from_chars(begin, begin + comma, r.time);
    auto [p2, e2] = std::from_chars(begin + comma + 1, end, r.doc);
    if (e1 != std::errc{} || p1 != begin + comma || e2 != std::errc{} || p2 != end) {
      throw std::runtime_error("row " + std::to_string(row) + ": malformed value");
    }
    trace.events.push_back(r);
  }
  if (!trace.is_sorted()) throw std::runtime_error("trace rows are not sorted by time");
  if (!trace.events.empty()) {
    trace.window = {trace.events.front().time, trace.events.back().time};
  }
  return trace;
}

RequestTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_trace_csv(in);
}

}  // namespace lrucluster

#pragma once

#include <iosfwd>
#include <string>

#include "lrucluster/traffic.hpp"

namespace lrucluster {

/// Writes `time,doc_id` rows, times with 17 significant digits.
void write_trace_csv(const RequestTrace& trace, std::ostream& out);
void write_trace_csv(const RequestTrace& trace, const std::string& path);

/// Reads the format written by write_trace_csv. The window is set to the
/// span of the event times. Throws std::runtime_error on malformed input
/// or unsorted rows.
RequestTrace read_trace_csv(std::istream& in);
RequestTrace read_trace_csv(const std::string& path);

}  // namespace lrucluster

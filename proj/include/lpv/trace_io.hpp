#pragma once

#include <iosfwd>
#include <string>

#include "lpv/model.hpp"

namespace lpv {

struct TraceParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Wire format: one JSON object per line.  First line is the version
// header {"trace_version":1,"family":"lazy"|"hoh"}, then one line per
// event with fields {seq, thread, method, kind, node?, field?, value?,
// anchor?}.
void write_trace(std::ostream& os, const Execution& ex);
std::string trace_to_string(const Execution& ex);

Execution read_trace(std::istream& is);
Execution trace_from_string(const std::string& text);

}  // namespace lpv

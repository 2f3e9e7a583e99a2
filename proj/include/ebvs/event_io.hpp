#pragma once

#include <cstdio>
#include <iosfwd>
#include <string>
#include <vector>

#include "ebvs/event.hpp"

namespace ebvs {

// v1 event file format, one event per ASCII line:
//   # ebvs-events v1 width=<W> height=<H>
//   t_us,u,v,pol
// with pol in {0,1} (0 = negative polarity). Lines are non-decreasing in t_us.

struct EventFile {
    int width = 0;
    int height = 0;
    std::vector<Event> events;
};

/// Parses a v1 stream. Throws std::runtime_error on malformed input and
/// ContractViolation on out-of-bounds pixels or decreasing timestamps.
EventFile read_event_file(std::istream& in);
EventFile read_event_file(const std::string& path);

void write_event_header(std::ostream& out, int width, int height);
void write_event_line(std::ostream& out, const Event& e);
void write_event_file(const std::string& path, int width, int height,
                      const std::vector<Event>& events);

}  // namespace ebvs

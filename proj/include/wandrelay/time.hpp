#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace wandrelay {

using Millis = std::chrono::milliseconds;
using Timestamp = std::chrono::sys_time<Millis>;

// RFC 3339, always UTC with a trailing 'Z'. Fractional seconds are written
// (as milliseconds) only when non-zero, so whole-second times stay short.
std::string format_rfc3339(Timestamp t);

// Accepts 'Z' or a numeric offset and up to nanosecond fractions (truncated
// to milliseconds). Throws Error{ParseError} on malformed input.
Timestamp parse_rfc3339(std::string_view text);

inline Millis seconds_to_millis(double seconds) {
    return Millis{static_cast<Millis::rep>(seconds * 1000.0 + (seconds >= 0 ? 0.5 : -0.5))};
}

inline double millis_to_seconds(Millis d) { return static_cast<double>(d.count()) / 1000.0; }

}  // namespace wandrelay

#pragma once

#include "seebench/domain.hpp"
#include "seebench/simulator.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace seebench::io {

inline constexpr int kEventLogFormatVersion = 1;

/// Campaign context needed to interpret an event log on its own: the phase
/// timeline and the GPIO test cycle give the watchdog test windows.
struct EventLogHeader {
    int format_version = kEventLogFormatVersion;
    std::string campaign_id;
    std::string config_digest;
    std::uint64_t seed = 0;
    double duration = 0.0;
    double gpio_cycle = 40.0;
    double gpio_window = 30.0;
    std::vector<sim::PhaseSegment> segments;

    std::vector<TimeWindow> test_windows() const;
    friend bool operator==(const EventLogHeader&, const EventLogHeader&) = default;
};

/// `#` header lines followed by "t,kind,payload" lines; times and payloads
/// use the shortest exact decimal form. Returns bytes written.
std::size_t write_event_log(const EventLog& events, const EventLogHeader& header, std::ostream& sink);

struct EventLogFile {
    EventLogHeader header;
    EventLog events;
};

EventLogFile parse_event_log(std::istream& source);

}  // namespace seebench::io

#pragma once

#include "seebench/domain.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace seebench::io {

inline constexpr int kTelemetryFormatVersion = 1;

struct TelemetryFileHeader {
    int format_version = kTelemetryFormatVersion;
    std::string campaign_id;
    std::string config_digest;
    std::vector<std::string> channel_order;  // channel labels, board order
    double tick = 0.1;
    std::string start_timestamp = "1970-01-01T00:00:00Z";

    friend bool operator==(const TelemetryFileHeader&, const TelemetryFileHeader&) = default;
};

/// Labels of the default channel set, e.g. "I_IO[6]".
std::vector<std::string> default_channel_order();

/// Writes one header line then one comma-separated line per record:
/// t, 14 currents (mA, 3 decimals, empty while unpowered), sum (A, 4 decimals),
/// phase, heartbeat (0/1), power (0/1). Returns the bytes written; throws
/// SinkError carrying the byte offset of the line that failed.
std::size_t write_telemetry(const std::vector<TelemetryRecord>& records, const TelemetryFileHeader& header,
                            std::ostream& sink);

struct TelemetryFile {
    TelemetryFileHeader header;
    std::vector<TelemetryRecord> records;
};

/// Inverse of write_telemetry. The record sum is recomputed from the channel
/// values; the written sum must agree with it at its printed precision.
/// Throws ParseError with the 1-based line number, UnsupportedVersionError
/// for any version other than 1.
TelemetryFile parse_telemetry(std::istream& source);

}  // namespace seebench::io

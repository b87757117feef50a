#include "seebench/io/event_log.hpp"

#include "seebench/errors.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <istream>
#include <ostream>

namespace seebench::io {

namespace {

constexpr std::string_view kMagic = "# seebench-events ";
constexpr std::string_view kSegment = "# segment ";

}  // namespace

std::vector<TimeWindow> EventLogHeader::test_windows() const {
    return sim::gpio_test_windows(sim::PhaseTimeline{segments}, gpio_cycle, gpio_window);
}

std::size_t write_event_log(const EventLog& events, const EventLogHeader& header, std::ostream& sink) {
    detail::check_token(header.campaign_id, "campaign id");
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf),
                   "{}format_version={} campaign={} config_digest={} seed={} duration={} gpio_cycle={} gpio_window={}\n",
                   kMagic, header.format_version, header.campaign_id,
                   header.config_digest.empty() ? "-" : header.config_digest, header.seed, header.duration,
                   header.gpio_cycle, header.gpio_window);
    for (const auto& s : header.segments) {
        fmt::format_to(std::back_inserter(buf), "{}{} {} {}\n", kSegment, s.start, s.end, to_string(s.phase));
    }
    std::size_t written = 0;
    auto flush = [&] {
        sink.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (!sink) throw SinkError("event log sink write failed", written);
        written += buf.size();
        buf.clear();
    };
    flush();
    for (const auto& e : events) {
        fmt::format_to(std::back_inserter(buf), "{},{},{}\n", e.t, to_string(e.kind), e.payload);
        if (buf.size() > 1 << 16) flush();
    }
    flush();
    sink.flush();
    if (!sink) throw SinkError("event log sink flush failed", written);
    return written;
}

EventLogFile parse_event_log(std::istream& source) {
    EventLogFile file;
    std::string line;
    if (!std::getline(source, line)) throw ParseError("empty event log", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(kMagic, 0) != 0) throw ParseError("not an event log (bad header)", 1);
    auto kv = detail::parse_key_values(std::string_view(line).substr(kMagic.size()), 1);
    auto& h = file.header;
    auto version = detail::parse_u64(kv.get("format_version", 1), "format_version", 1);
    if (version != kEventLogFormatVersion) {
        throw UnsupportedVersionError(fmt::format("unsupported event log format_version {}", version), 1);
    }
    h.format_version = static_cast<int>(version);
    h.campaign_id = std::string(kv.get("campaign", 1));
    auto digest = kv.get("config_digest", 1);
    h.config_digest = digest == "-" ? std::string{} : std::string(digest);
    h.seed = detail::parse_u64(kv.get("seed", 1), "seed", 1);
    h.duration = detail::parse_double(kv.get("duration", 1), "duration", 1);
    h.gpio_cycle = detail::parse_double(kv.get("gpio_cycle", 1), "gpio_cycle", 1);
    h.gpio_window = detail::parse_double(kv.get("gpio_window", 1), "gpio_window", 1);

    std::size_t line_no = 1;
    bool saw_blank = false;
    while (std::getline(source, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            saw_blank = true;
            continue;
        }
        if (saw_blank) throw ParseError("blank line inside event data", line_no - 1);
        if (line.rfind(kSegment, 0) == 0) {
            if (!file.events.empty()) throw ParseError("segment line after events", line_no);
            auto parts = detail::split(std::string_view(line).substr(kSegment.size()), ' ');
            if (parts.size() != 3) throw ParseError("segment needs start, end and phase", line_no);
            sim::PhaseSegment s;
            s.start = detail::parse_double(parts[0], "segment start", line_no);
            s.end = detail::parse_double(parts[1], "segment end", line_no);
            try {
                s.phase = parse_phase(parts[2]);
            } catch (const std::exception&) {
                throw ParseError(fmt::format("bad phase '{}'", parts[2]), line_no);
            }
            h.segments.push_back(s);
            continue;
        }
        if (line.front() == '#') throw ParseError("unexpected header line", line_no);
        auto fields = detail::split(line, ',');
        if (fields.size() != 3) {
            throw ParseError(fmt::format("expected 3 fields (t,kind,payload), got {}", fields.size()), line_no);
        }
        Event e;
        e.t = detail::parse_double(fields[0], "time", line_no);
        try {
            e.kind = parse_event_kind(fields[1]);
        } catch (const std::exception&) {
            throw ParseError(fmt::format("unknown event kind '{}'", fields[1]), line_no);
        }
        e.payload = detail::parse_double(fields[2], "payload", line_no);
        try {
            file.events.append(e);
        } catch (const DomainError& err) {
            throw ParseError(err.what(), line_no);
        }
    }
    return file;
}

}  // namespace seebench::io

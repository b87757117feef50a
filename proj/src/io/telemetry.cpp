#include "seebench/io/telemetry.hpp"

#include "seebench/errors.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <cmath>
#include <istream>
#include <ostream>

namespace seebench::io {

namespace {

constexpr std::string_view kMagic = "# seebench-telemetry ";

void emit(std::ostream& sink, const fmt::memory_buffer& buf, std::size_t& written) {
    sink.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!sink) throw SinkError("telemetry sink write failed", written);
    written += buf.size();
}

}  // namespace

std::vector<std::string> default_channel_order() {
    std::vector<std::string> labels;
    for (const auto& ch : default_channels()) labels.push_back(ch.label());
    return labels;
}

std::size_t write_telemetry(const std::vector<TelemetryRecord>& records, const TelemetryFileHeader& header,
                            std::ostream& sink) {
    detail::check_token(header.campaign_id, "campaign id");
    detail::check_token(header.start_timestamp, "start timestamp");
    if (header.channel_order.size() != kChannelCount) {
        throw DomainError(fmt::format("expected {} channels in header, got {}", kChannelCount,
                                      header.channel_order.size()));
    }
    std::size_t written = 0;
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "{}format_version={} campaign={} config_digest={} tick={} start={} channels={}\n",
                   kMagic, header.format_version, header.campaign_id,
                   header.config_digest.empty() ? "-" : header.config_digest, header.tick, header.start_timestamp,
                   fmt::join(header.channel_order, ";"));
    emit(sink, buf, written);

    for (const auto& r : records) {
        if (r.power_on && r.currents_ma.size() != kChannelCount) {
            throw DomainError(fmt::format("record at t={} has {} currents, expected {}", r.t, r.currents_ma.size(),
                                          kChannelCount));
        }
        buf.clear();
        fmt::format_to(std::back_inserter(buf), "{:.3f}", r.t);
        for (std::size_t i = 0; i < kChannelCount; ++i) {
            if (r.power_on) {
                fmt::format_to(std::back_inserter(buf), ",{:.3f}", r.currents_ma[i]);
            } else {
                buf.push_back(',');
            }
        }
        fmt::format_to(std::back_inserter(buf), ",{:.4f},{},{},{}\n", r.current_sum_a, to_string(r.phase),
                       r.heartbeat_ok ? 1 : 0, r.power_on ? 1 : 0);
        emit(sink, buf, written);
    }
    sink.flush();
    if (!sink) throw SinkError("telemetry sink flush failed", written);
    return written;
}

TelemetryFile parse_telemetry(std::istream& source) {
    TelemetryFile file;
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(source, line)) throw ParseError("empty telemetry file", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(kMagic, 0) != 0) throw ParseError("not a telemetry file (bad header)", 1);

    auto kv = detail::parse_key_values(std::string_view(line).substr(kMagic.size()), 1);
    auto& h = file.header;
    auto version = detail::parse_u64(kv.get("format_version", 1), "format_version", 1);
    if (version != kTelemetryFormatVersion) {
        throw UnsupportedVersionError(fmt::format("unsupported telemetry format_version {}", version), 1);
    }
    h.format_version = static_cast<int>(version);
    h.campaign_id = std::string(kv.get("campaign", 1));
    auto digest = kv.get("config_digest", 1);
    h.config_digest = digest == "-" ? std::string{} : std::string(digest);
    h.tick = detail::parse_double(kv.get("tick", 1), "tick", 1);
    h.start_timestamp = std::string(kv.get("start", 1));
    for (auto label : detail::split(kv.get("channels", 1), ';')) h.channel_order.emplace_back(label);
    if (h.channel_order.size() != kChannelCount) {
        throw ParseError(fmt::format("expected {} channels in header, got {}", kChannelCount, h.channel_order.size()),
                         1);
    }
    if (h.channel_order != default_channel_order()) {
        throw ParseError("header channel order does not match the board pin order", 1);
    }

    bool saw_blank = false;
    while (std::getline(source, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            saw_blank = true;
            continue;
        }
        if (saw_blank) throw ParseError("blank line inside telemetry data", line_no - 1);

        auto fields = detail::split(line, ',');
        if (fields.size() < 5 || fields.size() - 5 != kChannelCount) {
            throw ParseError(fmt::format("expected {} channels, got {}", kChannelCount,
                                         fields.size() < 5 ? 0 : fields.size() - 5),
                             line_no);
        }
        TelemetryRecord r;
        r.t = detail::parse_double(fields[0], "time", line_no);
        if (!file.records.empty() && !(r.t > file.records.back().t)) {
            throw ParseError(fmt::format("time {} is not after the previous record", fields[0]), line_no);
        }
        const std::size_t n = fields.size();
        double written_sum = detail::parse_double(fields[n - 4], "current sum", line_no);
        try {
            r.phase = parse_phase(fields[n - 3]);
        } catch (const std::exception&) {
            throw ParseError(fmt::format("bad phase '{}'", fields[n - 3]), line_no);
        }
        r.heartbeat_ok = detail::parse_flag(fields[n - 2], "heartbeat", line_no);
        r.power_on = detail::parse_flag(fields[n - 1], "power", line_no);

        double sum_ma = 0.0;
        if (r.power_on) {
            r.currents_ma.reserve(kChannelCount);
            for (std::size_t i = 0; i < kChannelCount; ++i) {
                double ma = detail::parse_double(fields[1 + i], "current", line_no);
                r.currents_ma.push_back(ma);
                sum_ma += ma;
            }
        } else {
            for (std::size_t i = 0; i < kChannelCount; ++i) {
                if (!fields[1 + i].empty()) throw ParseError("current present while power is off", line_no);
            }
        }
        r.current_sum_a = sum_ma / 1000.0;
        if (std::abs(written_sum - r.current_sum_a) > 0.5e-4 + 1e-9) {
            throw ParseError(fmt::format("current sum {} does not match channels ({:.4f} A)", fields[n - 4],
                                         r.current_sum_a),
                             line_no);
        }
        file.records.push_back(std::move(r));
    }
    return file;
}

}  // namespace seebench::io

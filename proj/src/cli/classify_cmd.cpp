#include "seebench/cli/commands.hpp"

#include "seebench/errors.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <fstream>
#include <ostream>

namespace seebench::cli {

namespace {

struct LoadedLog {
    std::string campaign;
    classify::ResetLog log;
};

LoadedLog load_log(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw ParseError(fmt::format("cannot open '{}'", path.string()), 0);
    auto file = io::parse_event_log(f);
    return {file.header.campaign_id,
            classify::reset_log_from_events(file.events, file.header.test_windows(), file.header.duration)};
}

}  // namespace

std::string verdict_csv_header() {
    return "sample,status,irradiation_resets,radiationless_resets,irradiation_runs,radiationless_runs,break_time_s,"
           "break_context";
}

std::string verdict_csv_row(std::string_view sample, const classify::HealthVerdict& v) {
    return fmt::format("{},{},{},{},{},{},{},{}", sample, to_string(v.status), v.irradiation_resets,
                       v.radiationless_resets, v.irradiation_runs.size(), v.radiationless_runs.size(),
                       v.break_time ? fmt::format("{}", *v.break_time) : "n/a",
                       v.break_context ? std::string(classify::to_string(*v.break_context)) : "n/a");
}

int cmd_classify(const ClassifyOptions& o, std::ostream& out, std::ostream& err) {
    if (o.params.period <= 0.0 || o.params.tolerance < 0.0 || o.params.min_count < 2) {
        fmt::print(err, "error: need period > 0, tolerance >= 0 and min-run >= 2\n");
        return kUsage;
    }
    LoadedLog irr;
    LoadedLog radless;
    try {
        if (o.irradiation) irr = load_log(*o.irradiation);
        if (o.radiationless) radless = load_log(*o.radiationless);
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kDataError;
    }
    auto verdict = classify::chip_status(irr.log, radless.log, o.params);
    std::string sample = !irr.campaign.empty() ? irr.campaign : radless.campaign;
    if (sample.empty()) sample = "-";
    auto row = verdict_csv_row(sample, verdict);
    fmt::print(out, "{}\n{}\n", verdict_csv_header(), row);
    if (o.out) {
        std::ofstream f(*o.out);
        fmt::print(f, "{}\n{}\n", verdict_csv_header(), row);
        if (!f) {
            fmt::print(err, "error: cannot write {}\n", o.out->string());
            return kDataError;
        }
    }
    return kOk;
}

}  // namespace seebench::cli

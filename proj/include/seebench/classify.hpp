#pragma once

#include "seebench/domain.hpp"
#include "seebench/quantity.hpp"
#include "seebench/simulator.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace seebench::classify {

/// Consecutive resets spaced by the broken-chip period.
struct ResetRun {
    double start = 0.0;
    int count = 0;
    double mean_interval = 0.0;
    double interval_stddev = 0.0;
};

struct RunParams {
    double period = 7.0;
    double tolerance = 1.0;
    int min_count = 5;
};

/// Maximal chains of resets whose successive intervals lie in
/// period ± tolerance, keeping those with at least `min_count` resets.
std::vector<ResetRun> detect_reset_runs(std::span<const double> reset_times, double period, double tolerance,
                                        int min_count);

inline std::vector<ResetRun> detect_reset_runs(std::span<const double> reset_times, const RunParams& p) {
    return detect_reset_runs(reset_times, p.period, p.tolerance, p.min_count);
}

/// Resets seen in one test context, with the GPIO test windows in which the
/// watchdog was armed. A log with no windows is treated as one window spanning it.
struct ResetLog {
    std::vector<double> resets;
    std::vector<TimeWindow> test_windows;
    double end_time = 0.0;

    bool performed() const { return end_time > 0.0 || !resets.empty() || !test_windows.empty(); }
};

/// HardReset and SoftReset times of `events`, windows from the campaign timeline.
ResetLog reset_log_from_events(const EventLog& events, std::vector<TimeWindow> windows, double end_time);

enum class Context { Irradiation, Radiationless };

std::string_view to_string(Context context);

struct HealthVerdict {
    Health status = Health::Fine;
    std::size_t irradiation_resets = 0;
    std::size_t radiationless_resets = 0;
    std::vector<ResetRun> irradiation_runs;
    std::vector<ResetRun> radiationless_runs;
    std::optional<double> break_time;
    std::optional<Context> break_context;
};

/// Broken when, in the latest context tested, the last two GPIO windows long
/// enough to host a run both hold one; Damaged when the radiation-less test
/// shows any reset otherwise; Fine else.
HealthVerdict chip_status(const ResetLog& irradiation, const ResetLog& radiationless, const RunParams& params = {});

/// Pass when the absorbed current agrees within the summed tolerances and
/// the memory image digest is unchanged.
bool test_passed(const Quantity& pre_current, const Quantity& post_current, std::string_view eeprom_pre,
                 std::string_view eeprom_post);

struct FluxSegment {
    double start = 0.0;
    double end = 0.0;
    double flux = 0.0;
};

/// Piecewise-constant beam flux seen by the DUT over a campaign.
struct FluxProfile {
    std::vector<FluxSegment> segments;

    double start() const { return segments.empty() ? 0.0 : segments.front().start; }
    double end() const { return segments.empty() ? 0.0 : segments.back().end; }
};

FluxProfile flux_profile(const sim::PhaseTimeline& timeline, double beam_flux);

/// Fluence delivered up to `break_time`.
double estimate_break_fluence(double break_time, const FluxProfile& profile);

}  // namespace seebench::classify

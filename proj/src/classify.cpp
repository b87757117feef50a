#include "seebench/classify.hpp"

#include "seebench/errors.hpp"

#include <algorithm>
#include <cmath>

namespace seebench::classify {

namespace {

ResetRun summarize(std::span<const double> chain) {
    ResetRun run;
    run.start = chain.front();
    run.count = static_cast<int>(chain.size());
    const double n = static_cast<double>(chain.size() - 1);
    run.mean_interval = (chain.back() - chain.front()) / n;
    double ss = 0.0;
    for (std::size_t i = 1; i < chain.size(); ++i) {
        const double d = chain[i] - chain[i - 1] - run.mean_interval;
        ss += d * d;
    }
    run.interval_stddev = std::sqrt(ss / n);
    return run;
}

std::vector<double> resets_in(const ResetLog& log, const TimeWindow& w) {
    std::vector<double> out;
    for (double t : log.resets) {
        if (w.contains(t)) {
            out.push_back(t);
        }
    }
    return out;
}

std::vector<TimeWindow> windows_of(const ResetLog& log) {
    if (!log.test_windows.empty()) {
        return log.test_windows;
    }
    const double end = log.resets.empty() ? log.end_time : std::max(log.end_time, log.resets.back() + 1.0);
    return {TimeWindow{0.0, end}};
}

struct WindowScan {
    std::vector<ResetRun> runs;
    std::vector<bool> qualifies;  // per window
    std::vector<bool> eligible;
};

WindowScan scan(const ResetLog& log, const RunParams& p) {
    WindowScan out;
    for (const auto& w : windows_of(log)) {
        const auto times = resets_in(log, w);
        const auto runs = detect_reset_runs(times, p);
        out.runs.insert(out.runs.end(), runs.begin(), runs.end());
        out.qualifies.push_back(!runs.empty());
        out.eligible.push_back(w.length() + p.tolerance >= (p.min_count - 1) * p.period || !runs.empty());
    }
    return out;
}

}  // namespace

std::string_view to_string(Context context) {
    return context == Context::Irradiation ? "irradiation" : "radiationless";
}

std::vector<ResetRun> detect_reset_runs(std::span<const double> times, double period, double tolerance,
                                        int min_count) {
    if (!(period > 0.0)) {
        throw DomainError("detect_reset_runs: period must be > 0");
    }
    if (!(tolerance >= 0.0)) {
        throw DomainError("detect_reset_runs: tolerance must be >= 0");
    }
    if (min_count < 2) {
        throw DomainError("detect_reset_runs: min_count must be >= 2");
    }
    if (!std::is_sorted(times.begin(), times.end())) {
        throw DomainError("detect_reset_runs: reset times must be sorted");
    }
    std::vector<ResetRun> runs;
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= times.size(); ++i) {
        const bool linked = i < times.size() && std::abs(times[i] - times[i - 1] - period) <= tolerance;
        if (linked) {
            continue;
        }
        if (i - begin >= static_cast<std::size_t>(min_count)) {
            runs.push_back(summarize(times.subspan(begin, i - begin)));
        }
        begin = i;
    }
    return runs;
}

ResetLog reset_log_from_events(const EventLog& events, std::vector<TimeWindow> windows, double end_time) {
    ResetLog log;
    for (const auto& e : events) {
        if (e.kind == EventKind::HardReset || e.kind == EventKind::SoftReset) {
            log.resets.push_back(e.t);
        }
    }
    log.test_windows = std::move(windows);
    log.end_time = end_time;
    return log;
}

HealthVerdict chip_status(const ResetLog& irradiation, const ResetLog& radiationless, const RunParams& params) {
    HealthVerdict v;
    v.irradiation_resets = irradiation.resets.size();
    v.radiationless_resets = radiationless.resets.size();

    const WindowScan irr = scan(irradiation, params);
    const WindowScan rad = scan(radiationless, params);
    v.irradiation_runs = irr.runs;
    v.radiationless_runs = rad.runs;

    const bool rad_latest = radiationless.performed();
    const ResetLog& latest = rad_latest ? radiationless : irradiation;
    const WindowScan& s = rad_latest ? rad : irr;
    const auto windows = windows_of(latest);

    // Trailing eligible windows must all hold a run; the last two decide.
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (s.eligible[i]) {
            eligible.push_back(i);
        }
    }
    const std::size_t needed = std::min<std::size_t>(2, eligible.size());
    bool broken = needed > 0;
    for (std::size_t k = eligible.size() - needed; k < eligible.size() && broken; ++k) {
        broken = s.qualifies[eligible[k]];
    }
    if (broken) {
        v.status = Health::Broken;
        std::size_t first = eligible.size() - 1;
        while (first > 0 && s.qualifies[eligible[first - 1]]) {
            --first;
        }
        const std::size_t w = eligible[first];
        const auto times = resets_in(latest, windows[w]);
        v.break_time = detect_reset_runs(times, params).front().start;
        // A break shortly before a window opens leaves a bunch cut short by the
        // end of that window; it belongs to the same run.
        if (w > 0) {
            const auto prev = resets_in(latest, windows[w - 1]);
            if (prev.size() >= 2 && windows[w - 1].end - prev.back() <= params.period + params.tolerance) {
                std::size_t chain = prev.size() - 1;
                while (chain > 0 && std::abs(prev[chain] - prev[chain - 1] - params.period) <= params.tolerance) {
                    --chain;
                }
                if (prev.size() - chain >= 2) v.break_time = prev[chain];
            }
        }
        v.break_context = rad_latest ? Context::Radiationless : Context::Irradiation;
    } else if (v.radiationless_resets > 0) {
        v.status = Health::Damaged;
    }
    return v;
}

bool test_passed(const Quantity& pre, const Quantity& post, std::string_view eeprom_pre,
                 std::string_view eeprom_post) {
    const Quantity post_same = post.in(pre.unit());
    const bool current_ok =
        std::abs(post_same.value() - pre.value()) <= pre.uncertainty() + post_same.uncertainty();
    return current_ok && eeprom_pre == eeprom_post;
}

FluxProfile flux_profile(const sim::PhaseTimeline& timeline, double beam_flux) {
    FluxProfile p;
    for (const auto& s : timeline.segments) {
        p.segments.push_back({s.start, s.end, s.phase == Phase::Gpio ? beam_flux : 0.0});
    }
    return p;
}

double estimate_break_fluence(double break_time, const FluxProfile& profile) {
    if (profile.segments.empty() || !(break_time >= profile.start()) || !(break_time <= profile.end())) {
        throw DomainError("estimate_break_fluence: break time outside the campaign");
    }
    double fluence = 0.0;
    for (const auto& s : profile.segments) {
        if (break_time <= s.start) {
            break;
        }
        fluence += s.flux * (std::min(break_time, s.end) - s.start);
    }
    return fluence;
}

}  // namespace seebench::classify

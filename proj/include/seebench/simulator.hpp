#pragma once

#include "seebench/domain.hpp"
#include "seebench/quantity.hpp"
#include "seebench/rng.hpp"

#include <string>
#include <vector>

namespace seebench::sim {

struct PhaseSegment {
    double start = 0.0;
    double end = 0.0;
    Phase phase = Phase::Gpio;  // Gpio or BeamMonitor

    friend bool operator==(const PhaseSegment&, const PhaseSegment&) = default;
};

/// Contiguous, non-overlapping segments covering [0, total_duration).
struct PhaseTimeline {
    std::vector<PhaseSegment> segments;

    double duration() const;
    /// Total time with the DUT in the beam.
    double gpio_time() const;
    double beam_monitor_time() const;
    Phase phase_at(double t) const;
};

PhaseTimeline generate_phase_timeline(const CampaignConfig& config);

/// GPIO test windows (watchdog armed): one per `cycle` inside every Gpio
/// segment, each `window` long, clipped at the segment end.
std::vector<TimeWindow> gpio_test_windows(const PhaseTimeline& timeline, double cycle, double window);

/// Fluence accrued by time `t`: beam flux while in a Gpio segment plus the
/// background at all times.
double cumulative_fluence(const PhaseTimeline& timeline, double beam_flux, double background, double t);

/// First time the cumulative fluence reaches `fluence`; +inf if never within the timeline.
double time_at_fluence(const PhaseTimeline& timeline, double beam_flux, double background, double fluence);

/// Sorted arrival times of a homogeneous Poisson process on [t0, t1).
std::vector<double> draw_event_times(double rate, double t0, double t1, RngStream& rng);

enum class WatchdogAction { None, HardReset };
enum class LatchupAction { None, SelPowerOff };

/// Hard reset once the heartbeat has been silent for strictly more than `timeout`.
WatchdogAction watchdog_check(double now, double last_heartbeat, double timeout);

/// Supply cut once the summed current strictly exceeds `threshold`.
LatchupAction latchup_check(double current_sum_a, double threshold_a);

struct DutState {
    Health health = Health::Fine;
    bool power_on = true;
    double last_heartbeat = 0.0;
    double accumulated_fluence = 0.0;
    std::vector<double> currents_ma;
};

/// Post-campaign annealing: a Broken chip whose profile allows recovery
/// clears its continuous-reset source after the recovery delay and is left Damaged.
DutState anneal(const DutState& state, double days, const DutProfile& profile);

struct RunOptions {
    bool record_telemetry = true;
};

struct CampaignResult {
    PhaseTimeline timeline;
    std::vector<TimeWindow> test_windows;
    std::vector<TelemetryRecord> telemetry;
    EventLog events;
    DutState final_state;
    std::string eeprom_pre;
    std::string eeprom_post;
    Quantity current_pre{0.0, Unit::MilliAmp};
    Quantity current_post{0.0, Unit::MilliAmp};
};

/// Runs one campaign. Deterministic in (config, config.seed).
CampaignResult run_campaign(const CampaignConfig& config, const RunOptions& options = {});

}  // namespace seebench::sim

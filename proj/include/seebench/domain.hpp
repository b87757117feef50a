#pragma once

#include "seebench/quantity.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace seebench {

inline constexpr std::size_t kChannelCount = 14;

enum class Species { Kr84, Kr78, AtmosphericNeutron };

std::string_view to_string(Species species);
Species parse_species(std::string_view text);
bool is_ion(Species species);

struct SpotGeometry {
    enum class Shape { Circle, Square };
    Shape shape = Shape::Circle;
    double size_mm = 20.0;  // diameter or side

    double area_cm2() const;
    friend bool operator==(const SpotGeometry&, const SpotGeometry&) = default;
};

struct BeamSpec {
    Species species = Species::Kr84;
    double energy_mev = 1678.24;
    double let = 45.0;           // MeV·cm²·mg⁻¹
    double nominal_flux = 0.0;   // cm⁻²·s⁻¹
    Quantity background_flux{20.0, 5.0, Unit::PerSquareCmSecond};
    SpotGeometry spot{};

    friend bool operator==(const BeamSpec&, const BeamSpec&) = default;
};

/// One monitored supply current. `pin` is the unique key ("EXTERNAL" for the Hall sensor).
struct Channel {
    std::string pin;
    std::string name;
    std::string description;
    double nominal_ma = 0.0;

    /// Name disambiguated by pin, e.g. "I_IO[6]".
    std::string label() const { return name + "[" + pin + "]"; }
    friend bool operator==(const Channel&, const Channel&) = default;
};

/// The fourteen monitored currents of the control board, in board order.
std::vector<Channel> default_channels();

enum class Health { Fine, Damaged, Broken };

std::string_view to_string(Health health);
Health parse_health(std::string_view text);

struct DutProfile {
    Quantity baseline_current{50.0, 0.5, Unit::MilliAmp};
    double broken_current_drop_ma = 1.5;
    std::map<Species, double> fw_block_cross_section;  // cm²
    std::map<Species, double> sel_cross_section;       // cm²
    double break_hazard = 0.0;   // per cm⁻² of accumulated fluence
    double damage_hazard = 0.0;  // per cm⁻², Fine -> Damaged
    double damaged_reset_rate = 8.0 / 7200.0;  // s⁻¹, spontaneous resets of a damaged chip
    double sel_surge_current_a = 1.5;
    double eeprom_flip_probability = 0.5;  // chance a Break corrupts the memory image
    bool anneal_recovery = false;
    double anneal_recovery_days = 60.0;
    std::string adc_pin = "58";
    std::vector<Channel> channels = default_channels();

    double fw_sigma(Species species) const;
    double sel_sigma(Species species) const;
    std::optional<std::size_t> adc_index() const;

    friend bool operator==(const DutProfile&, const DutProfile&) = default;
};

/// Alternating GPIO (DUT in beam) and beam-monitor (DUT out, scintillator in) phases.
struct PhasePlan {
    double gpio_duration = 600.0;
    double beam_monitor_duration = 40.0;
    bool single_phase = false;  // one Gpio segment covering the whole campaign

    friend bool operator==(const PhasePlan&, const PhasePlan&) = default;
};

struct CampaignConfig {
    std::string campaign_id = "campaign";
    BeamSpec beam{};
    DutProfile dut{};
    PhasePlan phase_plan{};
    double gpio_cycle = 40.0;
    double gpio_window = 30.0;
    double watchdog_timeout = 6.7;
    double reset_overhead = 0.3;
    double latchup_threshold = 1.0;  // A
    double latchup_deadtime = 2.0;
    double total_duration = 0.0;
    double temperature_c = 79.5;
    double temperature_tolerance_c = 1.0;
    std::uint64_t seed = 0;
    double tick = 0.1;
    Health initial_health = Health::Fine;
    std::optional<double> forced_break_time;

    friend bool operator==(const CampaignConfig&, const CampaignConfig&) = default;
};

struct Violation {
    std::string field;
    std::string rule;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// All invariant violations of `config`; empty when the config is usable.
std::vector<Violation> validate(const CampaignConfig& config);

/// Throws ValidationError listing every violation.
void require_valid(const CampaignConfig& config);

enum class Phase { Gpio, BeamMonitor, Off };

std::string_view to_string(Phase phase);
Phase parse_phase(std::string_view text);

struct TelemetryRecord {
    double t = 0.0;
    std::vector<double> currents_ma;  // kChannelCount entries, empty when power is off
    double current_sum_a = 0.0;
    bool heartbeat_ok = false;
    Phase phase = Phase::Gpio;
    bool power_on = false;

    friend bool operator==(const TelemetryRecord&, const TelemetryRecord&) = default;
};

enum class EventKind { FwBlock, Sel, HardReset, SoftReset, Break, PowerOff, PowerOn, ScintCount };

std::string_view to_string(EventKind kind);
EventKind parse_event_kind(std::string_view text);

/// `payload` carries the kind-specific number: particle count for ScintCount,
/// tripping current (A) for Sel, accumulated fluence for Break, else 0.
struct Event {
    double t = 0.0;
    EventKind kind = EventKind::FwBlock;
    double payload = 0.0;

    friend bool operator==(const Event&, const Event&) = default;
};

/// Time-ordered event sequence. Out-of-order insertion and a second Break are rejected.
class EventLog {
public:
    void append(const Event& event);
    void append(double t, EventKind kind, double payload = 0.0) { append(Event{t, kind, payload}); }

    const std::vector<Event>& events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }
    bool empty() const noexcept { return events_.empty(); }
    std::size_t count(EventKind kind) const;
    std::vector<double> times(EventKind kind) const;

    auto begin() const { return events_.begin(); }
    auto end() const { return events_.end(); }

    friend bool operator==(const EventLog&, const EventLog&) = default;

private:
    std::vector<Event> events_;
};

}  // namespace seebench

namespace seebench {

/// Half-open time interval [start, end) in seconds.
struct TimeWindow {
    double start = 0.0;
    double end = 0.0;

    double length() const noexcept { return end - start; }
    bool contains(double t) const noexcept { return t >= start && t < end; }
    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

}  // namespace seebench

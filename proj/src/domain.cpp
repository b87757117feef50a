#include "seebench/domain.hpp"

#include "seebench/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <utility>

namespace seebench {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::array<std::pair<Enum, std::string_view>, N>& table,
                const char* what) {
    for (const auto& [value, name] : table) {
        if (name == text) {
            return value;
        }
    }
    throw ParseError(std::string("unknown ") + what + " '" + std::string(text) + "'");
}

template <typename Enum, std::size_t N>
std::string_view enum_name(Enum value, const std::array<std::pair<Enum, std::string_view>, N>& table) {
    for (const auto& [v, name] : table) {
        if (v == value) {
            return name;
        }
    }
    return "?";
}

constexpr std::array<std::pair<Species, std::string_view>, 3> kSpecies{{
    {Species::Kr84, "Kr84"},
    {Species::Kr78, "Kr78"},
    {Species::AtmosphericNeutron, "AtmosphericNeutron"},
}};

constexpr std::array<std::pair<Health, std::string_view>, 3> kHealth{{
    {Health::Fine, "Fine"},
    {Health::Damaged, "Damaged"},
    {Health::Broken, "Broken"},
}};

constexpr std::array<std::pair<Phase, std::string_view>, 3> kPhases{{
    {Phase::Gpio, "Gpio"},
    {Phase::BeamMonitor, "BeamMonitor"},
    {Phase::Off, "Off"},
}};

constexpr std::array<std::pair<EventKind, std::string_view>, 8> kEventKinds{{
    {EventKind::FwBlock, "FwBlock"},
    {EventKind::Sel, "Sel"},
    {EventKind::HardReset, "HardReset"},
    {EventKind::SoftReset, "SoftReset"},
    {EventKind::Break, "Break"},
    {EventKind::PowerOff, "PowerOff"},
    {EventKind::PowerOn, "PowerOn"},
    {EventKind::ScintCount, "ScintCount"},
}};

}  // namespace

std::string_view to_string(Species species) { return enum_name(species, kSpecies); }
Species parse_species(std::string_view text) { return parse_enum(text, kSpecies, "species"); }
bool is_ion(Species species) { return species != Species::AtmosphericNeutron; }

std::string_view to_string(Health health) { return enum_name(health, kHealth); }
Health parse_health(std::string_view text) { return parse_enum(text, kHealth, "health"); }

std::string_view to_string(Phase phase) { return enum_name(phase, kPhases); }
Phase parse_phase(std::string_view text) { return parse_enum(text, kPhases, "phase"); }

std::string_view to_string(EventKind kind) { return enum_name(kind, kEventKinds); }
EventKind parse_event_kind(std::string_view text) { return parse_enum(text, kEventKinds, "event kind"); }

double SpotGeometry::area_cm2() const {
    const double size_cm = size_mm / 10.0;
    if (shape == Shape::Circle) {
        return std::numbers::pi * size_cm * size_cm / 4.0;
    }
    return size_cm * size_cm;
}

std::vector<Channel> default_channels() {
    // Nominal draws sum to the 50.0 mA absorbed by a healthy chip at 80 °C.
    return {
        {"6", "I_IO", "I/O pin", 1.5},
        {"16", "I_REG_0", "PMU regulator", 6.0},
        {"21", "I_IO", "I/O pin", 1.5},
        {"27", "I_OSC", "Internal oscillators", 2.0},
        {"50", "I_ADDR0", "ADC0 reference", 0.5},
        {"56", "I_ADDR1", "ADC1 reference", 0.5},
        {"58", "I_ADV", "Integrated ADC power supply", 4.0},
        {"72", "I_PMU", "Power Management Unit (PMU)", 3.0},
        {"91", "I_IO", "I/O pin", 1.5},
        {"95", "I_REG_1", "PMU regulator", 6.0},
        {"97", "I_FLA", "2MB Flash memory", 8.0},
        {"126", "I_IO", "I/O pin", 1.5},
        {"130", "I_REG_2", "PMU regulator", 6.0},
        {"EXTERNAL", "I_Hall", "Whole current monitor", 8.0},
    };
}

double DutProfile::fw_sigma(Species species) const {
    const auto it = fw_block_cross_section.find(species);
    return it == fw_block_cross_section.end() ? 0.0 : it->second;
}

double DutProfile::sel_sigma(Species species) const {
    const auto it = sel_cross_section.find(species);
    return it == sel_cross_section.end() ? 0.0 : it->second;
}

std::optional<std::size_t> DutProfile::adc_index() const {
    for (std::size_t i = 0; i < channels.size(); ++i) {
        if (channels[i].pin == adc_pin) {
            return i;
        }
    }
    return std::nullopt;
}

std::vector<Violation> validate(const CampaignConfig& c) {
    std::vector<Violation> out;
    auto check = [&out](bool ok, const char* field, const char* rule) {
        if (!ok) {
            out.push_back({field, rule});
        }
    };
    auto finite = [](double x) { return std::isfinite(x); };

    check(!c.campaign_id.empty() &&
              std::none_of(c.campaign_id.begin(), c.campaign_id.end(),
                           [](unsigned char ch) { return std::isspace(ch) != 0; }),
          "campaign_id", "non-empty without whitespace");

    const BeamSpec& b = c.beam;
    check(finite(b.let) && b.let >= 0.0, "beam.let", "let >= 0");
    check(finite(b.nominal_flux) && b.nominal_flux >= 0.0, "beam.nominal_flux", "nominal_flux >= 0");
    check(b.background_flux.unit() == Unit::PerSquareCmSecond, "beam.background_flux",
          "unit cm^-2 s^-1");
    check(b.background_flux.value() >= 0.0, "beam.background_flux", "background_flux >= 0");
    check(b.species != Species::AtmosphericNeutron || b.let == 0.0, "beam.let",
          "neutron beam has let = 0");
    check(finite(b.spot.size_mm) && b.spot.size_mm > 0.0, "beam.spot.size_mm", "size_mm > 0");

    const DutProfile& d = c.dut;
    check(d.channels.size() == kChannelCount, "dut.channels", "exactly 14 channels");
    check(d.baseline_current.unit() == Unit::MilliAmp, "dut.baseline_current", "unit mA");
    check(d.baseline_current.value() > d.broken_current_drop_ma, "dut.baseline_current",
          "baseline_current > broken_current_drop");
    check(d.broken_current_drop_ma >= 0.0, "dut.broken_current_drop", "broken_current_drop >= 0");
    check(std::all_of(d.fw_block_cross_section.begin(), d.fw_block_cross_section.end(),
                      [&](const auto& kv) { return finite(kv.second) && kv.second >= 0.0; }),
          "dut.fw_block_cross_section", "cross-sections >= 0");
    check(std::all_of(d.sel_cross_section.begin(), d.sel_cross_section.end(),
                      [&](const auto& kv) { return finite(kv.second) && kv.second >= 0.0; }),
          "dut.sel_cross_section", "cross-sections >= 0");
    check(finite(d.break_hazard) && d.break_hazard >= 0.0, "dut.break_hazard", "break_hazard >= 0");
    check(finite(d.damage_hazard) && d.damage_hazard >= 0.0, "dut.damage_hazard", "damage_hazard >= 0");
    check(finite(d.damaged_reset_rate) && d.damaged_reset_rate >= 0.0, "dut.damaged_reset_rate",
          "damaged_reset_rate >= 0");
    check(finite(d.sel_surge_current_a) && d.sel_surge_current_a >= 0.0, "dut.sel_surge_current",
          "sel_surge_current >= 0");
    check(d.eeprom_flip_probability >= 0.0 && d.eeprom_flip_probability <= 1.0,
          "dut.eeprom_flip_probability", "probability in [0, 1]");
    check(d.anneal_recovery_days >= 0.0, "dut.anneal_recovery_days", "anneal_recovery_days >= 0");
    check(d.adc_index().has_value(), "dut.adc_pin", "adc_pin names a channel");
    std::vector<std::string> pins;
    for (const auto& ch : d.channels) {
        pins.push_back(ch.pin);
    }
    std::sort(pins.begin(), pins.end());
    check(std::adjacent_find(pins.begin(), pins.end()) == pins.end(), "dut.channels", "unique pins");

    const PhasePlan& p = c.phase_plan;
    check(finite(p.gpio_duration) && p.gpio_duration > 0.0, "phase_plan.gpio", "gpio > 0");
    check(p.single_phase || (finite(p.beam_monitor_duration) && p.beam_monitor_duration > 0.0),
          "phase_plan.beam_monitor", "beam_monitor > 0");

    check(finite(c.gpio_cycle) && c.gpio_cycle > 0.0, "gpio_cycle", "gpio_cycle > 0");
    check(finite(c.gpio_window) && c.gpio_window > 0.0 && c.gpio_window <= c.gpio_cycle,
          "gpio_window", "0 < gpio_window <= gpio_cycle");
    check(finite(c.watchdog_timeout) && c.watchdog_timeout > 0.0, "watchdog_timeout",
          "watchdog_timeout > 0");
    check(finite(c.reset_overhead) && c.reset_overhead >= 0.0, "reset_overhead", "reset_overhead >= 0");
    check(finite(c.latchup_threshold) && c.latchup_threshold > 0.0, "latchup_threshold",
          "latchup_threshold > 0");
    check(finite(c.latchup_deadtime) && c.latchup_deadtime >= 0.0, "latchup_deadtime",
          "latchup_deadtime >= 0");
    check(finite(c.total_duration) && c.total_duration > 0.0, "total_duration", "total_duration > 0");
    check(finite(c.tick) && c.tick > 0.0, "tick", "tick > 0");
    check(!(c.watchdog_timeout > 0.0) || c.tick < c.watchdog_timeout, "tick", "tick < watchdog_timeout");
    check(finite(c.temperature_tolerance_c) && c.temperature_tolerance_c >= 0.0,
          "temperature.tolerance", "tolerance >= 0");
    check(!c.forced_break_time || (*c.forced_break_time >= 0.0 && finite(*c.forced_break_time)),
          "forced_break_time", "forced_break_time >= 0");
    return out;
}

void require_valid(const CampaignConfig& config) {
    const auto violations = validate(config);
    if (violations.empty()) {
        return;
    }
    std::string msg = "invalid campaign config:";
    for (const auto& v : violations) {
        msg += "\n  " + v.field + ": " + v.rule;
    }
    throw ValidationError(msg);
}

void EventLog::append(const Event& event) {
    if (!std::isfinite(event.t)) {
        throw DomainError("event time must be finite");
    }
    if (!events_.empty() && event.t < events_.back().t) {
        throw DomainError("event log out of order: " + std::to_string(event.t) + " after " +
                          std::to_string(events_.back().t));
    }
    if (event.kind == EventKind::Break && count(EventKind::Break) > 0) {
        throw DomainError("event log already holds a Break");
    }
    events_.push_back(event);
}

std::size_t EventLog::count(EventKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(events_.begin(), events_.end(), [kind](const Event& e) { return e.kind == kind; }));
}

std::vector<double> EventLog::times(EventKind kind) const {
    std::vector<double> out;
    for (const auto& e : events_) {
        if (e.kind == kind) {
            out.push_back(e.t);
        }
    }
    return out;
}

}  // namespace seebench

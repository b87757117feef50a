#include "seebench/physics.hpp"

#include "seebench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seebench::physics {

namespace {

void require(bool ok, const char* what) {
    if (!ok) {
        throw DomainError(what);
    }
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

std::string_view to_string(Environment env) {
    switch (env) {
        case Environment::Experiment: return "Experiment";
        case Environment::Leo: return "LEO";
        case Environment::Geo: return "GEO";
    }
    return "?";
}

double dose_gy(double fluence, double let) {
    require(finite_nonneg(fluence), "dose_gy: fluence must be >= 0");
    require(finite_nonneg(let), "dose_gy: let must be >= 0");
    return kDoseFactor * fluence * let;
}

double sel_fw_cross_section(long long n_sel, long long n_fw_block, double fluence) {
    require(n_sel >= 0 && n_fw_block >= 0, "sel_fw_cross_section: counts must be >= 0");
    require(std::isfinite(fluence) && fluence > 0.0, "sel_fw_cross_section: fluence must be > 0");
    return static_cast<double>(n_sel + n_fw_block) / fluence;
}

double mean_flux(double fluence, double duration) {
    require(finite_nonneg(fluence), "mean_flux: fluence must be >= 0");
    require(std::isfinite(duration) && duration > 0.0, "mean_flux: duration must be > 0");
    return fluence / duration;
}

Quantity effective_fluence(double flux, double duration, const Quantity& background) {
    require(finite_nonneg(flux), "effective_fluence: flux must be >= 0");
    require(finite_nonneg(duration), "effective_fluence: duration must be >= 0");
    if (background.unit() != Unit::PerSquareCmSecond) {
        throw UnitError("effective_fluence: background must be a flux (cm^-2 s^-1)");
    }
    const Quantity integrated_bg = background * Quantity(duration, Unit::Second);
    return Quantity(flux * duration, integrated_bg.uncertainty(), Unit::PerSquareCm);
}

double event_rate(double sigma, double flux) {
    require(finite_nonneg(sigma), "event_rate: sigma must be >= 0");
    require(finite_nonneg(flux), "event_rate: flux must be >= 0");
    return sigma * flux;
}

double event_rate(double sigma, const EnvironmentFlux& env) { return event_rate(sigma, env.flux); }

double mean_period(double rate) {
    require(std::isfinite(rate) && rate > 0.0, "mean_period: rate must be > 0");
    return 1.0 / rate;
}

double expected_mission_events(double rate, double mission_seconds) {
    require(finite_nonneg(rate), "expected_mission_events: rate must be >= 0");
    require(finite_nonneg(mission_seconds), "expected_mission_events: mission must be >= 0");
    return rate * mission_seconds;
}

Quantity estimate_flux_from_scintillator(long long counts, double area, double duration,
                                         const Quantity& background) {
    require(std::isfinite(area) && area > 0.0, "estimate_flux_from_scintillator: area must be > 0");
    require(std::isfinite(duration) && duration > 0.0,
            "estimate_flux_from_scintillator: duration must be > 0");
    require(counts >= 0, "estimate_flux_from_scintillator: counts must be >= 0");
    if (background.unit() != Unit::PerSquareCmSecond) {
        throw UnitError("estimate_flux_from_scintillator: background must be a flux (cm^-2 s^-1)");
    }
    const double exposure = area * duration;
    const double raw = static_cast<double>(counts) / exposure;
    const double net = std::max(raw - background.value(), 0.0);
    const double counting = std::sqrt(static_cast<double>(counts)) / exposure;
    return Quantity(net, std::hypot(counting, background.uncertainty()), Unit::PerSquareCmSecond);
}

}  // namespace seebench::physics

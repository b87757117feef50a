#pragma once

#include "seebench/quantity.hpp"

#include <string_view>

/// Dosimetry, cross-sections and orbital rate extrapolation.
///
/// Plain arguments use fixed units: fluence cm⁻², flux cm⁻²·s⁻¹, LET
/// MeV·cm²·mg⁻¹, durations s, cross-sections cm². Every function is pure.
namespace seebench::physics {

/// MeV·mg⁻¹ -> J·kg⁻¹ conversion used by dose_gy.
inline constexpr double kDoseFactor = 1.602e-7;
inline constexpr double kSecondsPerYear = 365.25 * 86400.0;

enum class Environment { Experiment, Leo, Geo };

std::string_view to_string(Environment env);

struct EnvironmentFlux {
    Environment name = Environment::Experiment;
    double let = 0.0;
    double flux = 0.0;
};

/// Absorbed dose in Gy for an ion fluence at the given LET.
double dose_gy(double fluence, double let);

/// (SEL + FW block) events per unit fluence.
double sel_fw_cross_section(long long n_sel, long long n_fw_block, double fluence);

double mean_flux(double fluence, double duration);

/// Fluence from a mean flux over `duration`; the uncertainty is the
/// background-flux uncertainty integrated over the same time.
Quantity effective_fluence(double mean_flux, double duration, const Quantity& background);

double event_rate(double sigma, double flux);
double event_rate(double sigma, const EnvironmentFlux& env);

double mean_period(double rate);

double expected_mission_events(double rate, double mission_seconds);

inline double years_to_seconds(double years) { return years * kSecondsPerYear; }

/// Net particle flux seen by a scintillator of `area` cm² counting for
/// `duration` s, background-subtracted and clamped at zero. Counting error is
/// Poisson and combines in quadrature with the background uncertainty.
Quantity estimate_flux_from_scintillator(long long counts, double area, double duration,
                                         const Quantity& background);

}  // namespace seebench::physics

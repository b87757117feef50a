#include "seebench/errors.hpp"
#include "seebench/physics.hpp"
#include "support/oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace seebench;
using namespace seebench::physics;
using Catch::Approx;

namespace {
// Relative distance, for "matches within x%" checks.
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("dose", "[physics]") {
    CHECK(dose_gy(2.1e6, 45.0) == Approx(oracle::dose(2.1e6, 45.0)).epsilon(1e-12));
    CHECK(std::round(dose_gy(2.1e6, 45.0) * 100.0) / 100.0 == Approx(15.14));
    CHECK(dose_gy(0.0, 45.0) == 0.0);
    CHECK(dose_gy(1.14e7, 34.0) == Approx(62.09).margin(0.005));
    CHECK(std::round(dose_gy(1.33e7, 45.0) * 10.0) / 10.0 == Approx(95.9));
    CHECK_THROWS_AS(dose_gy(-1.0, 45.0), DomainError);
    CHECK_THROWS_AS(dose_gy(1.0, -1.0), DomainError);
    // Linear in both arguments.
    CHECK(dose_gy(2e6, 30.0) == Approx(2.0 * dose_gy(1e6, 30.0)));
    CHECK(dose_gy(1e6, 60.0) == Approx(2.0 * dose_gy(1e6, 30.0)));

    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> lf(2.0, 12.0);
    std::uniform_real_distribution<double> let(0.0, 100.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = std::pow(10.0, lf(gen));
        const double b = std::pow(10.0, lf(gen));
        const double l = let(gen);
        CHECK(dose_gy(a + b, l) == Approx(dose_gy(a, l) + dose_gy(b, l)).epsilon(1e-14));
        CHECK(dose_gy(a, 2.0 * l) == Approx(2.0 * dose_gy(a, l)).epsilon(1e-15));
    }
}

TEST_CASE("cross-section", "[physics]") {
    CHECK(sel_fw_cross_section(0, 816, 1.01e7) == Approx(8.08e-5).epsilon(5e-3));
    CHECK(sel_fw_cross_section(0, 0, 1.0e7) == 0.0);
    CHECK(sel_fw_cross_section(0, 15, 2.6e5) == Approx(5.77e-5).epsilon(5e-3));
    CHECK_THROWS_AS(sel_fw_cross_section(0, 1, 0.0), DomainError);
    CHECK_THROWS_AS(sel_fw_cross_section(-1, 1, 1.0), DomainError);

    std::mt19937_64 gen(7);
    std::uniform_int_distribution<long long> n(0, 100000);
    std::uniform_real_distribution<double> lf(3.0, 12.0);
    for (int i = 0; i < 1000; ++i) {
        long long s = n(gen);
        long long f = n(gen);
        double phi = std::pow(10.0, lf(gen));
        double sigma = sel_fw_cross_section(s, f, phi);
        if (s + f > 0) CHECK(rel(sigma * phi, static_cast<double>(s + f)) < 1e-12);
    }
}

TEST_CASE("mean flux and effective fluence", "[physics]") {
    CHECK(mean_flux(1.01e7, 6027.0) == Approx(1.676e3).epsilon(1e-3));
    CHECK(mean_flux(0.0, 100.0) == 0.0);
    CHECK(mean_flux(1.14e7, 13813.0) == Approx(825.3).epsilon(1e-4));
    CHECK_THROWS_AS(mean_flux(1.0, 0.0), DomainError);

    Quantity bg(20.0, 5.0, Unit::PerSquareCmSecond);
    auto f = effective_fluence(1.01e7 / 1e4, 1e4, bg);
    CHECK(f.unit() == Unit::PerSquareCm);
    CHECK(f.value() == Approx(1.01e7));
    CHECK(f.uncertainty() == Approx(5e4));
    // The background integrated over the same interval is (20 +- 5) 1e4.
    CHECK(bg.value() * 1e4 == Approx(20e4));

    auto zero = effective_fluence(123.0, 0.0, bg);
    CHECK(zero.value() == 0.0);
    CHECK(zero.uncertainty() == 0.0);

    auto st01 = effective_fluence(1.68e3, 6027.0, bg);
    CHECK(st01.value() == Approx(1.0125e7).epsilon(1e-4));
    CHECK(std::round(st01.value() / 1e5) / 100.0 == Approx(1.01));
    CHECK_THROWS_AS(effective_fluence(1.0, -1.0, bg), DomainError);
    CHECK_THROWS_AS(effective_fluence(1.0, 1.0, Quantity(1.0, 0.0, Unit::Second)), UnitError);
}

TEST_CASE("rates, periods and mission counts", "[physics]") {
    CHECK(event_rate(8.08e-5, 1.68e3) == Approx(0.135744));
    CHECK(rel(event_rate(8.08e-5, 1.68e3), 1.35e-1) < 0.01);
    CHECK(event_rate(8.08e-5, 0.0) == 0.0);
    CHECK(event_rate(4.20e-5, 8.10e-8) == Approx(3.40e-12).epsilon(1e-3));

    CHECK(mean_period(1.35e-1) == Approx(7.41).epsilon(1e-3));
    CHECK(mean_period(1.87e-12) == Approx(5.35e11).epsilon(1e-3));
    CHECK(rel(mean_period(5.14e-13), 1.94e12) < 0.01);
    CHECK_THROWS_AS(mean_period(0.0), DomainError);

    const double mission = years_to_seconds(3.0);
    CHECK(mission == Approx(oracle::seconds_in_years(3.0)));
    CHECK(mission == Approx(9.467e7).epsilon(1e-4));
    CHECK(rel(expected_mission_events(1.866e-12, mission), 1.76e-4) < 0.01);
    CHECK(expected_mission_events(0.0, mission) == 0.0);
    CHECK(rel(expected_mission_events(5.147e-13, mission), 4.85e-5) < 0.02);

    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> e(-14.0, 0.0);
    for (int i = 0; i < 1000; ++i) {
        double sigma = std::pow(10.0, e(gen) - 3.0);
        double flux = std::pow(10.0, e(gen) + 8.0);
        double r = event_rate(sigma, flux);
        CHECK(rel(mean_period(r) * r, 1.0) < 1e-12);
    }

    // Events predicted over a run equal sigma times its fluence.
    std::uniform_real_distribution<double> lt(1.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const double sigma = std::pow(10.0, e(gen) - 3.0);
        const double phi = std::pow(10.0, -e(gen));
        const double t = std::pow(10.0, lt(gen));
        CHECK(rel(event_rate(sigma, mean_flux(phi, t)) * t, sigma * phi) < 1e-12);
    }
}

TEST_CASE("environment fluxes", "[physics]") {
    auto leo = EnvironmentFlux{Environment::Leo, 45.0, 2.31e-8};
    CHECK(event_rate(8.08e-5, leo) == Approx(8.08e-5 * 2.31e-8));
}

TEST_CASE("scintillator flux estimate", "[physics]") {
    const double area = M_PI;  // 20 mm circle
    const double t = 400.0;
    Quantity bg(20.0, 5.0, Unit::PerSquareCmSecond);

    auto pure = estimate_flux_from_scintillator(static_cast<long long>(20.0 * area * t), area, t, bg);
    CHECK(pure.value() == Approx(0.0).margin(0.01));

    // Raw 1.70e3 over the beam area nets 1.68e3 once the background is removed.
    auto counts = static_cast<long long>(std::llround(1.70e3 * area * t));
    auto st01 = estimate_flux_from_scintillator(counts, area, t, bg);
    CHECK(st01.unit() == Unit::PerSquareCmSecond);
    CHECK(st01.value() == Approx(1.68e3).epsilon(1e-4));
    double counting = std::sqrt(static_cast<double>(counts)) / (area * t);
    CHECK(st01.uncertainty() == Approx(std::hypot(counting, 5.0)));

    auto none = estimate_flux_from_scintillator(0, area, t, bg);
    CHECK(none.value() == 0.0);
    CHECK(none.uncertainty() == Approx(5.0));

    CHECK_THROWS_AS(estimate_flux_from_scintillator(1, 0.0, t, bg), DomainError);
    CHECK_THROWS_AS(estimate_flux_from_scintillator(1, area, 0.0, bg), DomainError);
}

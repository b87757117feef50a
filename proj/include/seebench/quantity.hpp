#pragma once

#include <string>
#include <string_view>

namespace seebench {

/// Closed set of units a Quantity may carry.
enum class Unit {
    PerSquareCm,        // cm⁻², fluence
    Second,             // s
    Gray,               // Gy
    SquareCm,           // cm², cross-section
    PerSecond,          // s⁻¹, event rate
    PerSquareCmSecond,  // cm⁻²·s⁻¹, flux
    MilliAmp,           // mA
    Amp,                // A
    Count,              // dimensionless
};

std::string_view unit_symbol(Unit unit);

/// Parses a unit symbol such as "cm^-2" or "mA". Throws UnitError for anything else.
Unit parse_unit(std::string_view symbol);

/// A value with an absolute uncertainty and a unit.
///
/// Arithmetic is dimension-checked: products and quotients must land back in
/// the closed unit set, sums require the same dimension (mA and A convert).
/// Uncertainties of independent operands combine in quadrature.
class Quantity {
public:
    Quantity(double value, double uncertainty, Unit unit);
    Quantity(double value, Unit unit) : Quantity(value, 0.0, unit) {}

    static Quantity parse(double value, double uncertainty, std::string_view unit_symbol);

    double value() const noexcept { return value_; }
    double uncertainty() const noexcept { return uncertainty_; }
    Unit unit() const noexcept { return unit_; }

    /// Same physical quantity expressed in `target` (only mA <-> A differ in scale).
    Quantity in(Unit target) const;

    friend Quantity operator+(const Quantity& a, const Quantity& b);
    friend Quantity operator-(const Quantity& a, const Quantity& b);
    friend Quantity operator*(const Quantity& a, const Quantity& b);
    friend Quantity operator/(const Quantity& a, const Quantity& b);
    friend Quantity operator*(const Quantity& a, double scale);
    friend Quantity operator*(double scale, const Quantity& a) { return a * scale; }

    friend bool operator==(const Quantity&, const Quantity&) = default;

private:
    double value_;
    double uncertainty_;
    Unit unit_;
};

}  // namespace seebench

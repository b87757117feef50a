#include "seebench/quantity.hpp"

#include "seebench/errors.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <string>

namespace seebench {

namespace {

struct Dimension {
    int length = 0;  // cm
    int time = 0;    // s
    int dose = 0;    // Gy
    int current = 0; // A

    friend bool operator==(const Dimension&, const Dimension&) = default;
};

struct UnitInfo {
    Unit unit;
    std::string_view symbol;
    Dimension dim;
    double scale;  // to the base unit of `dim`
};

constexpr std::array<UnitInfo, 9> kUnits{{
    {Unit::PerSquareCm, "cm^-2", {-2, 0, 0, 0}, 1.0},
    {Unit::Second, "s", {0, 1, 0, 0}, 1.0},
    {Unit::Gray, "Gy", {0, 0, 1, 0}, 1.0},
    {Unit::SquareCm, "cm^2", {2, 0, 0, 0}, 1.0},
    {Unit::PerSecond, "s^-1", {0, -1, 0, 0}, 1.0},
    {Unit::PerSquareCmSecond, "cm^-2 s^-1", {-2, -1, 0, 0}, 1.0},
    {Unit::MilliAmp, "mA", {0, 0, 0, 1}, 1e-3},
    {Unit::Amp, "A", {0, 0, 0, 1}, 1.0},
    {Unit::Count, "count", {0, 0, 0, 0}, 1.0},
}};

const UnitInfo& info(Unit unit) {
    for (const auto& u : kUnits) {
        if (u.unit == unit) {
            return u;
        }
    }
    throw UnitError("unit outside the supported set: " + std::to_string(static_cast<int>(unit)));
}

Dimension combine(const Dimension& a, const Dimension& b, int sign) {
    return {a.length + sign * b.length, a.time + sign * b.time, a.dose + sign * b.dose,
            a.current + sign * b.current};
}

// Result unit for a product/quotient. Current results stay in mA when an
// operand was in mA so that telemetry-scale numbers keep their magnitude.
Unit unit_for(const Dimension& dim, bool prefer_milli, const char* op, Unit a, Unit b) {
    if (dim.current == 1 && dim.length == 0 && dim.time == 0 && dim.dose == 0) {
        return prefer_milli ? Unit::MilliAmp : Unit::Amp;
    }
    for (const auto& u : kUnits) {
        if (u.dim == dim && u.scale == 1.0) {
            return u.unit;
        }
    }
    throw UnitError(std::string("unit mismatch: ") + std::string(unit_symbol(a)) + " " + op + " " +
                    std::string(unit_symbol(b)) + " has no unit in the supported set");
}

}  // namespace

std::string_view unit_symbol(Unit unit) { return info(unit).symbol; }

Unit parse_unit(std::string_view symbol) {
    for (const auto& u : kUnits) {
        if (u.symbol == symbol) {
            return u.unit;
        }
    }
    throw UnitError("unknown unit '" + std::string(symbol) + "'");
}

Quantity::Quantity(double value, double uncertainty, Unit unit)
    : value_(value), uncertainty_(uncertainty), unit_(unit) {
    info(unit);
    if (!std::isfinite(value) || !std::isfinite(uncertainty)) {
        throw DomainError("quantity must be finite");
    }
    if (uncertainty < 0.0) {
        throw DomainError("quantity uncertainty must be >= 0");
    }
}

Quantity Quantity::parse(double value, double uncertainty, std::string_view symbol) {
    return Quantity(value, uncertainty, parse_unit(symbol));
}

Quantity Quantity::in(Unit target) const {
    const auto& from = info(unit_);
    const auto& to = info(target);
    if (!(from.dim == to.dim)) {
        throw UnitError("cannot convert " + std::string(from.symbol) + " to " + std::string(to.symbol));
    }
    const double k = from.scale / to.scale;
    return Quantity(value_ * k, uncertainty_ * k, target);
}

Quantity operator+(const Quantity& a, const Quantity& b) {
    const Quantity bb = b.in(a.unit());
    return Quantity(a.value() + bb.value(), std::hypot(a.uncertainty(), bb.uncertainty()), a.unit());
}

Quantity operator-(const Quantity& a, const Quantity& b) {
    const Quantity bb = b.in(a.unit());
    return Quantity(a.value() - bb.value(), std::hypot(a.uncertainty(), bb.uncertainty()), a.unit());
}

Quantity operator*(const Quantity& a, const Quantity& b) {
    const auto& ia = info(a.unit());
    const auto& ib = info(b.unit());
    const bool milli = a.unit() == Unit::MilliAmp || b.unit() == Unit::MilliAmp;
    const Unit out = unit_for(combine(ia.dim, ib.dim, +1), milli, "*", a.unit(), b.unit());
    const double k = ia.scale * ib.scale / info(out).scale;
    const double v = a.value() * b.value();
    const double u = std::hypot(a.uncertainty() * b.value(), a.value() * b.uncertainty());
    return Quantity(v * k, std::abs(u * k), out);
}

Quantity operator/(const Quantity& a, const Quantity& b) {
    if (b.value() == 0.0) {
        throw DomainError("division by a zero quantity");
    }
    const auto& ia = info(a.unit());
    const auto& ib = info(b.unit());
    const bool milli = a.unit() == Unit::MilliAmp;
    const Unit out = unit_for(combine(ia.dim, ib.dim, -1), milli, "/", a.unit(), b.unit());
    const double k = ia.scale / ib.scale / info(out).scale;
    const double v = a.value() / b.value();
    const double u = std::hypot(a.uncertainty() / b.value(), v * b.uncertainty() / b.value());
    return Quantity(v * k, std::abs(u * k), out);
}

Quantity operator*(const Quantity& a, double scale) {
    return Quantity(a.value() * scale, a.uncertainty() * std::abs(scale), a.unit());
}

}  // namespace seebench

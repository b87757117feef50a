#pragma once

#include "seebench/domain.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace seebench::io {

/// A number kept exactly as printed, with the precision the print implies.
struct PrintedValue {
    std::string text;
    double scale = 1.0;
    std::optional<double> value;
    std::optional<double> uncertainty;
    int significant_figures = 0;
    /// One unit in the last printed digit, already scaled.
    double resolution = 0.0;

    bool missing() const { return !value.has_value(); }
    /// Throws std::out_of_range for missing or non-numeric cells.
    double number() const;
    /// True when `x` rounds to the printed value at the printed precision.
    bool agrees(double x) const;
    /// True when `x` lies within `relative` of the printed value.
    bool within(double x, double relative) const;
};

PrintedValue parse_printed(std::string_view text, double scale = 1.0);

struct ReferenceCell {
    std::string group;
    std::string row;
    std::string column;
    PrintedValue value;
    std::string note;
};

struct IonResultRow {
    std::string sample;
    Species species = Species::Kr84;
    PrintedValue fluence;
    PrintedValue irradiation_time;
    PrintedValue absorbed_current;
    bool test_passed = false;
};

struct CrossSectionRow {
    std::string sample;
    PrintedValue fluence;
    PrintedValue n_sel;
    PrintedValue n_fw_block;
    PrintedValue sigma;
};

struct EnvironmentRow {
    std::string key;
    std::string environment;
    std::string sample;
    std::optional<PrintedValue> sigma;
    PrintedValue flux;
    PrintedValue rate;
};

struct EnvironmentBlock {
    double let = 0.0;
    std::vector<EnvironmentRow> rows;

    const EnvironmentRow& row(std::string_view environment) const;
};

struct NeutronRow {
    std::string sample;
    PrintedValue total_fluence;
    PrintedValue fluence_before_break;
    PrintedValue irradiation_time;
    bool broken = false;
};

struct ResetRow {
    std::string sample;
    PrintedValue irradiation;
    PrintedValue radiationless;
    PrintedValue after_60_days;
    PrintedValue after_transistor;
};

class ReferenceTables {
public:
    /// Parses the tab-separated fixture text; throws ParseError.
    static ReferenceTables parse(std::string_view text);

    const std::vector<ReferenceCell>& cells() const { return cells_; }
    bool has(std::string_view group, std::string_view row, std::string_view column) const;
    /// Throws std::out_of_range when absent.
    const PrintedValue& at(std::string_view group, std::string_view row, std::string_view column) const;
    const ReferenceCell& cell(std::string_view group, std::string_view row, std::string_view column) const;
    /// Row keys of a group in fixture order.
    std::vector<std::string> rows(std::string_view group) const;
    const PrintedValue& summary(std::string_view key) const { return at("summary", "value", key); }

    /// Kr84 rows followed by Kr78 rows.
    std::vector<IonResultRow> ion_results() const;
    std::vector<CrossSectionRow> cross_sections() const;
    /// One block per LET, highest LET first.
    std::vector<EnvironmentBlock> environment_blocks() const;
    std::vector<NeutronRow> neutron_results() const;
    std::vector<ResetRow> reset_summary() const;

private:
    std::vector<ReferenceCell> cells_;
};

/// The fixture compiled into the library, checked against its build-time SHA-256.
ReferenceTables load_reference_tables();
/// Throws CorruptionError when `text` does not hash to `expected_sha256`.
ReferenceTables load_reference_tables(std::string_view text, std::string_view expected_sha256);

std::string_view embedded_reference_text();
std::string_view embedded_reference_sha256();

}  // namespace seebench::io

#include "seebench/io/reference_tables.hpp"

#include "seebench/errors.hpp"
#include "seebench/io/digest.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace seebench::io {

namespace detail {
std::string_view embedded_reference_text();
std::string_view embedded_reference_sha256();
}  // namespace detail

std::string_view embedded_reference_text() { return detail::embedded_reference_text(); }
std::string_view embedded_reference_sha256() { return detail::embedded_reference_sha256(); }

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> to_double(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// Precision of a printed number: significant figures and the size of one
// unit in its last digit.
struct Precision {
    int significant_figures = 0;
    double resolution = 0.0;
};

Precision precision_of(std::string_view s) {
    int exponent = 0;
    std::string_view mantissa = s;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        mantissa = s.substr(0, e);
        auto exp_text = s.substr(e + 1);
        if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
        std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    }
    int decimals = 0;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
        decimals = static_cast<int>(mantissa.size() - dot - 1);
    }
    int sig = 0;
    bool leading = true;
    for (char c : mantissa) {
        if (c < '0' || c > '9') continue;
        if (leading && c == '0') continue;
        leading = false;
        ++sig;
    }
    return {std::max(sig, 1), std::pow(10.0, exponent - decimals)};
}

constexpr std::string_view kPlusMinus = "\xC2\xB1";

}  // namespace

double PrintedValue::number() const {
    if (!value) throw std::out_of_range(fmt::format("printed value '{}' is not a number", text));
    return *value;
}

bool PrintedValue::agrees(double x) const {
    if (!value || !std::isfinite(x)) return false;
    double slack = 1e-9 * std::max(std::abs(*value), resolution);
    return std::abs(x - *value) <= 0.5 * resolution + slack;
}

bool PrintedValue::within(double x, double relative) const {
    if (!value || !std::isfinite(x)) return false;
    if (*value == 0.0) return x == 0.0;
    return std::abs(x - *value) <= relative * std::abs(*value);
}

PrintedValue parse_printed(std::string_view text, double scale) {
    PrintedValue p;
    text = trim(text);
    p.text = std::string(text);
    p.scale = scale;
    if (text.empty() || text == "--") return p;

    std::string_view central = text;
    std::optional<double> unc;
    if (auto pm = text.find(kPlusMinus); pm != std::string_view::npos) {
        central = trim(text.substr(0, pm));
        unc = to_double(trim(text.substr(pm + kPlusMinus.size())));
        if (!unc) return p;
    }
    auto v = to_double(central);
    if (!v) return p;
    auto prec = precision_of(central);
    p.value = *v * scale;
    if (unc) p.uncertainty = *unc * scale;
    p.significant_figures = prec.significant_figures;
    p.resolution = prec.resolution * scale;
    return p;
}

ReferenceTables ReferenceTables::parse(std::string_view text) {
    ReferenceTables tables;
    std::size_t line_no = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty() || line.front() == '#') continue;

        std::vector<std::string_view> fields;
        std::size_t pos = 0;
        while (true) {
            auto tab = line.find('\t', pos);
            fields.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
            if (tab == std::string_view::npos) break;
            pos = tab + 1;
        }
        if (fields.size() < 5 || fields.size() > 6) {
            throw ParseError(fmt::format("expected 5 or 6 tab-separated fields, got {}", fields.size()), line_no);
        }
        auto scale = to_double(trim(fields[4]));
        if (!scale || *scale <= 0.0) throw ParseError(fmt::format("bad scale '{}'", fields[4]), line_no);
        ReferenceCell cell{std::string(trim(fields[0])), std::string(trim(fields[1])), std::string(trim(fields[2])),
                           parse_printed(fields[3], *scale),
                           fields.size() == 6 ? std::string(trim(fields[5])) : std::string{}};
        if (tables.has(cell.group, cell.row, cell.column)) {
            throw ParseError(fmt::format("duplicate cell {}/{}/{}", cell.group, cell.row, cell.column), line_no);
        }
        tables.cells_.push_back(std::move(cell));
    }
    return tables;
}

bool ReferenceTables::has(std::string_view group, std::string_view row, std::string_view column) const {
    return std::any_of(cells_.begin(), cells_.end(), [&](const ReferenceCell& c) {
        return c.group == group && c.row == row && c.column == column;
    });
}

const ReferenceCell& ReferenceTables::cell(std::string_view group, std::string_view row,
                                           std::string_view column) const {
    auto it = std::find_if(cells_.begin(), cells_.end(), [&](const ReferenceCell& c) {
        return c.group == group && c.row == row && c.column == column;
    });
    if (it == cells_.end()) throw std::out_of_range(fmt::format("no reference cell {}/{}/{}", group, row, column));
    return *it;
}

const PrintedValue& ReferenceTables::at(std::string_view group, std::string_view row, std::string_view column) const {
    return cell(group, row, column).value;
}

std::vector<std::string> ReferenceTables::rows(std::string_view group) const {
    std::vector<std::string> out;
    for (const auto& c : cells_) {
        if (c.group == group && std::find(out.begin(), out.end(), c.row) == out.end()) out.push_back(c.row);
    }
    return out;
}

std::vector<IonResultRow> ReferenceTables::ion_results() const {
    std::vector<IonResultRow> out;
    for (auto [group, species] : {std::pair{"kr84_results", Species::Kr84}, std::pair{"kr78_results", Species::Kr78}}) {
        for (const auto& r : rows(group)) {
            out.push_back({r, species, at(group, r, "fluence"), at(group, r, "irradiation_time"),
                           at(group, r, "absorbed_current"), at(group, r, "test_passed").text == "Yes"});
        }
    }
    return out;
}

std::vector<CrossSectionRow> ReferenceTables::cross_sections() const {
    std::vector<CrossSectionRow> out;
    for (const auto& r : rows("cross_sections")) {
        out.push_back({r, at("cross_sections", r, "fluence"), at("cross_sections", r, "n_sel"),
                       at("cross_sections", r, "n_fw_block"), at("cross_sections", r, "sigma")});
    }
    return out;
}

const EnvironmentRow& EnvironmentBlock::row(std::string_view environment) const {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const EnvironmentRow& r) { return r.environment == environment; });
    if (it == rows.end()) throw std::out_of_range(fmt::format("no {} row at LET {}", environment, let));
    return *it;
}

std::vector<EnvironmentBlock> ReferenceTables::environment_blocks() const {
    constexpr std::string_view g = "environment_rates";
    std::vector<EnvironmentBlock> out;
    for (const auto& r : rows(g)) {
        double let = at(g, r, "let").number();
        auto block = std::find_if(out.begin(), out.end(), [&](const EnvironmentBlock& b) { return b.let == let; });
        if (block == out.end()) {
            out.push_back({let, {}});
            block = out.end() - 1;
        }
        EnvironmentRow row;
        row.key = r;
        row.environment = at(g, r, "environment").text;
        if (has(g, r, "sample")) row.sample = at(g, r, "sample").text;
        if (has(g, r, "sigma")) row.sigma = at(g, r, "sigma");
        row.flux = at(g, r, "flux");
        row.rate = at(g, r, "rate");
        block->rows.push_back(std::move(row));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.let > b.let; });
    return out;
}

std::vector<NeutronRow> ReferenceTables::neutron_results() const {
    constexpr std::string_view g = "neutron_results";
    std::vector<NeutronRow> out;
    for (const auto& r : rows(g)) {
        out.push_back({r, at(g, r, "total_fluence"), at(g, r, "fluence_before_break"), at(g, r, "irradiation_time"),
                       at(g, r, "broken").text == "Yes"});
    }
    return out;
}

std::vector<ResetRow> ReferenceTables::reset_summary() const {
    constexpr std::string_view g = "reset_summary";
    std::vector<ResetRow> out;
    for (const auto& r : rows(g)) {
        out.push_back({r, at(g, r, "irradiation"), at(g, r, "radiationless"), at(g, r, "after_60_days"),
                       at(g, r, "after_transistor")});
    }
    return out;
}

ReferenceTables load_reference_tables(std::string_view text, std::string_view expected_sha256) {
    auto actual = sha256_hex(text);
    if (actual != expected_sha256) {
        throw CorruptionError(fmt::format("reference fixture checksum mismatch: expected {}, got {}", expected_sha256,
                                          actual));
    }
    return ReferenceTables::parse(text);
}

ReferenceTables load_reference_tables() {
    return load_reference_tables(embedded_reference_text(), embedded_reference_sha256());
}

}  // namespace seebench::io

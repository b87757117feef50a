#include "seebench/cli/commands.hpp"

#include "seebench/errors.hpp"
#include "seebench/io/reference_tables.hpp"
#include "seebench/physics.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <ostream>

namespace seebench::cli {

namespace {

class Checker {
public:
    void at_precision(std::string name, double computed, const io::PrintedValue& printed) {
        checks_.push_back({std::move(name), computed, printed.text, "printed precision", printed.agrees(computed)});
    }
    void within(std::string name, double computed, const io::PrintedValue& printed, double relative) {
        checks_.push_back({std::move(name), computed, printed.text, fmt::format("within {:g}%", relative * 100.0),
                           printed.within(computed, relative)});
    }
    std::vector<VerifyCheck> take() { return std::move(checks_); }

private:
    std::vector<VerifyCheck> checks_;
};

}  // namespace

VerifyTolerances VerifyTolerances::from_environment() {
    VerifyTolerances t;
    if (const char* env = std::getenv("SEEBENCH_VERIFY_TOLERANCE")) {
        char* end = nullptr;
        double v = std::strtod(env, &end);
        if (end != env && *end == '\0' && v > 0.0) t = {v, v, v, v};
    }
    return t;
}

std::vector<VerifyCheck> verify_checks(const VerifyTolerances& tol) {
    const auto tables = io::load_reference_tables();
    Checker check;

    std::map<std::string, double> sigma;
    for (const auto& row : tables.cross_sections()) {
        double s = physics::sel_fw_cross_section(std::llround(row.n_sel.number()), std::llround(row.n_fw_block.number()),
                                                 row.fluence.number());
        sigma[row.sample] = s;
        check.at_precision(fmt::format("cross-section {}", row.sample), s, row.sigma);
    }

    std::map<std::string, io::IonResultRow> ions;
    for (const auto& row : tables.ion_results()) ions.emplace(row.sample, row);

    std::map<std::string, double> rate_by_row;
    for (const auto& block : tables.environment_blocks()) {
        const auto& experiment = block.row("EXPERIMENT");
        const auto& ion = ions.at(experiment.sample);
        const double flux = physics::mean_flux(ion.fluence.number(), ion.irradiation_time.number());
        const double s = sigma.at(experiment.sample);
        for (const auto& row : block.rows) {
            const bool is_experiment = row.environment == "EXPERIMENT";
            const double env_flux = is_experiment ? flux : row.flux.number();
            const auto label = fmt::format("LET {} {}", block.let, is_experiment ? experiment.sample : row.environment);
            if (is_experiment) check.at_precision("flux " + label, flux, row.flux);
            if (row.sigma) check.at_precision("cross-section " + label, s, *row.sigma);
            const double rate = physics::event_rate(s, env_flux);
            const double rel = (block.let == 34.0 && row.environment == "GEO") ? tol.rate_geo_let34 : tol.rate;
            check.within("rate " + label, rate, row.rate, rel);
            rate_by_row[row.key] = rate;
        }
    }

    const double mission = physics::years_to_seconds(tables.summary("mission_years").number());
    check.within("period experiment", physics::mean_period(rate_by_row.at("let45_experiment")),
                 tables.summary("period_experiment"), tol.period);
    check.within("period LEO", physics::mean_period(rate_by_row.at("let45_leo")), tables.summary("period_leo"),
                 tol.period);
    check.within("period GEO", physics::mean_period(rate_by_row.at("let45_geo")), tables.summary("period_geo"),
                 tol.period);
    check.within("mission count LEO", physics::expected_mission_events(rate_by_row.at("let45_leo"), mission),
                 tables.summary("mission_leo"), tol.mission);
    check.within("mission count GEO", physics::expected_mission_events(rate_by_row.at("let45_geo"), mission),
                 tables.summary("mission_geo"), tol.mission);

    for (auto [species, key, let_key] : {std::tuple{Species::Kr84, "kr84", "let_kr84"},
                                         std::tuple{Species::Kr78, "kr78", "let_kr78"}}) {
        double lo = 0.0;
        double hi = 0.0;
        bool first = true;
        for (const auto& [id, row] : ions) {
            if (row.species != species) continue;
            double f = row.fluence.number();
            lo = first ? f : std::min(lo, f);
            hi = first ? f : std::max(hi, f);
            first = false;
        }
        const double let = tables.summary(let_key).number();
        check.at_precision(fmt::format("dose {} min", key), physics::dose_gy(lo, let),
                           tables.summary(fmt::format("dose_{}_min", key)));
        check.at_precision(fmt::format("dose {} max", key), physics::dose_gy(hi, let),
                           tables.summary(fmt::format("dose_{}_max", key)));
    }
    return check.take();
}

int cmd_verify(std::ostream& out, std::ostream& err) {
    std::vector<VerifyCheck> checks;
    try {
        checks = verify_checks(VerifyTolerances::from_environment());
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kDataError;
    }
    std::size_t failed = 0;
    for (const auto& c : checks) {
        if (!c.passed) ++failed;
        fmt::print(out, "{} {:<28} computed={:<12.6g} printed={:<10} ({})\n", c.passed ? "PASS" : "FAIL", c.name,
                   c.computed, c.printed, c.rule);
    }
    fmt::print(out, "{} of {} values reproduced\n", checks.size() - failed, checks.size());
    return failed == 0 ? kOk : kVerifyFailed;
}

}  // namespace seebench::cli

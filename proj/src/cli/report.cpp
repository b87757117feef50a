#include "seebench/cli/commands.hpp"

#include "seebench/errors.hpp"
#include "seebench/io/config.hpp"
#include "seebench/io/presets.hpp"
#include "seebench/io/reference_tables.hpp"
#include "seebench/physics.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>

namespace seebench::cli {

namespace {

struct TableFile {
    std::string name;
    std::string header;
    std::vector<std::string> rows;
};

std::string sci(double v) { return fmt::format("{:.3g}", v); }

std::string opt_sci(const std::optional<double>& v) { return v ? sci(*v) : "--"; }

// Follow-up tests are stored as <sample>_<stage>.
std::pair<std::string, std::string> split_stage(const std::string& id) {
    for (std::string_view stage : {"_post", "_60d", "_transistor"}) {
        if (id.size() > stage.size() && id.compare(id.size() - stage.size(), stage.size(), stage) == 0) {
            return {id.substr(0, id.size() - stage.size()), std::string(stage.substr(1))};
        }
    }
    return {id, ""};
}

void copy_if_exists(const fs::path& from, const fs::path& to) {
    if (fs::exists(from)) fs::copy_file(from, to, fs::copy_options::overwrite_existing);
}

}  // namespace

int cmd_report(const ReportOptions& o, std::ostream& out, std::ostream& err) {
    if (o.out.empty()) {
        fmt::print(err, "error: --out is required\n");
        return kUsage;
    }
    std::vector<AnalysisRow> rows;
    try {
        fs::create_directories(o.out / "series");
        for (const auto& dir : o.inputs) {
            std::ifstream f(dir / "analysis.csv");
            if (!f) throw ParseError(fmt::format("no analysis.csv in '{}'", dir.string()), 0);
            for (auto& r : read_analysis_csv(f)) {
                copy_if_exists(dir / "fluence_series.dat", o.out / "series" / (r.sample + "_fluence.dat"));
                copy_if_exists(dir / "adc_current.dat", o.out / "series" / (r.sample + "_adc_current.dat"));
                rows.push_back(std::move(r));
            }
        }
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kDataError;
    }
    if (rows.empty()) fmt::print(err, "warning: no analysis inputs, writing empty tables\n");
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.sample < b.sample; });

    TableFile ion{"ion_results.csv", "Sample,Fluence (cm^-2),Irradiation time (s),Absorbed current (mA),Test passed", {}};
    TableFile xs{"cross_sections.csv", "Sample,Fluence (cm^-2),#SEL,#FW block,Cross-section (cm^2)", {}};
    TableFile env{"environment_rates.csv", "LET (MeV cm^2 mg^-1),Environment,Cross-section (cm^2),Flux (cm^-2 s^-1),"
                                           "FW blocks rate (s^-1)",
                  {}};
    TableFile neu{"neutron_results.csv", "Sample,Total fluence (cm^-2),Fluence before breaking (cm^-2),"
                                         "Irradiation time (s),Broken",
                  {}};
    TableFile resets{"reset_summary.csv", "Sample,Resets during irradiation,Resets during radiationless test,"
                                          "Resets after 60 days,Resets after changing the transistor",
                     {}};

    std::map<double, const AnalysisRow*> first_by_let;
    std::map<std::string, std::map<std::string, std::size_t>> reset_counts;
    // Continuous resets first seen in the beam-off test right after irradiation
    // date the break to the end of the exposure.
    std::map<std::string, bool> broken_after;
    for (const auto& r : rows) {
        auto [base, stage] = split_stage(r.sample);
        if (stage == "post" && r.status == Health::Broken) broken_after[base] = true;
    }
    std::vector<std::string> reset_order;
    for (const auto& r : rows) {
        auto [base, stage] = split_stage(r.sample);
        if (!reset_counts.count(base)) reset_order.push_back(base);
        reset_counts[base][stage] = r.hard_resets + r.soft_resets;
        if (!stage.empty()) continue;
        if (is_ion(r.species)) {
            std::string current = r.post_current_ma ? fmt::format("{:.1f} ± 0.5", *r.post_current_ma) : "--";
            std::string passed = r.test_passed ? (*r.test_passed ? "Yes" : "No") : "--";
            ion.rows.push_back(fmt::format("{},{},{},{},{}", r.sample, sci(r.fluence), r.irradiation_time, current, passed));
            xs.rows.push_back(fmt::format("{},{},{},{},{}", r.sample, sci(r.fluence), r.n_sel, r.n_fw_block,
                                          r.sigma ? sci(*r.sigma) : "undefined"));
            env.rows.push_back(fmt::format("{},EXPERIMENT ({}),{},{},{}", r.let, r.sample, opt_sci(r.sigma),
                                           sci(r.flux), opt_sci(r.rate)));
            first_by_let.emplace(r.let, &r);
        } else {
            const bool during = r.status == Health::Broken;
            const bool broken = during || broken_after.count(r.sample) > 0;
            std::string before = during ? opt_sci(r.break_fluence) : broken ? sci(r.fluence) : "--";
            neu.rows.push_back(fmt::format("{},{},{},{},{}", r.sample, sci(r.fluence), before, r.irradiation_time,
                                           broken ? "Yes" : "No"));
        }
    }

    // Orbit rows reuse the orbital fluxes of the reference tables at the same LET.
    try {
        auto tables = io::load_reference_tables();
        for (const auto& block : tables.environment_blocks()) {
            auto it = first_by_let.find(block.let);
            if (it == first_by_let.end() || !it->second->sigma) continue;
            for (const auto& row : block.rows) {
                if (row.environment == "EXPERIMENT") continue;
                double flux = row.flux.number();
                env.rows.push_back(fmt::format("{},{},{},{},{}", block.let, row.environment, sci(*it->second->sigma),
                                               sci(flux), sci(physics::event_rate(*it->second->sigma, flux))));
            }
        }
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kDataError;
    }

    for (const auto& base : reset_order) {
        const auto& c = reset_counts[base];
        auto cell = [&](const std::string& stage) {
            auto it = c.find(stage);
            return it == c.end() ? std::string("--") : std::to_string(it->second);
        };
        resets.rows.push_back(fmt::format("{},{},{},{},{}", base, cell(""), cell("post"), cell("60d"),
                                          cell("transistor")));
    }

    for (const auto* t : {&ion, &xs, &env, &neu, &resets}) {
        std::ofstream f(o.out / t->name);
        fmt::print(f, "{}\n", t->header);
        for (const auto& row : t->rows) fmt::print(f, "{}\n", row);
        if (!f) {
            fmt::print(err, "error: cannot write {}\n", (o.out / t->name).string());
            return kDataError;
        }
        fmt::print(out, "{}: {} rows\n", t->name, t->rows.size());
    }
    return kOk;
}

int cmd_presets(const fs::path& dir, std::ostream& os, std::ostream& err) {
    try {
        fs::create_directories(dir);
        for (const auto& p : io::all_presets(io::load_reference_tables())) {
            std::ofstream f(dir / (p.file_stem + ".yaml"));
            f << io::save_campaign_config(p.config);
            if (!f) throw SinkError(fmt::format("cannot write preset {}", p.file_stem), 0);
            fmt::print(os, "{}\n", (dir / (p.file_stem + ".yaml")).string());
        }
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kDataError;
    }
    return kOk;
}

}  // namespace seebench::cli

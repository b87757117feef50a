#include "seebench/cli/commands.hpp"

#include "seebench/errors.hpp"
#include "seebench/io/config.hpp"
#include "seebench/physics.hpp"
#include "seebench/simulator.hpp"
#include "../io/text_util.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <yaml-cpp/yaml.h>

#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

namespace seebench::cli {

namespace {

constexpr std::string_view kColumns =
    "sample,species,let,irradiation_time_s,flux_source,flux,fluence,fluence_uncertainty,dose_gy,n_sel,n_fw_block,"
    "sigma_cm2,rate_per_s,period_s,hard_resets,soft_resets,pre_current_ma,post_current_ma,test_passed,status,"
    "break_time_s,break_fluence,events_file,telemetry_file,config_digest";

std::string opt(const std::optional<double>& v, std::string_view absent) {
    return v ? fmt::format("{}", *v) : std::string(absent);
}

std::optional<double> read_opt(std::string_view s, std::size_t line) {
    if (s == "undefined" || s == "n/a" || s == "unknown" || s.empty()) return std::nullopt;
    return io::detail::parse_double(s, "number", line);
}

// Mean summed current (mA) over powered samples in [from, to].
std::optional<double> mean_current_ma(const io::TelemetryFile& tel, double from, double to) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : tel.records) {
        if (r.power_on && r.t >= from && r.t <= to) {
            sum += r.current_sum_a * 1000.0;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

std::string read_text(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError(fmt::format("cannot open '{}'", path.string()), 0);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void check_csv_safe(const std::string& s) {
    if (s.find(',') != std::string::npos || s.find('\n') != std::string::npos) {
        throw DomainError(fmt::format("'{}' cannot be stored in a CSV field", s));
    }
}

}  // namespace

std::string analysis_csv_header() { return std::string(kColumns); }

std::string to_csv(const AnalysisRow& r) {
    for (const auto* s : {&r.sample, &r.events_file, &r.telemetry_file, &r.config_digest}) check_csv_safe(*s);
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", r.sample,
                       to_string(r.species), r.let, r.irradiation_time, r.flux_source, r.flux, r.fluence,
                       r.fluence_uncertainty, opt(r.dose_gy, "n/a"), r.n_sel, r.n_fw_block,
                       opt(r.sigma, "undefined"), opt(r.rate, "undefined"), opt(r.period, "undefined"),
                       r.hard_resets, r.soft_resets, opt(r.pre_current_ma, "unknown"),
                       opt(r.post_current_ma, "unknown"),
                       r.test_passed ? (*r.test_passed ? "yes" : "no") : "unknown", to_string(r.status),
                       opt(r.break_time, "n/a"), opt(r.break_fluence, "n/a"), r.events_file, r.telemetry_file,
                       r.config_digest);
}

std::vector<AnalysisRow> read_analysis_csv(std::istream& in) {
    std::vector<AnalysisRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line == kColumns) continue;
        auto f = io::detail::split(line, ',');
        if (f.size() != 25) throw ParseError(fmt::format("expected 25 analysis fields, got {}", f.size()), line_no);
        AnalysisRow r;
        try {
            r.sample = std::string(f[0]);
            r.species = parse_species(f[1]);
            r.let = io::detail::parse_double(f[2], "let", line_no);
            r.irradiation_time = io::detail::parse_double(f[3], "irradiation time", line_no);
            r.flux_source = std::string(f[4]);
            r.flux = io::detail::parse_double(f[5], "flux", line_no);
            r.fluence = io::detail::parse_double(f[6], "fluence", line_no);
            r.fluence_uncertainty = io::detail::parse_double(f[7], "fluence uncertainty", line_no);
            r.dose_gy = read_opt(f[8], line_no);
            r.n_sel = io::detail::parse_u64(f[9], "SEL count", line_no);
            r.n_fw_block = io::detail::parse_u64(f[10], "FW block count", line_no);
            r.sigma = read_opt(f[11], line_no);
            r.rate = read_opt(f[12], line_no);
            r.period = read_opt(f[13], line_no);
            r.hard_resets = io::detail::parse_u64(f[14], "hard resets", line_no);
            r.soft_resets = io::detail::parse_u64(f[15], "soft resets", line_no);
            r.pre_current_ma = read_opt(f[16], line_no);
            r.post_current_ma = read_opt(f[17], line_no);
            if (f[18] == "yes") r.test_passed = true;
            if (f[18] == "no") r.test_passed = false;
            r.status = parse_health(f[19]);
            r.break_time = read_opt(f[20], line_no);
            r.break_fluence = read_opt(f[21], line_no);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(e.what(), line_no);
        }
        r.events_file = std::string(f[22]);
        r.telemetry_file = std::string(f[23]);
        r.config_digest = std::string(f[24]);
        rows.push_back(std::move(r));
    }
    return rows;
}

AnalysisRow analyze_run(const RunArtifacts& run, const classify::RunParams& params) {
    const auto& c = run.config;
    const auto& h = run.events.header;
    const auto& ev = run.events.events;
    sim::PhaseTimeline timeline{h.segments};

    AnalysisRow r;
    r.sample = h.campaign_id;
    r.species = c.beam.species;
    r.let = c.beam.let;
    r.irradiation_time = timeline.gpio_time();
    r.events_file = run.events_file;
    r.telemetry_file = run.telemetry_file;
    r.config_digest = h.config_digest;

    // The scintillator measures the beam during the monitor phases; without
    // them the facility's nominal flux is used.
    const double monitor_time = timeline.beam_monitor_time();
    const auto counts = ev.count(EventKind::ScintCount);
    if (monitor_time > 0.0 && counts > 0) {
        double total = 0.0;
        for (const auto& e : ev) {
            if (e.kind == EventKind::ScintCount) total += e.payload;
        }
        auto est = physics::estimate_flux_from_scintillator(static_cast<long long>(std::llround(total)),
                                                            c.beam.spot.area_cm2(), monitor_time,
                                                            c.beam.background_flux);
        r.flux_source = "scintillator";
        r.flux = est.value();
    } else {
        r.flux_source = "config";
        r.flux = c.beam.nominal_flux;
    }
    auto fluence = physics::effective_fluence(r.flux, r.irradiation_time, c.beam.background_flux);
    r.fluence = fluence.value();
    r.fluence_uncertainty = fluence.uncertainty();
    if (is_ion(c.beam.species)) r.dose_gy = physics::dose_gy(r.fluence, r.let);

    r.n_sel = ev.count(EventKind::Sel);
    r.n_fw_block = ev.count(EventKind::FwBlock);
    if (r.fluence > 0.0) {
        r.sigma = physics::sel_fw_cross_section(static_cast<long long>(r.n_sel), static_cast<long long>(r.n_fw_block),
                                                r.fluence);
        r.rate = physics::event_rate(*r.sigma, r.flux);
        if (*r.rate > 0.0) r.period = physics::mean_period(*r.rate);
    }
    r.hard_resets = ev.count(EventKind::HardReset);
    r.soft_resets = ev.count(EventKind::SoftReset);

    if (run.telemetry && !run.telemetry->records.empty()) {
        const double end = run.telemetry->records.back().t;
        const double span = std::min(60.0, end / 4.0);
        r.pre_current_ma = mean_current_ma(*run.telemetry, 0.0, span);
        r.post_current_ma = mean_current_ma(*run.telemetry, end - span, end);
        if (r.pre_current_ma && r.post_current_ma) {
            const double tol = c.dut.baseline_current.uncertainty();
            r.test_passed = classify::test_passed(Quantity(*r.pre_current_ma, tol, Unit::MilliAmp),
                                                  Quantity(*r.post_current_ma, tol, Unit::MilliAmp),
                                                  run.eeprom_pre.value_or(""), run.eeprom_post.value_or(""));
        }
    }

    // A run with no beam at all is a radiation-less test of the chip.
    auto log = classify::reset_log_from_events(ev, h.test_windows(), h.duration);
    const bool beam_off = c.beam.nominal_flux == 0.0 && c.beam.background_flux.value() == 0.0;
    auto verdict = beam_off ? classify::chip_status(classify::ResetLog{}, log, params)
                            : classify::chip_status(log, classify::ResetLog{}, params);
    r.status = verdict.status;
    if (verdict.break_time) {
        r.break_time = verdict.break_time;
        r.break_fluence = classify::estimate_break_fluence(*verdict.break_time,
                                                           classify::flux_profile(timeline, r.flux));
    }
    return r;
}

Series fluence_series(const io::EventLogHeader& header, double flux, double background) {
    sim::PhaseTimeline timeline{header.segments};
    Series s{"t_s", "cumulative_fluence_cm-2", {}};
    s.points.emplace_back(0.0, 0.0);
    for (const auto& seg : header.segments) {
        s.points.emplace_back(seg.end, sim::cumulative_fluence(timeline, flux, background, seg.end));
    }
    return s;
}

Series adc_current_series(const io::TelemetryFile& telemetry, std::size_t adc_index) {
    Series s{"t_s", "adc_current_ma", {}};
    for (const auto& r : telemetry.records) {
        if (r.power_on && adc_index < r.currents_ma.size()) s.points.emplace_back(r.t, r.currents_ma[adc_index]);
    }
    return s;
}

void write_series(const Series& series, std::ostream& out) {
    fmt::print(out, "# {} {}\n", series.x_label, series.y_label);
    for (const auto& [x, y] : series.points) fmt::print(out, "{} {}\n", x, y);
}

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
    auto pick = [&](const std::optional<fs::path>& p, std::string_view name) -> std::optional<fs::path> {
        if (p) return p;
        if (!o.run_dir.empty() && fs::exists(o.run_dir / name)) return o.run_dir / name;
        return std::nullopt;
    };
    auto events_path = pick(o.events, "events.csv");
    auto telemetry_path = pick(o.telemetry, "telemetry.csv");
    auto config_path = pick(o.config, "config.yaml");
    if (!events_path) {
        fmt::print(err, "error: missing event log (--events or a run directory with events.csv)\n");
        return kDataError;
    }
    if (!config_path) {
        fmt::print(err, "error: missing beam spec (--config or a run directory with config.yaml)\n");
        return kUsage;
    }

    RunArtifacts run;
    try {
        run.config = io::load_campaign_config_file(*config_path);
    } catch (const ParseError& e) {
        fmt::print(err, "error: {}: {}\n", config_path->string(), e.what());
        return kUsage;
    }
    try {
        std::ifstream ef(*events_path);
        if (!ef) throw ParseError(fmt::format("cannot open '{}'", events_path->string()), 0);
        run.events = io::parse_event_log(ef);
        run.events_file = events_path->string();
        if (telemetry_path) {
            std::ifstream tf(*telemetry_path);
            if (!tf) throw ParseError(fmt::format("cannot open '{}'", telemetry_path->string()), 0);
            run.telemetry = io::parse_telemetry(tf);
            run.telemetry_file = telemetry_path->string();
        }
        auto manifest_path = events_path->parent_path() / "manifest.yaml";
        if (fs::exists(manifest_path)) {
            auto m = YAML::Load(read_text(manifest_path));
            if (m["eeprom_pre"]) run.eeprom_pre = m["eeprom_pre"].as<std::string>();
            if (m["eeprom_post"]) run.eeprom_post = m["eeprom_post"].as<std::string>();
        }
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kDataError;
    }

    AnalysisRow row;
    try {
        row = analyze_run(run, o.params);
    } catch (const std::exception& e) {
        fmt::print(err, "error: analysis failed: {}\n", e.what());
        return kDataError;
    }
    if (!row.sigma) fmt::print(err, "warning: zero fluence, cross-section undefined\n");
    fmt::print(out, "{}\n{}\n", analysis_csv_header(), to_csv(row));

    if (o.out) {
        try {
            fs::create_directories(*o.out);
            std::ofstream a(*o.out / "analysis.csv");
            fmt::print(a, "{}\n{}\n", analysis_csv_header(), to_csv(row));
            std::ofstream fsr(*o.out / "fluence_series.dat");
            write_series(fluence_series(run.events.header, row.flux, run.config.beam.background_flux.value()), fsr);
            if (run.telemetry) {
                std::ofstream as(*o.out / "adc_current.dat");
                write_series(adc_current_series(*run.telemetry, run.config.dut.adc_index().value_or(0)), as);
            }
            if (!a || !fsr) throw SinkError("cannot write analysis outputs", 0);
        } catch (const std::exception& e) {
            fmt::print(err, "error: {}\n", e.what());
            return kDataError;
        }
    }
    return kOk;
}

}  // namespace seebench::cli

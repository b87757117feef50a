#include "seebench/cli/commands.hpp"
#include "seebench/io/config.hpp"
#include "seebench/io/event_log.hpp"
#include "seebench/io/presets.hpp"
#include "seebench/io/reference_tables.hpp"
#include "seebench/simulator.hpp"
#include "support/oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace seebench;
using namespace seebench::cli;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / "seebench_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

std::size_t line_count(const fs::path& p) {
    auto s = slurp(p);
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

// Event log of a single-phase campaign holding only the given resets.
io::EventLogFile reset_log(const std::string& id, double duration, std::vector<double> resets) {
    std::sort(resets.begin(), resets.end());
    io::EventLogFile f;
    f.header.campaign_id = id;
    f.header.duration = duration;
    f.header.segments = {{0.0, duration, Phase::Gpio}};
    for (double t : resets) f.events.append(t, EventKind::HardReset);
    return f;
}

fs::path write_log(const fs::path& dir, const std::string& name, const io::EventLogFile& f) {
    auto p = dir / name;
    std::ofstream os(p);
    io::write_event_log(f.events, f.header, os);
    return p;
}

// Synthetic analysis input: the preset's timeline with exactly `blocks` FW blocks.
RunArtifacts preset_run(const std::string& id, std::size_t blocks) {
    auto tables = io::load_reference_tables();
    RunArtifacts run;
    run.config = io::preset(id, tables);
    auto tl = sim::generate_phase_timeline(run.config);
    run.events.header.campaign_id = id;
    run.events.header.duration = run.config.total_duration;
    run.events.header.segments = tl.segments;
    const double step = tl.gpio_time() / static_cast<double>(blocks + 1);
    for (std::size_t i = 1; i <= blocks; ++i) {
        run.events.events.append(sim::time_at_fluence(tl, 1.0, 0.0, step * static_cast<double>(i)), EventKind::FwBlock);
    }
    return run;
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(SEEBENCH_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("simulate writes a reproducible run directory", "[cli]") {
    auto dir = scratch("simulate");
    auto cfg = fs::path(SEEBENCH_SOURCE_DIR) / "configs" / "ST08.yaml";
    std::ostringstream out;
    std::ostringstream err;
    REQUIRE(cmd_simulate({cfg, 3, std::nullopt, dir / "a", true, 1}, out, err) == kOk);
    for (const char* f : {"config.yaml", "events.csv", "telemetry.csv", "manifest.yaml"}) CHECK(fs::exists(dir / "a" / f));
    auto manifest = slurp(dir / "a" / "manifest.yaml");
    CHECK_THAT(manifest, ContainsSubstring("config_digest"));
    CHECK_THAT(manifest, ContainsSubstring("seed: 3"));

    REQUIRE(cmd_simulate({cfg, 3, std::nullopt, dir / "b", true, 1}, out, err) == kOk);
    CHECK(slurp(dir / "a" / "events.csv") == slurp(dir / "b" / "events.csv"));
    CHECK(slurp(dir / "a" / "telemetry.csv") == slurp(dir / "b" / "telemetry.csv"));

    REQUIRE(cmd_simulate({cfg, std::nullopt, std::pair<std::uint64_t, std::uint64_t>{3, 5}, dir / "range", false, 2},
                         out, err) == kOk);
    CHECK(slurp(dir / "range" / "seed_3" / "events.csv") == slurp(dir / "a" / "events.csv"));
    CHECK(fs::exists(dir / "range" / "seed_5" / "events.csv"));
    CHECK_FALSE(fs::exists(dir / "range" / "seed_4" / "telemetry.csv"));
}

TEST_CASE("simulate rejects an invalid config without writing", "[cli]") {
    auto dir = scratch("simulate_bad");
    write_file(dir / "bad.yaml", "beam: {species: Kr84, nominal_flux: 100}\ntotal_duration: -5\n");
    std::ostringstream out;
    std::ostringstream err;
    CHECK(cmd_simulate({dir / "bad.yaml", 1, std::nullopt, dir / "out", true, 1}, out, err) == kUsage);
    CHECK_FALSE(fs::exists(dir / "out"));
    CHECK_THAT(err.str(), ContainsSubstring("total_duration"));

    write_file(dir / "typo.yaml", "beam: {species: Kr84, nominal_flux: abc}\ntotal_duration: 5\n");
    CHECK(cmd_simulate({dir / "typo.yaml", 1, std::nullopt, dir / "out", true, 1}, out, err) == kUsage);
    CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("analysis of runs with known counts", "[cli]") {
    auto st01 = analyze_run(preset_run("ST01", 816));
    CHECK(st01.flux_source == "config");
    CHECK(st01.fluence == Approx(1.01e7).epsilon(1e-9));
    REQUIRE(st01.sigma.has_value());
    CHECK(io::parse_printed("8.08e-5").agrees(*st01.sigma));
    REQUIRE(st01.dose_gy.has_value());
    CHECK(*st01.dose_gy == Approx(oracle::dose(1.01e7, 45.0)).epsilon(1e-12));
    CHECK(*st01.dose_gy == Approx(72.8).margin(0.05));
    CHECK(*st01.rate == Approx(*st01.sigma * st01.flux));

    auto st08 = analyze_run(preset_run("ST08", 15));
    CHECK(st08.fluence == Approx(2.6e5).epsilon(1e-9));
    CHECK(io::parse_printed("5.77e-5").agrees(*st08.sigma));

    auto s3 = analyze_run(preset_run("S3", 20));
    CHECK_FALSE(s3.dose_gy.has_value());

    RunArtifacts dark;
    dark.config.total_duration = 100.0;
    dark.config.beam.background_flux = Quantity(0.0, Unit::PerSquareCmSecond);
    dark.events.header.duration = 100.0;
    dark.events.header.segments = {{0.0, 100.0, Phase::Gpio}};
    auto d = analyze_run(dark);
    CHECK(d.n_fw_block == 0);
    CHECK_FALSE(d.sigma.has_value());
    CHECK_FALSE(d.period.has_value());
    CHECK(d.status == Health::Fine);
}

TEST_CASE("analysis csv round trip", "[cli]") {
    auto row = analyze_run(preset_run("ST05", 1248));
    std::istringstream in(analysis_csv_header() + "\n" + to_csv(row) + "\n");
    auto back = read_analysis_csv(in);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == row);
}

TEST_CASE("analyze a simulated run", "[cli]") {
    auto dir = scratch("analyze");
    auto cfg = fs::path(SEEBENCH_SOURCE_DIR) / "configs" / "ST01.yaml";
    std::ostringstream out;
    std::ostringstream err;
    REQUIRE(cmd_simulate({cfg, 1, std::nullopt, dir / "run", true, 1}, out, err) == kOk);
    AnalyzeOptions a;
    a.run_dir = dir / "run";
    a.out = dir / "analysis";
    REQUIRE(cmd_analyze(a, out, err) == kOk);
    std::ifstream in(dir / "analysis" / "analysis.csv");
    auto rows = read_analysis_csv(in);
    REQUIRE(rows.size() == 1);
    const auto& r = rows[0];
    CHECK(r.flux_source == "scintillator");
    CHECK(r.flux == Approx(1.68e3).epsilon(0.01));
    CHECK(r.irradiation_time == 6027.0);
    CHECK(r.n_sel == 0);
    CHECK(std::abs(static_cast<double>(r.n_fw_block) - 816.0) < 5.0 * std::sqrt(816.0));
    REQUIRE(r.test_passed.has_value());
    CHECK(*r.test_passed);
    CHECK(r.status == Health::Fine);
    CHECK(fs::exists(dir / "analysis" / "fluence_series.dat"));
    CHECK(fs::exists(dir / "analysis" / "adc_current.dat"));

    // Idempotent.
    std::ostringstream out2;
    a.out = dir / "analysis2";
    REQUIRE(cmd_analyze(a, out2, err) == kOk);
    CHECK(slurp(dir / "analysis" / "analysis.csv") == slurp(dir / "analysis2" / "analysis.csv"));

    AnalyzeOptions missing;
    missing.run_dir = dir / "nothing";
    CHECK(cmd_analyze(missing, out, err) == kDataError);
}

TEST_CASE("simulate, analyze and classify ST01 over 200 seeds", "[cli]") {
    auto tables = io::load_reference_tables();
    auto c = io::preset("ST01", tables);
    const auto digest = io::config_digest(c);
    double sigma_sum = 0.0;
    int passed = 0;
    int fine = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        c.seed = seed;
        auto result = sim::run_campaign(c);
        RunArtifacts run;
        run.config = c;
        run.events.header.campaign_id = c.campaign_id;
        run.events.header.config_digest = digest;
        run.events.header.seed = seed;
        run.events.header.duration = c.total_duration;
        run.events.header.segments = result.timeline.segments;
        run.events.events = result.events;
        io::TelemetryFile tel;
        tel.header.channel_order = io::default_channel_order();
        tel.records = std::move(result.telemetry);
        run.telemetry = std::move(tel);
        run.eeprom_pre = result.eeprom_pre;
        run.eeprom_post = result.eeprom_post;
        auto row = analyze_run(run);
        REQUIRE(row.sigma.has_value());
        sigma_sum += *row.sigma;
        passed += row.test_passed.value_or(false);
        fine += row.status == Health::Fine;
    }
    CHECK(passed == 200);
    CHECK(fine == 200);
    CHECK(sigma_sum / 200.0 == Approx(8.08e-5).epsilon(0.05));
}

TEST_CASE("classify command", "[cli]") {
    auto dir = scratch("classify");
    std::ostringstream out;
    std::ostringstream err;
    auto verdict = [&](std::optional<fs::path> irr, std::optional<fs::path> rad) {
        out.str("");
        ClassifyOptions o;
        o.irradiation = irr;
        o.radiationless = rad;
        REQUIRE(cmd_classify(o, out, err) == kOk);
        return out.str();
    };

    auto ws = oracle::windows(7200.0);
    auto s9_post = oracle::broken_bunches(ws, 109, 5);
    auto extra = oracle::scattered(2, 0.0, 1000.0);
    s9_post.insert(s9_post.end(), extra.begin(), extra.end());
    auto irr9 = write_log(dir, "s9_irr.csv", reset_log("S9", 10543.0, oracle::broken_bunches(oracle::windows(10543.0), 38, 5)));
    auto rad9 = write_log(dir, "s9_rad.csv", reset_log("S9", 7200.0, s9_post));
    CHECK_THAT(verdict(irr9, rad9), ContainsSubstring(",Broken,"));

    auto empty_irr = write_log(dir, "empty_irr.csv", reset_log("E", 1000.0, {}));
    auto empty_rad = write_log(dir, "empty_rad.csv", reset_log("E", 7200.0, {}));
    CHECK_THAT(verdict(empty_irr, empty_rad), ContainsSubstring(",Fine,"));
    CHECK_THAT(verdict(std::nullopt, std::nullopt), ContainsSubstring(",Fine,"));

    auto s7_irr = oracle::broken_bunches(oracle::windows(50365.0), 756, 5);
    auto irr7 = write_log(dir, "s7_irr.csv", reset_log("S7", 50365.0, s7_irr));
    auto rad7 = write_log(dir, "s7_rad.csv", reset_log("S7", 7200.0, oracle::scattered(8, 0.0, 7200.0)));
    auto v7 = verdict(irr7, rad7);
    CHECK_THAT(v7, ContainsSubstring(",Damaged,"));
    CHECK_THAT(v7, ContainsSubstring("," + std::to_string(s7_irr.size()) + ",8,"));

    ClassifyOptions bad;
    bad.irradiation = dir / "absent.csv";
    CHECK(cmd_classify(bad, out, err) == kDataError);
    ClassifyOptions bad_params;
    bad_params.params.period = 0.0;
    CHECK(cmd_classify(bad_params, out, err) == kUsage);
}

TEST_CASE("verify reproduces the reference numbers", "[cli]") {
    std::ostringstream out;
    std::ostringstream err;
    CHECK(cmd_verify(out, err) == kOk);
    CHECK_THAT(out.str(), ContainsSubstring("ST03"));
    CHECK_THAT(out.str(), ContainsSubstring("27 of 27"));
    auto checks = verify_checks();
    CHECK(checks.size() == 27);
    for (const auto& c : checks) CHECK(c.passed);

    VerifyTolerances tight{1e-9, 1e-9, 1e-9, 1e-9};
    auto strict = verify_checks(tight);
    CHECK(std::any_of(strict.begin(), strict.end(), [](const VerifyCheck& c) { return !c.passed; }));

    ::setenv("SEEBENCH_VERIFY_TOLERANCE", "0.05", 1);
    auto env = VerifyTolerances::from_environment();
    CHECK(env.rate == 0.05);
    CHECK(env.mission == 0.05);
    ::unsetenv("SEEBENCH_VERIFY_TOLERANCE");
    CHECK(VerifyTolerances::from_environment().rate == 0.01);
}

TEST_CASE("report over neutron runs", "[cli]") {
    auto dir = scratch("report");
    auto tables = io::load_reference_tables();
    std::ostringstream out;
    std::ostringstream err;
    std::vector<fs::path> inputs;
    for (const auto& id : io::neutron_sample_ids(tables)) {
        auto cfg = fs::path(SEEBENCH_SOURCE_DIR) / "configs" / (id + ".yaml");
        REQUIRE(cmd_simulate({cfg, 1, std::nullopt, dir / "runs" / id, false, 1}, out, err) == kOk);
        AnalyzeOptions a;
        a.run_dir = dir / "runs" / id;
        a.out = dir / "analysis" / id;
        REQUIRE(cmd_analyze(a, out, err) == kOk);
        inputs.push_back(*a.out);
    }
    REQUIRE(cmd_report({inputs, dir / "report"}, out, err) == kOk);
    CHECK(line_count(dir / "report" / "neutron_results.csv") == 8);
    auto text = slurp(dir / "report" / "neutron_results.csv");
    CHECK_THAT(text, ContainsSubstring("S9"));
    CHECK(fs::exists(dir / "report" / "series" / "S9_fluence.dat"));
}

TEST_CASE("report dates a break seen right after irradiation to its end", "[cli]") {
    auto dir = scratch("report_post");
    auto tables = io::load_reference_tables();
    auto irr = io::preset("S13", tables);
    auto post = io::radiationless_preset(irr, Health::Broken, 7200.0);
    post.campaign_id = "S13_post";
    std::ostringstream out;
    std::ostringstream err;
    std::vector<fs::path> inputs;
    for (const auto& c : {irr, post}) {
        write_file(dir / (c.campaign_id + ".yaml"), io::save_campaign_config(c));
        REQUIRE(cmd_simulate({dir / (c.campaign_id + ".yaml"), 1, std::nullopt, dir / c.campaign_id, false, 1}, out,
                             err) == kOk);
        AnalyzeOptions a;
        a.run_dir = dir / c.campaign_id;
        a.out = dir / (c.campaign_id + "_analysis");
        REQUIRE(cmd_analyze(a, out, err) == kOk);
        inputs.push_back(*a.out);
    }
    REQUIRE(cmd_report({inputs, dir / "report"}, out, err) == kOk);
    auto text = slurp(dir / "report" / "neutron_results.csv");
    CHECK_THAT(text, ContainsSubstring("S13,2.86e+10,2.86e+10,11361,Yes"));
    CHECK_THAT(slurp(dir / "report" / "reset_summary.csv"), ContainsSubstring("S13,"));
}

TEST_CASE("report shows the post-break current drop", "[cli]") {
    auto dir = scratch("report_drop");
    auto c = io::load_campaign_config("beam: {species: AtmosphericNeutron, nominal_flux: 1e6}\n"
                                      "total_duration: 1200\nforced_break_time: 600\nseed: 4\n"
                                      "phase_plan: {single_phase: true}\n");
    write_file(dir / "broken.yaml", io::save_campaign_config(c));
    std::ostringstream out;
    std::ostringstream err;
    REQUIRE(cmd_simulate({dir / "broken.yaml", std::nullopt, std::nullopt, dir / "run", true, 1}, out, err) == kOk);
    AnalyzeOptions a;
    a.run_dir = dir / "run";
    a.out = dir / "analysis";
    REQUIRE(cmd_analyze(a, out, err) == kOk);
    REQUIRE(cmd_report({{dir / "analysis"}, dir / "report"}, out, err) == kOk);

    std::ifstream in(dir / "report" / "series" / "campaign_adc_current.dat");
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    double t = 0.0;
    double ma = 0.0;
    double before = 0.0;
    double after = 0.0;
    int nb = 0;
    int na = 0;
    while (in >> t >> ma) {
        if (t < 600.0) {
            before += ma;
            ++nb;
        } else {
            after += ma;
            ++na;
        }
    }
    REQUIRE(nb > 0);
    REQUIRE(na > 0);
    CHECK(before / nb - after / na == Approx(1.5).margin(0.05));
}

TEST_CASE("report with no inputs warns and succeeds", "[cli]") {
    auto dir = scratch("report_empty");
    std::ostringstream out;
    std::ostringstream err;
    CHECK(cmd_report({{}, dir / "report"}, out, err) == kOk);
    CHECK_THAT(err.str(), ContainsSubstring("warning"));
    CHECK(line_count(dir / "report" / "neutron_results.csv") == 1);
}

TEST_CASE("command line", "[cli]") {
    CHECK(run_binary("verify") == 0);
    CHECK(run_binary("verify --bogus") == 1);
    CHECK(run_binary("") == 1);
    CHECK(run_binary("simulate --config /nonexistent.yaml --out /tmp/seebench_tests/none") == 1);
    auto dir = scratch("binary");
    CHECK(run_binary("presets --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "ST01.yaml"));
    CHECK(run_binary("classify --min-run 1") == 1);
}

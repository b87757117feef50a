#include "seebench/errors.hpp"
#include "seebench/io/config.hpp"
#include "seebench/io/digest.hpp"
#include "seebench/io/event_log.hpp"
#include "seebench/io/presets.hpp"
#include "seebench/io/reference_tables.hpp"
#include "seebench/io/telemetry.hpp"
#include "seebench/simulator.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>
#include <streambuf>

using namespace seebench;
using namespace seebench::io;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

TelemetryFileHeader header_for(const std::string& id) {
    TelemetryFileHeader h;
    h.campaign_id = id;
    h.config_digest = sha256_hex(id);
    h.channel_order = default_channel_order();
    return h;
}

TelemetryRecord baseline_record(double t) {
    TelemetryRecord r;
    r.t = t;
    for (const auto& ch : default_channels()) r.currents_ma.push_back(ch.nominal_ma);
    r.current_sum_a = 0.05;
    r.heartbeat_ok = true;
    r.power_on = true;
    r.phase = Phase::Gpio;
    return r;
}

std::string render(const std::vector<TelemetryRecord>& records, const TelemetryFileHeader& h) {
    std::ostringstream os;
    write_telemetry(records, h, os);
    return os.str();
}

TelemetryFile reparse(const std::string& text) {
    std::istringstream is(text);
    return parse_telemetry(is);
}

// Accepts `limit` characters, then fails every write.
class FailingBuf : public std::streambuf {
public:
    explicit FailingBuf(std::size_t limit) : limit_(limit) {}

protected:
    int_type overflow(int_type ch) override {
        if (written_ >= limit_) return traits_type::eof();
        ++written_;
        return ch;
    }

private:
    std::size_t limit_;
    std::size_t written_ = 0;
};

std::filesystem::path source_dir() { return SEEBENCH_SOURCE_DIR; }

}  // namespace

TEST_CASE("telemetry writer", "[io]") {
    auto h = header_for("t1");
    auto empty = render({}, h);
    CHECK(std::count(empty.begin(), empty.end(), '\n') == 1);
    CHECK_THAT(empty, ContainsSubstring("format_version=1"));
    CHECK_THAT(empty, ContainsSubstring("I_IO[6]"));

    auto one = render({baseline_record(0.0)}, h);
    CHECK_THAT(one, ContainsSubstring(",0.0500,"));
    auto parsed = reparse(one);
    REQUIRE(parsed.records.size() == 1);
    CHECK(parsed.records[0].current_sum_a == Approx(0.0500).margin(1e-12));
    CHECK(parsed.header == h);
}

TEST_CASE("telemetry round trip of simulator output", "[io]") {
    CampaignConfig c;
    c.campaign_id = "rt";
    c.total_duration = 300.0;
    c.beam.species = Species::AtmosphericNeutron;
    c.beam.let = 0.0;
    c.beam.nominal_flux = 1e6;
    c.beam.background_flux = Quantity(0.0, Unit::PerSquareCmSecond);
    c.phase_plan.single_phase = true;
    c.dut.sel_cross_section[Species::AtmosphericNeutron] = 1e-8;
    c.dut.fw_block_cross_section[Species::AtmosphericNeutron] = 2e-8;
    c.seed = 5;
    auto run = sim::run_campaign(c);
    REQUIRE(run.events.count(EventKind::Sel) > 0);
    auto h = header_for("rt");
    auto text = render(run.telemetry, h);
    auto back = reparse(text);
    CHECK(back.records == run.telemetry);
    CHECK(render(back.records, back.header) == text);
}

TEST_CASE("telemetry parse errors", "[io]") {
    auto h = header_for("e");
    auto text = render({baseline_record(0.0), baseline_record(0.1)}, h);

    // Drop one current from the last line.
    auto bad = text;
    auto last_line = bad.rfind('\n', bad.size() - 2) + 1;
    auto comma = bad.find(',', bad.find(',', last_line) + 1);
    bad.erase(comma, bad.find(',', comma + 1) - comma);
    try {
        reparse(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK_THAT(std::string(e.what()), ContainsSubstring("expected 14 channels, got 13"));
        CHECK(e.line() == 3);
    }

    auto v2 = text;
    v2.replace(v2.find("format_version=1"), 16, "format_version=2");
    CHECK_THROWS_AS(reparse(v2), UnsupportedVersionError);

    auto backwards = render({baseline_record(1.0), baseline_record(0.5)}, h);
    CHECK_THROWS_AS(reparse(backwards), ParseError);

    auto wrong_sum = text;
    wrong_sum.replace(wrong_sum.rfind(",0.0500,"), 8, ",0.0600,");
    CHECK_THROWS_AS(reparse(wrong_sum), ParseError);

    CHECK_THROWS_AS(reparse(""), ParseError);
    CHECK_THROWS_AS(reparse("1,2,3\n"), ParseError);
}

TEST_CASE("telemetry sink failure", "[io]") {
    std::vector<TelemetryRecord> records;
    for (int i = 0; i < 50; ++i) records.push_back(baseline_record(i * 0.1));
    FailingBuf buf(700);
    std::ostream os(&buf);
    try {
        write_telemetry(records, header_for("s"), os);
        FAIL("expected a sink error");
    } catch (const SinkError& e) {
        CHECK(e.position() <= 700);
    }
}

TEST_CASE("config defaults and required keys", "[io]") {
    auto c = load_campaign_config("beam:\n  species: Kr84\n  nominal_flux: 1680\ntotal_duration: 100\n");
    CHECK(c.beam.species == Species::Kr84);
    CHECK(c.beam.energy_mev == 1678.24);
    CHECK(c.beam.let == 45.0);
    CHECK(c.beam.nominal_flux == 1680.0);
    CHECK(c.watchdog_timeout == 6.7);
    CHECK(c.latchup_threshold == 1.0);
    CHECK(c.latchup_deadtime == 2.0);
    CHECK(c.gpio_cycle == 40.0);
    CHECK(c.tick == 0.1);
    CHECK(c.dut.channels.size() == kChannelCount);

    auto n = load_campaign_config("beam: {species: AtmosphericNeutron}\ntotal_duration: 10\n");
    CHECK(n.beam.let == 0.0);
    CHECK(n.beam.spot.shape == SpotGeometry::Shape::Square);

    CHECK_THROWS_AS(load_campaign_config(""), ParseError);
    CHECK_THROWS_AS(load_campaign_config("total_duration: 100\n"), ParseError);
    CHECK_THROWS_AS(load_campaign_config("beam: {species: Kr84}\ntotal_duration: 100\n"), ParseError);
    CHECK_THROWS_AS(load_campaign_config("beam: {species: Xe, nominal_flux: 1}\ntotal_duration: 1\n"), ParseError);
}

TEST_CASE("config errors name the offending path", "[io]") {
    try {
        load_campaign_config("beam:\n  species: Kr84\n  nominal_flux: abc\ntotal_duration: 100\n");
        FAIL("expected a type error");
    } catch (const ParseError& e) {
        CHECK_THAT(std::string(e.what()), ContainsSubstring("beam.nominal_flux"));
        CHECK_THAT(std::string(e.what()), ContainsSubstring("abc"));
        CHECK(e.line() == 3);
    }
    try {
        load_campaign_config("beam: {species: Kr84, nominal_flux: 1, colour: red}\ntotal_duration: 100\n");
        FAIL("expected an unknown-key error");
    } catch (const ParseError& e) {
        CHECK_THAT(std::string(e.what()), ContainsSubstring("unknown key 'beam.colour'"));
    }
}

TEST_CASE("config round trip", "[io]") {
    auto tables = load_reference_tables();
    for (const auto& p : all_presets(tables)) {
        auto text = save_campaign_config(p.config);
        auto back = load_campaign_config(text);
        CHECK(back == p.config);
        CHECK(save_campaign_config(back) == text);
        CHECK(config_digest(back) == config_digest(p.config));
    }
    CampaignConfig odd;
    odd.total_duration = 0.1 + 0.2;
    odd.beam.nominal_flux = 1.0 / 3.0;
    odd.forced_break_time = 123.456789012345;
    odd.initial_health = Health::Damaged;
    CHECK(load_campaign_config(save_campaign_config(odd)) == odd);
    odd.seed = 2;
    CHECK(config_digest(odd) != config_digest(CampaignConfig{}));
}

TEST_CASE("shipped preset files match the fixture", "[io]") {
    auto tables = load_reference_tables();
    auto presets = all_presets(tables);
    CHECK(presets.size() == 22);
    for (const auto& p : presets) {
        auto path = source_dir() / "configs" / (p.file_stem + ".yaml");
        INFO(path.string());
        REQUIRE(std::filesystem::exists(path));
        CHECK(load_campaign_config_file(path) == p.config);
    }
    auto st01 = load_campaign_config_file(source_dir() / "configs" / "ST01.yaml");
    CHECK(st01.beam.let == 45.0);
    CHECK(st01.beam.nominal_flux == Approx(1.68e3).epsilon(5e-3));
    CHECK(sim::generate_phase_timeline(st01).gpio_time() == 6027.0);
    CHECK_THROWS_AS(load_campaign_config_file(source_dir() / "configs" / "missing.yaml"), std::runtime_error);
}

TEST_CASE("event log round trip", "[io]") {
    auto tables = load_reference_tables();
    auto c = preset("ST08", tables);
    auto run = sim::run_campaign(c, sim::RunOptions{false});
    EventLogHeader h;
    h.campaign_id = c.campaign_id;
    h.config_digest = config_digest(c);
    h.seed = c.seed;
    h.duration = c.total_duration;
    h.segments = run.timeline.segments;
    std::ostringstream os;
    write_event_log(run.events, h, os);
    std::istringstream is(os.str());
    auto back = parse_event_log(is);
    CHECK(back.header == h);
    CHECK(back.events == run.events);
    CHECK(back.header.test_windows() == run.test_windows);

    std::istringstream bad("# seebench-events format_version=1 campaign=x\n10,FwBlock,0\n5,FwBlock,0\n");
    CHECK_THROWS_AS(parse_event_log(bad), ParseError);
    std::istringstream kind("# seebench-events format_version=1 campaign=x\n10,Meteor,0\n");
    CHECK_THROWS_AS(parse_event_log(kind), ParseError);
}

TEST_CASE("printed values", "[io]") {
    auto a = parse_printed("50.0 \xC2\xB1 0.5");
    CHECK(a.number() == 50.0);
    CHECK(*a.uncertainty == 0.5);
    auto s = parse_printed("8.08e-5");
    CHECK(s.significant_figures == 3);
    CHECK(s.resolution == Approx(1e-7));
    CHECK(s.agrees(8.0849e-5));
    CHECK_FALSE(s.agrees(8.09e-5));
    auto f = parse_printed("1.01", 1e7);
    CHECK(f.number() == Approx(1.01e7));
    CHECK(parse_printed("--").missing());
    CHECK(parse_printed("").missing());
    CHECK_THROWS_AS(parse_printed("--").number(), std::out_of_range);
    auto word = parse_printed("Yes");
    CHECK(word.missing());
    CHECK(word.text == "Yes");
}

TEST_CASE("reference tables", "[io]") {
    auto t = load_reference_tables();
    CHECK(t.ion_results().size() == 8);
    CHECK(t.cross_sections().size() == 8);
    CHECK(t.neutron_results().size() == 7);
    CHECK(t.reset_summary().size() == 7);
    auto blocks = t.environment_blocks();
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0].let == 45.0);
    CHECK(blocks[1].let == 34.0);
    CHECK(blocks[0].row("LEO").rate.text == "1.87e-12");

    CHECK(t.at("cross_sections", "ST05", "n_fw_block").number() == 1248.0);
    CHECK(t.at("neutron_results", "S7", "fluence_before_break").number() == Approx(5.89e9));
    CHECK(t.at("reset_summary", "S13", "after_transistor").number() == 12.0);
    CHECK(t.cell("reset_summary", "S15", "radiationless").value.missing());
    CHECK_THAT(t.cell("reset_summary", "S15", "radiationless").note, ContainsSubstring("missing"));
    CHECK(t.summary("mission_years").number() == 3.0);
    CHECK_THROWS_AS(t.at("cross_sections", "ST99", "sigma"), std::out_of_range);

    std::string text(embedded_reference_text());
    CHECK(sha256_hex(text) == embedded_reference_sha256());
    text[text.size() / 2] ^= 1;
    CHECK_THROWS_AS(load_reference_tables(text, embedded_reference_sha256()), CorruptionError);
}

TEST_CASE("digest", "[io]") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

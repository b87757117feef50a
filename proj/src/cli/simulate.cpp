#include "seebench/cli/commands.hpp"

#include "seebench/errors.hpp"
#include "seebench/io/config.hpp"
#include "seebench/io/digest.hpp"
#include "seebench/simulator.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace seebench::cli {

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw SinkError(fmt::format("cannot write {}", path.string()), 0);
}

std::string manifest_yaml(const CampaignConfig& c, const sim::CampaignResult& r, const std::string& digest,
                          const std::string& events_sha, const std::string& telemetry_sha) {
    auto num = [](double v) { return fmt::format("{}", v); };
    const double sigma = c.dut.fw_sigma(c.beam.species);
    const double beam_time = r.timeline.gpio_time();
    YAML::Emitter y;
    y << YAML::BeginMap;
    y << YAML::Key << "campaign_id" << YAML::Value << c.campaign_id;
    y << YAML::Key << "config_digest" << YAML::Value << digest;
    y << YAML::Key << "seed" << YAML::Value << c.seed;
    y << YAML::Key << "species" << YAML::Value << std::string(to_string(c.beam.species));
    y << YAML::Key << "let" << YAML::Value << num(c.beam.let);
    y << YAML::Key << "flux" << YAML::Value << num(c.beam.nominal_flux);
    y << YAML::Key << "fw_block_cross_section" << YAML::Value << num(sigma);
    y << YAML::Key << "sel_cross_section" << YAML::Value << num(c.dut.sel_sigma(c.beam.species));
    y << YAML::Key << "irradiation_time" << YAML::Value << num(beam_time);
    y << YAML::Key << "total_duration" << YAML::Value << num(c.total_duration);
    y << YAML::Key << "expected_fw_blocks" << YAML::Value << num(sigma * c.beam.nominal_flux * beam_time);
    y << YAML::Key << "event_counts" << YAML::Value << YAML::BeginMap;
    for (auto k : {EventKind::FwBlock, EventKind::Sel, EventKind::HardReset, EventKind::SoftReset, EventKind::Break,
                   EventKind::PowerOff, EventKind::PowerOn, EventKind::ScintCount}) {
        y << YAML::Key << std::string(to_string(k)) << YAML::Value << r.events.count(k);
    }
    y << YAML::EndMap;
    y << YAML::Key << "final_health" << YAML::Value << std::string(to_string(r.final_state.health));
    y << YAML::Key << "eeprom_pre" << YAML::Value << r.eeprom_pre;
    y << YAML::Key << "eeprom_post" << YAML::Value << r.eeprom_post;
    y << YAML::Key << "files" << YAML::Value << YAML::BeginMap;
    y << YAML::Key << "config" << YAML::Value << "config.yaml";
    y << YAML::Key << "events" << YAML::Value << "events.csv";
    y << YAML::Key << "events_sha256" << YAML::Value << events_sha;
    if (!telemetry_sha.empty()) {
        y << YAML::Key << "telemetry" << YAML::Value << "telemetry.csv";
        y << YAML::Key << "telemetry_sha256" << YAML::Value << telemetry_sha;
    }
    y << YAML::EndMap;
    y << YAML::EndMap;
    return std::string(y.c_str()) + "\n";
}

// Runs one seed and writes its artefacts. Everything is rendered in memory
// first so a failing run leaves no files behind.
void simulate_one(const CampaignConfig& config, const fs::path& dir, bool with_telemetry) {
    auto result = sim::run_campaign(config, sim::RunOptions{with_telemetry});
    const auto config_text = io::save_campaign_config(config);
    const auto digest = io::sha256_hex(config_text);

    io::EventLogHeader eh;
    eh.campaign_id = config.campaign_id;
    eh.config_digest = digest;
    eh.seed = config.seed;
    eh.duration = config.total_duration;
    eh.gpio_cycle = config.gpio_cycle;
    eh.gpio_window = config.gpio_window;
    eh.segments = result.timeline.segments;
    std::ostringstream events;
    io::write_event_log(result.events, eh, events);

    std::string telemetry_text;
    if (with_telemetry) {
        io::TelemetryFileHeader th;
        th.campaign_id = config.campaign_id;
        th.config_digest = digest;
        th.tick = config.tick;
        for (const auto& ch : config.dut.channels) th.channel_order.push_back(ch.label());
        std::ostringstream tel;
        io::write_telemetry(result.telemetry, th, tel);
        telemetry_text = tel.str();
    }
    const auto events_text = events.str();
    const auto manifest = manifest_yaml(config, result, digest, io::sha256_hex(events_text),
                                        with_telemetry ? io::sha256_hex(telemetry_text) : std::string{});

    fs::create_directories(dir);
    write_file(dir / "config.yaml", config_text);
    write_file(dir / "events.csv", events_text);
    if (with_telemetry) write_file(dir / "telemetry.csv", telemetry_text);
    write_file(dir / "manifest.yaml", manifest);
}

}  // namespace

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err) {
    CampaignConfig config;
    try {
        config = io::load_campaign_config_file(options.config);
    } catch (const ParseError& e) {
        fmt::print(err, "error: {}: {}\n", options.config.string(), e.what());
        return kUsage;
    }
    if (options.seed) config.seed = *options.seed;
    auto violations = validate(config);
    if (!violations.empty()) {
        for (const auto& v : violations) fmt::print(err, "error: invalid config: {}: {}\n", v.field, v.rule);
        return kUsage;
    }
    if (options.out.empty()) {
        fmt::print(err, "error: --out is required\n");
        return kUsage;
    }

    try {
        if (!options.seed_range) {
            simulate_one(config, options.out, options.telemetry);
            fmt::print(out, "{} seed {} -> {}\n", config.campaign_id, config.seed, options.out.string());
            return kOk;
        }
        auto [first, last] = *options.seed_range;
        if (last < first) {
            fmt::print(err, "error: empty seed range {}..{}\n", first, last);
            return kUsage;
        }
        unsigned jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
        std::atomic<std::uint64_t> next{first};
        std::mutex err_mutex;
        std::string failure;
        auto worker = [&] {
            for (std::uint64_t s = next++; s <= last; s = next++) {
                auto c = config;
                c.seed = s;
                try {
                    simulate_one(c, options.out / fmt::format("seed_{}", s), options.telemetry);
                } catch (const std::exception& e) {
                    std::lock_guard lock(err_mutex);
                    if (failure.empty()) failure = fmt::format("seed {}: {}", s, e.what());
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (!failure.empty()) {
            fmt::print(err, "error: {}\n", failure);
            return kDataError;
        }
        fmt::print(out, "{} seeds {}..{} -> {}\n", config.campaign_id, first, last, options.out.string());
        return kOk;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kDataError;
    }
}

}  // namespace seebench::cli

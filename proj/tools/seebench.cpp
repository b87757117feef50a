#include "seebench/cli/commands.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <charconv>
#include <iostream>

namespace {

namespace cli = seebench::cli;

// "N" or "A..B".
bool parse_seed(const std::string& text, cli::SimulateOptions& o) {
    auto to_u64 = [](std::string_view s, std::uint64_t& v) {
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        return !s.empty() && ec == std::errc{} && p == s.data() + s.size();
    };
    if (auto dots = text.find(".."); dots != std::string::npos) {
        std::uint64_t a = 0;
        std::uint64_t b = 0;
        if (!to_u64(std::string_view(text).substr(0, dots), a) || !to_u64(std::string_view(text).substr(dots + 2), b)) {
            return false;
        }
        o.seed_range = std::pair{a, b};
        return true;
    }
    std::uint64_t s = 0;
    if (!to_u64(text, s)) return false;
    o.seed = s;
    return true;
}

void add_run_params(CLI::App* cmd, seebench::classify::RunParams& p) {
    cmd->add_option("--period", p.period, "Broken-chip reset period (s)")->capture_default_str();
    cmd->add_option("--tolerance", p.tolerance, "Allowed deviation from the period (s)")->capture_default_str();
    cmd->add_option("--min-run", p.min_count, "Resets needed for a continuous run")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-event-effects test bench: simulate, analyse, classify and verify irradiation campaigns"};
    app.require_subcommand(1);

    cli::SimulateOptions sim;
    std::string seed_text;
    bool no_telemetry = false;
    auto* simulate = app.add_subcommand("simulate", "Run a campaign and write telemetry, events and manifest");
    simulate->add_option("--config", sim.config, "Campaign config (YAML)")->required();
    simulate->add_option("--seed", seed_text, "Seed N or inclusive range A..B");
    simulate->add_option("--out", sim.out, "Output directory")->required();
    simulate->add_option("--jobs", sim.jobs, "Parallel runs for a seed range (0: all cores)");
    simulate->add_flag("--no-telemetry", no_telemetry, "Write only the event log");

    cli::AnalyzeOptions an;
    auto* analyze = app.add_subcommand("analyze", "Fluence, dose, cross-section and rates of one run");
    analyze->add_option("--run", an.run_dir, "Run directory written by simulate");
    analyze->add_option("--telemetry", an.telemetry, "Telemetry file");
    analyze->add_option("--events", an.events, "Event log");
    analyze->add_option("--config", an.config, "Campaign config carrying the beam spec");
    analyze->add_option("--out", an.out, "Directory for analysis.csv and series files");
    add_run_params(analyze, an.params);

    cli::ClassifyOptions cl;
    auto* classify = app.add_subcommand("classify", "Fine / Damaged / Broken verdict from reset logs");
    classify->add_option("--irradiation", cl.irradiation, "Event log of the irradiation");
    classify->add_option("--radiationless", cl.radiationless, "Event log of the beam-off test");
    classify->add_option("--out", cl.out, "Write the verdict row to this file");
    add_run_params(classify, cl.params);

    auto* verify = app.add_subcommand("verify", "Recompute every derivable reference number");

    cli::ReportOptions rep;
    auto* report = app.add_subcommand("report", "Table files and series from analysis outputs");
    report->add_option("inputs", rep.inputs, "Analysis output directories");
    report->add_option("--out", rep.out, "Report directory")->required();

    std::filesystem::path preset_dir;
    auto* presets = app.add_subcommand("presets", "Write the shipped campaign presets");
    presets->add_option("--out", preset_dir, "Directory for <sample>.yaml files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kUsage;
    }

    if (*simulate) {
        if (!seed_text.empty() && !parse_seed(seed_text, sim)) {
            std::cerr << fmt::format("error: bad --seed '{}'\n", seed_text);
            return cli::kUsage;
        }
        sim.telemetry = !no_telemetry;
        return cli::cmd_simulate(sim, std::cout, std::cerr);
    }
    if (*analyze) return cli::cmd_analyze(an, std::cout, std::cerr);
    if (*classify) return cli::cmd_classify(cl, std::cout, std::cerr);
    if (*verify) return cli::cmd_verify(std::cout, std::cerr);
    if (*report) return cli::cmd_report(rep, std::cout, std::cerr);
    if (*presets) return cli::cmd_presets(preset_dir, std::cout, std::cerr);
    return cli::kUsage;
}

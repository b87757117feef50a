#pragma once

#include "seebench/classify.hpp"
#include "seebench/domain.hpp"
#include "seebench/io/event_log.hpp"
#include "seebench/io/telemetry.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace seebench::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kVerifyFailed = 3 };

// simulate ------------------------------------------------------------------

struct SimulateOptions {
    fs::path config;
    std::optional<std::uint64_t> seed;
    /// Inclusive seed range; each seed writes into out/seed_<n>.
    std::optional<std::pair<std::uint64_t, std::uint64_t>> seed_range;
    fs::path out;
    bool telemetry = true;
    unsigned jobs = 0;  // 0: hardware concurrency
};

/// Writes telemetry.csv, events.csv, config.yaml and manifest.yaml into the
/// output directory. Nothing is written when the config fails to load or validate.
int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);

// analyze -------------------------------------------------------------------

/// One analysed run. Optional numbers are undefined (zero fluence) or not
/// applicable (dose of a neutron run).
struct AnalysisRow {
    std::string sample;
    Species species = Species::Kr84;
    double let = 0.0;
    double irradiation_time = 0.0;
    std::string flux_source;  // "scintillator" or "config"
    double flux = 0.0;
    double fluence = 0.0;
    double fluence_uncertainty = 0.0;
    std::optional<double> dose_gy;
    std::size_t n_sel = 0;
    std::size_t n_fw_block = 0;
    std::optional<double> sigma;
    std::optional<double> rate;
    std::optional<double> period;
    std::size_t hard_resets = 0;
    std::size_t soft_resets = 0;
    std::optional<double> pre_current_ma;
    std::optional<double> post_current_ma;
    std::optional<bool> test_passed;
    Health status = Health::Fine;
    std::optional<double> break_time;
    std::optional<double> break_fluence;
    std::string events_file;
    std::string telemetry_file;
    std::string config_digest;

    friend bool operator==(const AnalysisRow&, const AnalysisRow&) = default;
};

std::string analysis_csv_header();
std::string to_csv(const AnalysisRow& row);
/// Reads rows written by to_csv; throws ParseError.
std::vector<AnalysisRow> read_analysis_csv(std::istream& in);

struct RunArtifacts {
    io::EventLogFile events;
    std::optional<io::TelemetryFile> telemetry;
    CampaignConfig config;
    std::optional<std::string> eeprom_pre;
    std::optional<std::string> eeprom_post;
    std::string events_file;
    std::string telemetry_file;
};

/// Counts events, derives fluence, dose, cross-section, rate and period, judges
/// the current/memory test and classifies the chip from its reset pattern.
AnalysisRow analyze_run(const RunArtifacts& run, const classify::RunParams& params = {});

struct Series {
    std::string x_label;
    std::string y_label;
    std::vector<std::pair<double, double>> points;
};

/// Cumulative fluence against time, one point per phase boundary.
Series fluence_series(const io::EventLogHeader& header, double flux, double background);
/// ADC supply current against time (powered samples only).
Series adc_current_series(const io::TelemetryFile& telemetry, std::size_t adc_index);
/// Two whitespace-separated columns under a `#` header comment.
void write_series(const Series& series, std::ostream& out);

struct AnalyzeOptions {
    fs::path run_dir;  // supplies any of the files below that are not given
    std::optional<fs::path> telemetry;
    std::optional<fs::path> events;
    std::optional<fs::path> config;
    std::optional<fs::path> out;
    classify::RunParams params;
};

/// Prints the analysis row; with `out` also writes analysis.csv and the series files.
int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);

// classify ------------------------------------------------------------------

struct ClassifyOptions {
    std::optional<fs::path> irradiation;
    std::optional<fs::path> radiationless;
    classify::RunParams params;
    std::optional<fs::path> out;
};

std::string verdict_csv_header();
std::string verdict_csv_row(std::string_view sample, const classify::HealthVerdict& verdict);

int cmd_classify(const ClassifyOptions& options, std::ostream& out, std::ostream& err);

// verify --------------------------------------------------------------------

struct VerifyCheck {
    std::string name;
    double computed = 0.0;
    std::string printed;
    std::string rule;  // "printed precision" or "within x%"
    bool passed = false;
};

/// Relative tolerances of the ranged checks; SEEBENCH_VERIFY_TOLERANCE, when
/// set to a positive number, replaces all of them.
struct VerifyTolerances {
    double rate = 0.01;
    double rate_geo_let34 = 0.02;
    double period = 0.01;
    double mission = 0.02;

    static VerifyTolerances from_environment();
};

/// Recomputes every derivable printed number from the fixture inputs.
std::vector<VerifyCheck> verify_checks(const VerifyTolerances& tolerances = {});

int cmd_verify(std::ostream& out, std::ostream& err);

// report --------------------------------------------------------------------

struct ReportOptions {
    /// Analysis output directories (analysis.csv, series files, optional verdict.csv).
    std::vector<fs::path> inputs;
    fs::path out;
};

/// Writes ion_results.csv, cross_sections.csv, environment_rates.csv,
/// neutron_results.csv, reset_summary.csv and per-run series files.
int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream& err);

// presets -------------------------------------------------------------------

/// Writes every shipped preset as <stem>.yaml into `out`.
int cmd_presets(const fs::path& out, std::ostream& os, std::ostream& err);

}  // namespace seebench::cli

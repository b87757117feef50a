#include "seebench/io/presets.hpp"

#include "seebench/errors.hpp"
#include "seebench/io/config.hpp"
#include "seebench/simulator.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seebench::io {

namespace {

constexpr double kGpioPhase = 600.0;
constexpr double kBeamMonitorPhase = 40.0;
constexpr double kRadiationlessDuration = 7200.0;
constexpr double kAnnealDays = 60.0;

bool contains(const std::vector<std::string>& ids, std::string_view id) {
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

// Campaign length whose GPIO phases add up to `beam_time`.
double campaign_length(double beam_time) {
    double full = std::floor(beam_time / kGpioPhase);
    double rest = beam_time - full * kGpioPhase;
    if (rest > 0.0) return full * (kGpioPhase + kBeamMonitorPhase) + rest;
    return full * (kGpioPhase + kBeamMonitorPhase) - kBeamMonitorPhase;
}

// Resets per unit fluence of the neutron chips that never broke, used as
// the pre-break FW-block cross-section of the ones that did.
double pooled_neutron_sigma(const ReferenceTables& tables) {
    double resets = 0.0;
    double fluence = 0.0;
    auto resets_by_sample = tables.reset_summary();
    for (const auto& row : tables.neutron_results()) {
        if (row.broken) continue;
        auto it = std::find_if(resets_by_sample.begin(), resets_by_sample.end(),
                               [&](const ResetRow& r) { return r.sample == row.sample; });
        resets += it->irradiation.number();
        fluence += row.total_fluence.number();
    }
    return resets / fluence;
}

}  // namespace

std::vector<std::string> ion_sample_ids(const ReferenceTables& tables) {
    std::vector<std::string> ids;
    for (const auto& r : tables.ion_results()) ids.push_back(r.sample);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<std::string> neutron_sample_ids(const ReferenceTables& tables) {
    std::vector<std::string> ids;
    for (const auto& r : tables.neutron_results()) ids.push_back(r.sample);
    return ids;
}

CampaignConfig ion_preset(std::string_view sample, const ReferenceTables& tables) {
    auto rows = tables.ion_results();
    auto row = std::find_if(rows.begin(), rows.end(), [&](const IonResultRow& r) { return r.sample == sample; });
    if (row == rows.end()) throw std::out_of_range(fmt::format("no heavy-ion sample '{}'", sample));
    auto sigmas = tables.cross_sections();
    auto counts = std::find_if(sigmas.begin(), sigmas.end(), [&](const CrossSectionRow& r) { return r.sample == sample; });
    if (counts == sigmas.end()) throw std::out_of_range(fmt::format("no cross-section row for '{}'", sample));

    const double fluence = row->fluence.number();
    const double beam_time = row->irradiation_time.number();
    CampaignConfig c;
    c.campaign_id = std::string(sample);
    c.seed = 1;
    c.beam = beam_defaults(row->species);
    c.beam.nominal_flux = fluence / beam_time;
    c.dut.fw_block_cross_section[row->species] = counts->n_fw_block.number() / fluence;
    c.dut.sel_cross_section[row->species] = counts->n_sel.number() / fluence;
    c.phase_plan = {kGpioPhase, kBeamMonitorPhase, false};
    c.total_duration = campaign_length(beam_time);
    return c;
}

CampaignConfig neutron_preset(std::string_view sample, const ReferenceTables& tables) {
    auto rows = tables.neutron_results();
    auto row = std::find_if(rows.begin(), rows.end(), [&](const NeutronRow& r) { return r.sample == sample; });
    if (row == rows.end()) throw std::out_of_range(fmt::format("no neutron sample '{}'", sample));
    auto resets = tables.reset_summary();
    auto reset_row = std::find_if(resets.begin(), resets.end(), [&](const ResetRow& r) { return r.sample == sample; });

    const double fluence = row->total_fluence.number();
    const double time = row->irradiation_time.number();
    CampaignConfig c;
    c.campaign_id = std::string(sample);
    c.seed = 1;
    c.beam = beam_defaults(Species::AtmosphericNeutron);
    c.beam.nominal_flux = fluence / time;
    c.phase_plan = {time, 0.0, true};
    c.total_duration = time;
    double sigma = row->broken ? pooled_neutron_sigma(tables) : reset_row->irradiation.number() / fluence;
    c.dut.fw_block_cross_section[Species::AtmosphericNeutron] = sigma;
    c.dut.sel_cross_section[Species::AtmosphericNeutron] = 0.0;
    // A break printed at the full fluence happened at the very end of the
    // exposure and is seen only in the follow-up tests.
    if (row->broken && !row->fluence_before_break.missing() &&
        row->fluence_before_break.number() < fluence) {
        c.forced_break_time = row->fluence_before_break.number() / c.beam.nominal_flux;
    }
    // A broken chip resets several times in every test window. Fewer resets
    // than windows in the later beam-off test means it recovered on annealing.
    if (row->broken && reset_row != resets.end() && !reset_row->after_60_days.missing()) {
        auto after = reset_row->after_60_days.number();
        c.dut.anneal_recovery = after < kRadiationlessDuration / c.gpio_cycle;
        c.dut.anneal_recovery_days = kAnnealDays;
        if (c.dut.anneal_recovery) c.dut.damaged_reset_rate = after / kRadiationlessDuration;
    }
    return c;
}

CampaignConfig preset(std::string_view sample, const ReferenceTables& tables) {
    if (contains(ion_sample_ids(tables), sample)) return ion_preset(sample, tables);
    if (contains(neutron_sample_ids(tables), sample)) return neutron_preset(sample, tables);
    throw std::out_of_range(fmt::format("unknown sample '{}'", sample));
}

CampaignConfig radiationless_preset(const CampaignConfig& base, Health health, double duration) {
    CampaignConfig c = base;
    c.beam.nominal_flux = 0.0;
    c.beam.background_flux = Quantity(0.0, 0.0, Unit::PerSquareCmSecond);
    c.phase_plan = {duration, 0.0, true};
    c.total_duration = duration;
    c.initial_health = health;
    c.forced_break_time.reset();
    c.dut.break_hazard = 0.0;
    c.dut.damage_hazard = 0.0;
    return c;
}

CampaignConfig radiationless_followup(std::string_view sample, double days, const ReferenceTables& tables) {
    auto base = neutron_preset(sample, tables);
    auto rows = tables.neutron_results();
    auto row = std::find_if(rows.begin(), rows.end(), [&](const NeutronRow& r) { return r.sample == sample; });
    sim::DutState end_state;
    end_state.health = row->broken ? Health::Broken : Health::Fine;
    auto state = sim::anneal(end_state, days, base.dut);
    auto c = radiationless_preset(base, state.health, kRadiationlessDuration);
    c.campaign_id = fmt::format("{}_{}d", sample, days);
    return c;
}

std::vector<NamedPreset> all_presets(const ReferenceTables& tables) {
    std::vector<NamedPreset> out;
    for (const auto& id : ion_sample_ids(tables)) out.push_back({id, ion_preset(id, tables)});
    for (const auto& id : neutron_sample_ids(tables)) out.push_back({id, neutron_preset(id, tables)});
    for (const auto& id : neutron_sample_ids(tables)) {
        auto c = radiationless_followup(id, kAnnealDays, tables);
        out.push_back({c.campaign_id, std::move(c)});
    }
    return out;
}

}  // namespace seebench::io

#pragma once

#include "seebench/domain.hpp"
#include "seebench/io/reference_tables.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace seebench::io {

/// Heavy-ion samples ST01..ST08 and neutron samples S3..S15 in table order.
std::vector<std::string> ion_sample_ids(const ReferenceTables& tables);
std::vector<std::string> neutron_sample_ids(const ReferenceTables& tables);

/// Irradiation campaign reproducing a heavy-ion sample: beam flux is the
/// recorded fluence over the in-beam time, which is split into 600 s GPIO
/// phases separated by 40 s beam-monitor phases, and the FW-block cross-section
/// is the recorded count over the recorded fluence.
CampaignConfig ion_preset(std::string_view sample, const ReferenceTables& tables);

/// Irradiation campaign reproducing a neutron sample: one GPIO phase for the
/// whole exposure, flux from total fluence over time. Chips recorded as broken
/// during irradiation break at the recorded fluence.
CampaignConfig neutron_preset(std::string_view sample, const ReferenceTables& tables);

/// Either kind, looked up by sample id; throws std::out_of_range when unknown.
CampaignConfig preset(std::string_view sample, const ReferenceTables& tables);

/// Two-hour beam-off test of a neutron sample `days` after its irradiation,
/// starting from the end-of-irradiation state annealed over `days`.
CampaignConfig radiationless_followup(std::string_view sample, double days, const ReferenceTables& tables);

/// Beam-off test of `base` lasting `duration` with the chip in `health`.
CampaignConfig radiationless_preset(const CampaignConfig& base, Health health, double duration);

struct NamedPreset {
    std::string file_stem;
    CampaignConfig config;
};

/// Every shipped preset: irradiation campaigns and 60-day neutron follow-ups.
std::vector<NamedPreset> all_presets(const ReferenceTables& tables);

}  // namespace seebench::io

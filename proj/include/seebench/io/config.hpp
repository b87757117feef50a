#pragma once

#include "seebench/domain.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace seebench::io {

/// Beam defaults for a species: energy, LET and spot of the facility that delivers it.
BeamSpec beam_defaults(Species species);

/// Parses a YAML campaign config. Only `beam` (with `species`, and
/// `nominal_flux` for ions) and `total_duration` are required; everything else
/// takes the protocol defaults. Unknown keys and type mismatches throw
/// ParseError naming the offending path. The result is not validated.
CampaignConfig load_campaign_config(std::string_view yaml_text);
CampaignConfig load_campaign_config_file(const std::filesystem::path& path);

/// Full YAML rendering of every field; numbers use the shortest text that
/// reads back to the same double, so save -> load is exact.
std::string save_campaign_config(const CampaignConfig& config);

/// SHA-256 of the canonical rendering.
std::string config_digest(const CampaignConfig& config);

}  // namespace seebench::io

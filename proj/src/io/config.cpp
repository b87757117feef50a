#include "seebench/io/config.hpp"

#include "seebench/errors.hpp"
#include "seebench/io/digest.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace seebench::io {

BeamSpec beam_defaults(Species species) {
    BeamSpec beam;
    beam.species = species;
    switch (species) {
        case Species::Kr84:
            beam.energy_mev = 1678.24;
            beam.let = 45.0;
            break;
        case Species::Kr78:
            beam.energy_mev = 780.0;
            beam.let = 34.0;
            break;
        case Species::AtmosphericNeutron:
            beam.energy_mev = 10.0;
            beam.let = 0.0;
            beam.nominal_flux = 5e6;
            beam.background_flux = Quantity(0.0, 0.0, Unit::PerSquareCmSecond);
            beam.spot = {SpotGeometry::Shape::Square, 70.0};
            break;
    }
    return beam;
}

namespace {

int line_of(const YAML::Node& node) { return node.Mark().line + 1; }

std::string child_path(const std::string& parent, std::string_view key) {
    return parent.empty() ? std::string(key) : fmt::format("{}.{}", parent, key);
}

// A mapping node whose keys are checked against an allow-list as they are read.
class Section {
public:
    Section(YAML::Node node, std::string path, std::initializer_list<std::string_view> allowed)
        : node_(std::move(node)), path_(std::move(path)) {
        if (!node_.IsMap()) {
            throw ParseError(fmt::format("type mismatch at '{}': expected a mapping", path_.empty() ? "<root>" : path_),
                             line_of(node_));
        }
        for (const auto& kv : node_) {
            auto key = kv.first.as<std::string>();
            bool known = false;
            for (auto a : allowed) known = known || key == a;
            if (!known) throw ParseError(fmt::format("unknown key '{}'", child_path(path_, key)), line_of(kv.first));
        }
    }

    bool has(std::string_view key) const { return static_cast<bool>(node_[std::string(key)]); }
    YAML::Node raw(std::string_view key) const { return node_[std::string(key)]; }
    std::string path(std::string_view key) const { return child_path(path_, key); }

    void require(std::string_view key) const {
        if (!has(key)) throw ParseError(fmt::format("missing required key '{}'", path(key)), line_of(node_));
    }

    std::string scalar(std::string_view key, std::string_view expected) const {
        auto n = raw(key);
        if (!n.IsScalar()) {
            throw ParseError(fmt::format("type mismatch at '{}': expected {}", path(key), expected), line_of(n));
        }
        return n.Scalar();
    }

    void read(std::string_view key, double& out) const {
        if (!has(key)) return;
        auto text = scalar(key, "a number");
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw ParseError(fmt::format("type mismatch at '{}': expected a number, got '{}'", path(key), text),
                             line_of(raw(key)));
        }
        out = v;
    }

    void read(std::string_view key, std::uint64_t& out) const {
        if (!has(key)) return;
        auto text = scalar(key, "an unsigned integer");
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw ParseError(fmt::format("type mismatch at '{}': expected an unsigned integer, got '{}'", path(key),
                                         text),
                             line_of(raw(key)));
        }
        out = v;
    }

    void read(std::string_view key, bool& out) const {
        if (!has(key)) return;
        auto text = scalar(key, "a boolean");
        if (text == "true") {
            out = true;
        } else if (text == "false") {
            out = false;
        } else {
            throw ParseError(fmt::format("type mismatch at '{}': expected true or false, got '{}'", path(key), text),
                             line_of(raw(key)));
        }
    }

    void read(std::string_view key, std::string& out) const {
        if (has(key)) out = scalar(key, "a string");
    }

    template <typename Enum, typename Parse>
    void read_enum(std::string_view key, Enum& out, Parse parse) const {
        if (!has(key)) return;
        auto text = scalar(key, "a name");
        try {
            out = parse(text);
        } catch (const std::exception&) {
            throw ParseError(fmt::format("type mismatch at '{}': unknown value '{}'", path(key), text),
                             line_of(raw(key)));
        }
    }

    void read(std::string_view key, Quantity& out) const {
        if (!has(key)) return;
        Section q(raw(key), path(key), {"value", "uncertainty"});
        double v = out.value();
        double u = out.uncertainty();
        q.read("value", v);
        q.read("uncertainty", u);
        try {
            out = Quantity(v, u, out.unit());
        } catch (const std::exception& e) {
            throw ParseError(fmt::format("invalid quantity at '{}': {}", path(key), e.what()), line_of(raw(key)));
        }
    }

    void read(std::string_view key, std::map<Species, double>& out) const {
        if (!has(key)) return;
        auto n = raw(key);
        if (n.IsNull()) {
            out.clear();
            return;
        }
        Section m(n, path(key), {"Kr84", "Kr78", "AtmosphericNeutron"});
        out.clear();
        for (auto s : {Species::Kr84, Species::Kr78, Species::AtmosphericNeutron}) {
            double v = 0.0;
            if (m.has(to_string(s))) {
                m.read(to_string(s), v);
                out[s] = v;
            }
        }
    }

private:
    YAML::Node node_;
    std::string path_;
};

SpotGeometry::Shape parse_shape(std::string_view text) {
    if (text == "circle") return SpotGeometry::Shape::Circle;
    if (text == "square") return SpotGeometry::Shape::Square;
    throw std::invalid_argument("shape");
}

std::string_view shape_name(SpotGeometry::Shape shape) {
    return shape == SpotGeometry::Shape::Circle ? "circle" : "square";
}

BeamSpec read_beam(const Section& root) {
    root.require("beam");
    Section s(root.raw("beam"), "beam", {"species", "energy_mev", "let", "nominal_flux", "background_flux", "spot"});
    s.require("species");
    Species species = Species::Kr84;
    s.read_enum("species", species, parse_species);
    BeamSpec beam = beam_defaults(species);
    if (is_ion(species)) s.require("nominal_flux");
    s.read("energy_mev", beam.energy_mev);
    s.read("let", beam.let);
    s.read("nominal_flux", beam.nominal_flux);
    s.read("background_flux", beam.background_flux);
    if (s.has("spot")) {
        Section spot(s.raw("spot"), s.path("spot"), {"shape", "size_mm"});
        spot.read_enum("shape", beam.spot.shape, parse_shape);
        spot.read("size_mm", beam.spot.size_mm);
    }
    return beam;
}

std::vector<Channel> read_channels(const Section& dut) {
    auto n = dut.raw("channels");
    if (!n.IsSequence()) {
        throw ParseError(fmt::format("type mismatch at '{}': expected a list", dut.path("channels")), line_of(n));
    }
    std::vector<Channel> channels;
    for (std::size_t i = 0; i < n.size(); ++i) {
        Section c(n[i], fmt::format("{}[{}]", dut.path("channels"), i), {"pin", "name", "description", "nominal_ma"});
        c.require("pin");
        c.require("name");
        Channel ch;
        c.read("pin", ch.pin);
        c.read("name", ch.name);
        c.read("description", ch.description);
        c.read("nominal_ma", ch.nominal_ma);
        channels.push_back(std::move(ch));
    }
    return channels;
}

DutProfile read_dut(const Section& root) {
    DutProfile dut;
    if (!root.has("dut")) return dut;
    Section s(root.raw("dut"), "dut",
              {"baseline_current", "broken_current_drop_ma", "fw_block_cross_section", "sel_cross_section",
               "break_hazard", "damage_hazard", "damaged_reset_rate", "sel_surge_current_a",
               "eeprom_flip_probability", "anneal_recovery", "anneal_recovery_days", "adc_pin", "channels"});
    s.read("baseline_current", dut.baseline_current);
    s.read("broken_current_drop_ma", dut.broken_current_drop_ma);
    s.read("fw_block_cross_section", dut.fw_block_cross_section);
    s.read("sel_cross_section", dut.sel_cross_section);
    s.read("break_hazard", dut.break_hazard);
    s.read("damage_hazard", dut.damage_hazard);
    s.read("damaged_reset_rate", dut.damaged_reset_rate);
    s.read("sel_surge_current_a", dut.sel_surge_current_a);
    s.read("eeprom_flip_probability", dut.eeprom_flip_probability);
    s.read("anneal_recovery", dut.anneal_recovery);
    s.read("anneal_recovery_days", dut.anneal_recovery_days);
    s.read("adc_pin", dut.adc_pin);
    if (s.has("channels")) dut.channels = read_channels(s);
    return dut;
}

CampaignConfig read_config(const YAML::Node& doc) {
    Section root(doc, "",
                 {"campaign_id", "seed", "total_duration", "tick", "gpio_cycle", "gpio_window", "watchdog_timeout",
                  "reset_overhead", "latchup_threshold", "latchup_deadtime", "temperature", "initial_health",
                  "forced_break_time", "phase_plan", "beam", "dut"});
    CampaignConfig c;
    c.beam = read_beam(root);
    c.dut = read_dut(root);
    root.require("total_duration");
    root.read("campaign_id", c.campaign_id);
    root.read("seed", c.seed);
    root.read("total_duration", c.total_duration);
    root.read("tick", c.tick);
    root.read("gpio_cycle", c.gpio_cycle);
    root.read("gpio_window", c.gpio_window);
    root.read("watchdog_timeout", c.watchdog_timeout);
    root.read("reset_overhead", c.reset_overhead);
    root.read("latchup_threshold", c.latchup_threshold);
    root.read("latchup_deadtime", c.latchup_deadtime);
    if (root.has("temperature")) {
        Section t(root.raw("temperature"), "temperature", {"value", "tolerance"});
        t.read("value", c.temperature_c);
        t.read("tolerance", c.temperature_tolerance_c);
    }
    root.read_enum("initial_health", c.initial_health, parse_health);
    if (root.has("forced_break_time")) {
        double t = 0.0;
        root.read("forced_break_time", t);
        c.forced_break_time = t;
    }
    if (root.has("phase_plan")) {
        Section p(root.raw("phase_plan"), "phase_plan", {"gpio_duration", "beam_monitor_duration", "single_phase"});
        p.read("gpio_duration", c.phase_plan.gpio_duration);
        p.read("beam_monitor_duration", c.phase_plan.beam_monitor_duration);
        p.read("single_phase", c.phase_plan.single_phase);
    }
    return c;
}

std::string num(double v) { return fmt::format("{}", v); }

void emit_quantity(YAML::Emitter& out, std::string_view key, const Quantity& q, std::string_view unc_key) {
    out << YAML::Key << std::string(key) << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "value" << YAML::Value << num(q.value());
    out << YAML::Key << std::string(unc_key) << YAML::Value << num(q.uncertainty());
    out << YAML::EndMap;
}

void emit_species_map(YAML::Emitter& out, std::string_view key, const std::map<Species, double>& m) {
    out << YAML::Key << std::string(key) << YAML::Value << YAML::Flow << YAML::BeginMap;
    for (const auto& [s, v] : m) out << YAML::Key << std::string(to_string(s)) << YAML::Value << num(v);
    out << YAML::EndMap;
}

}  // namespace

CampaignConfig load_campaign_config(std::string_view yaml_text) {
    YAML::Node doc;
    try {
        doc = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        throw ParseError(fmt::format("malformed YAML: {}", e.msg), e.mark.line + 1);
    }
    if (!doc || doc.IsNull()) throw ParseError("empty config: 'beam' and 'total_duration' are required", 1);
    return read_config(doc);
}

CampaignConfig load_campaign_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(fmt::format("cannot open config '{}'", path.string()), 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_campaign_config(ss.str());
}

std::string save_campaign_config(const CampaignConfig& c) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "campaign_id" << YAML::Value << YAML::DoubleQuoted << c.campaign_id;
    out << YAML::Key << "seed" << YAML::Value << c.seed;
    out << YAML::Key << "total_duration" << YAML::Value << num(c.total_duration);
    out << YAML::Key << "tick" << YAML::Value << num(c.tick);
    out << YAML::Key << "gpio_cycle" << YAML::Value << num(c.gpio_cycle);
    out << YAML::Key << "gpio_window" << YAML::Value << num(c.gpio_window);
    out << YAML::Key << "watchdog_timeout" << YAML::Value << num(c.watchdog_timeout);
    out << YAML::Key << "reset_overhead" << YAML::Value << num(c.reset_overhead);
    out << YAML::Key << "latchup_threshold" << YAML::Value << num(c.latchup_threshold);
    out << YAML::Key << "latchup_deadtime" << YAML::Value << num(c.latchup_deadtime);
    out << YAML::Key << "temperature" << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "value" << YAML::Value << num(c.temperature_c);
    out << YAML::Key << "tolerance" << YAML::Value << num(c.temperature_tolerance_c);
    out << YAML::EndMap;
    out << YAML::Key << "initial_health" << YAML::Value << std::string(to_string(c.initial_health));
    if (c.forced_break_time) out << YAML::Key << "forced_break_time" << YAML::Value << num(*c.forced_break_time);

    out << YAML::Key << "phase_plan" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "gpio_duration" << YAML::Value << num(c.phase_plan.gpio_duration);
    out << YAML::Key << "beam_monitor_duration" << YAML::Value << num(c.phase_plan.beam_monitor_duration);
    out << YAML::Key << "single_phase" << YAML::Value << (c.phase_plan.single_phase ? "true" : "false");
    out << YAML::EndMap;

    out << YAML::Key << "beam" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "species" << YAML::Value << std::string(to_string(c.beam.species));
    out << YAML::Key << "energy_mev" << YAML::Value << num(c.beam.energy_mev);
    out << YAML::Key << "let" << YAML::Value << num(c.beam.let);
    out << YAML::Key << "nominal_flux" << YAML::Value << num(c.beam.nominal_flux);
    emit_quantity(out, "background_flux", c.beam.background_flux, "uncertainty");
    out << YAML::Key << "spot" << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "shape" << YAML::Value << std::string(shape_name(c.beam.spot.shape));
    out << YAML::Key << "size_mm" << YAML::Value << num(c.beam.spot.size_mm);
    out << YAML::EndMap;
    out << YAML::EndMap;

    const auto& d = c.dut;
    out << YAML::Key << "dut" << YAML::Value << YAML::BeginMap;
    emit_quantity(out, "baseline_current", d.baseline_current, "uncertainty");
    out << YAML::Key << "broken_current_drop_ma" << YAML::Value << num(d.broken_current_drop_ma);
    emit_species_map(out, "fw_block_cross_section", d.fw_block_cross_section);
    emit_species_map(out, "sel_cross_section", d.sel_cross_section);
    out << YAML::Key << "break_hazard" << YAML::Value << num(d.break_hazard);
    out << YAML::Key << "damage_hazard" << YAML::Value << num(d.damage_hazard);
    out << YAML::Key << "damaged_reset_rate" << YAML::Value << num(d.damaged_reset_rate);
    out << YAML::Key << "sel_surge_current_a" << YAML::Value << num(d.sel_surge_current_a);
    out << YAML::Key << "eeprom_flip_probability" << YAML::Value << num(d.eeprom_flip_probability);
    out << YAML::Key << "anneal_recovery" << YAML::Value << (d.anneal_recovery ? "true" : "false");
    out << YAML::Key << "anneal_recovery_days" << YAML::Value << num(d.anneal_recovery_days);
    out << YAML::Key << "adc_pin" << YAML::Value << YAML::DoubleQuoted << d.adc_pin;
    out << YAML::Key << "channels" << YAML::Value << YAML::BeginSeq;
    for (const auto& ch : d.channels) {
        out << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "pin" << YAML::Value << YAML::DoubleQuoted << ch.pin;
        out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << ch.name;
        out << YAML::Key << "description" << YAML::Value << YAML::DoubleQuoted << ch.description;
        out << YAML::Key << "nominal_ma" << YAML::Value << num(ch.nominal_ma);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
    out << YAML::EndMap;
    if (!out.good()) throw InternalError(fmt::format("config emission failed: {}", out.GetLastError()));
    return std::string(out.c_str()) + "\n";
}

std::string config_digest(const CampaignConfig& config) { return sha256_hex(save_campaign_config(config)); }

}  // namespace seebench::io

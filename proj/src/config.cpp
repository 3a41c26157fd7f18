#include "dtebell/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "dtebell/errors.hpp"

namespace dtebell {

namespace {

namespace c = constants;

constexpr double kMilliGauss = 1e-7;  // T
constexpr double kMicron = 1e-6;
constexpr double kDegree = c::pi / 180.0;

const std::vector<std::string> kKeys = {
    "scenario.mass_amu",           "scenario.omega_guide_hz",  "scenario.omega_trap_hz",
    "scenario.trap_depth_nK",      "resonance.width_mG",       "resonance.moment_diff_muB",
    "resonance.a_bg_a0",           "resonance.position_mG",    "pulses.base_field_mG",
    "pulses.height_mG",            "pulses.duration_ms",       "pulses.separation_s",
    "interferometer.ell1_um",      "interferometer.ell2_um",   "interferometer.theta1_deg",
    "interferometer.theta2_deg",   "interferometer.mode",      "run.events",
    "run.seed",                    "source.model",             "source.molecules",
    "source.c_tilde_norm_sq",
};

bool known(const std::string& key) { return std::find(kKeys.begin(), kKeys.end(), key) != kKeys.end(); }

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw ConfigError(key + ": not a finite number: '" + text + "'");
    }
    return value;
}

std::uint64_t to_count(const std::string& key, const std::string& text) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError(key + ": not a non-negative integer: '" + text + "'");
    }
    return value;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return s;
}

std::string fmt_num(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

const std::vector<std::string>& ConfigDocument::known_keys() { return kKeys; }

ConfigDocument ConfigDocument::parse(std::string_view text, const std::string& origin) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(origin + ": line " + std::to_string(e.line()) + ": " + e.message());
    }
    ConfigDocument doc;
    doc.origin_ = origin;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError(origin + ": key '" + section + "' outside any section");
        for (const auto& [name, value] : body) {
            if (!value.empty()) throw ConfigError(origin + ": nested key under " + section + "." + name);
            doc.set(section + "." + name, value.data());
        }
    }
    return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw ConfigError(path + ": cannot open config file");
    std::ostringstream text;
    text << file.rdbuf();
    return parse(text.str(), path);
}

void ConfigDocument::set(const std::string& key, const std::string& value) {
    if (!known(key)) throw ConfigError(origin_ + ": unknown key '" + key + "'");
    values_[key] = trim(value);
}

void ConfigDocument::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
    set(trim(std::string_view(assignment).substr(0, eq)), assignment.substr(eq + 1));
}

Config ConfigDocument::resolve() const {
    Config cfg;
    Scenario& s = cfg.scenario;
    for (const auto& [key, text] : values_) {
        auto num = [&] { return to_double(key, text); };
        if (key == "scenario.mass_amu") s.species = Species::from_amu(num());
        else if (key == "scenario.omega_guide_hz") s.trap.omega_guide = 2.0 * c::pi * num();
        else if (key == "scenario.omega_trap_hz") s.trap.omega_trap = 2.0 * c::pi * num();
        else if (key == "scenario.trap_depth_nK") s.trap.trap_depth = c::boltzmann * 1e-9 * num();
        else if (key == "resonance.width_mG") s.resonance.width = kMilliGauss * num();
        else if (key == "resonance.moment_diff_muB") s.resonance.moment_diff = c::bohr_magneton * num();
        else if (key == "resonance.a_bg_a0") s.resonance.background_length = c::bohr_radius * num();
        else if (key == "resonance.position_mG") s.resonance.position = kMilliGauss * num();
        else if (key == "pulses.base_field_mG") s.pulses.base_field = kMilliGauss * num();
        else if (key == "pulses.height_mG") s.pulses.pulse_height = kMilliGauss * num();
        else if (key == "pulses.duration_ms") s.pulses.pulse_duration = 1e-3 * num();
        else if (key == "pulses.separation_s") s.pulses.pulse_separation = num();
        else if (key == "interferometer.ell1_um") cfg.ell1 = kMicron * num();
        else if (key == "interferometer.ell2_um") cfg.ell2 = kMicron * num();
        else if (key == "interferometer.theta1_deg") cfg.theta1 = kDegree * num();
        else if (key == "interferometer.theta2_deg") cfg.theta2 = kDegree * num();
        else if (key == "interferometer.mode") {
            const auto m = lower(text);
            if (m == "switched") cfg.mode = SwitchMode::Switched;
            else if (m == "beamsplitter" || m == "beam_splitter") cfg.mode = SwitchMode::BeamSplitter;
            else throw ConfigError(key + ": expected 'switched' or 'beamsplitter', got '" + text + "'");
        } else if (key == "run.events") cfg.events = to_count(key, text);
        else if (key == "run.seed") cfg.seed = to_count(key, text);
        else if (key == "source.model") {
            const auto m = lower(text);
            if (m == "gaussian") cfg.source = SourceModel::Gaussian;
            else if (m == "feshbach") cfg.source = SourceModel::Feshbach;
            else throw ConfigError(key + ": expected 'gaussian' or 'feshbach', got '" + text + "'");
        } else if (key == "source.molecules") cfg.molecules = num();
        else if (key == "source.c_tilde_norm_sq") cfg.c_tilde_norm_sq = num();
    }

    static const std::pair<const char*, const char*> kFieldKeys[] = {
        {"atom_mass", "scenario.mass_amu"},
        {"omega_guide", "scenario.omega_guide_hz"},
        {"omega_trap", "scenario.omega_trap_hz"},
        {"trap_depth", "scenario.trap_depth_nK"},
        {"resonance_width", "resonance.width_mG"},
        {"moment_diff", "resonance.moment_diff_muB"},
        {"background_length", "resonance.a_bg_a0"},
        {"resonance_position", "resonance.position_mG"},
        {"base_field", "pulses.base_field_mG"},
        {"pulse_height", "pulses.height_mG"},
        {"pulse_duration", "pulses.duration_ms"},
        {"pulse_separation", "pulses.separation_s"},
    };
    try {
        s.validate();
    } catch (const DomainError& e) {
        std::string key = e.field();
        for (const auto& [field, name] : kFieldKeys) {
            if (e.field() == field) key = name;
        }
        throw ConfigError(key + ": " + e.what());
    }
    auto check_theta = [](double theta, const char* key) {
        if (!(theta >= 0.0 && theta <= c::pi / 2.0 + 1e-12)) {
            throw ConfigError(std::string(key) + ": must lie in [0, 90] degrees");
        }
    };
    check_theta(cfg.theta1, "interferometer.theta1_deg");
    check_theta(cfg.theta2, "interferometer.theta2_deg");
    cfg.theta1 = std::min(cfg.theta1, c::pi / 2.0);
    cfg.theta2 = std::min(cfg.theta2, c::pi / 2.0);
    if (cfg.events < 1) throw ConfigError("run.events: must be at least 1");
    if (!(cfg.molecules >= 1.0)) throw ConfigError("source.molecules: must be at least 1");
    if (cfg.c_tilde_norm_sq && !(*cfg.c_tilde_norm_sq >= 0.0)) {
        throw ConfigError("source.c_tilde_norm_sq: must be non-negative");
    }
    return cfg;
}

std::string write_config(const Config& cfg) {
    const Scenario& s = cfg.scenario;
    std::string out;
    auto line = [&](const char* key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
    out += "[scenario]\n";
    line("mass_amu", fmt_num(s.species.atom_mass / c::atomic_mass_unit));
    line("omega_guide_hz", fmt_num(s.trap.omega_guide / (2.0 * c::pi)));
    line("omega_trap_hz", fmt_num(s.trap.omega_trap / (2.0 * c::pi)));
    line("trap_depth_nK", fmt_num(s.trap.trap_depth / (c::boltzmann * 1e-9)));
    out += "\n[resonance]\n";
    line("width_mG", fmt_num(s.resonance.width / kMilliGauss));
    line("moment_diff_muB", fmt_num(s.resonance.moment_diff / c::bohr_magneton));
    line("a_bg_a0", fmt_num(s.resonance.background_length / c::bohr_radius));
    line("position_mG", fmt_num(s.resonance.position / kMilliGauss));
    out += "\n[pulses]\n";
    line("base_field_mG", fmt_num(s.pulses.base_field / kMilliGauss));
    line("height_mG", fmt_num(s.pulses.pulse_height / kMilliGauss));
    line("duration_ms", fmt_num(s.pulses.pulse_duration / 1e-3));
    line("separation_s", fmt_num(s.pulses.pulse_separation));
    out += "\n[interferometer]\n";
    if (cfg.ell1) line("ell1_um", fmt_num(*cfg.ell1 / kMicron));
    if (cfg.ell2) line("ell2_um", fmt_num(*cfg.ell2 / kMicron));
    line("theta1_deg", fmt_num(cfg.theta1 / kDegree));
    line("theta2_deg", fmt_num(cfg.theta2 / kDegree));
    line("mode", cfg.mode == SwitchMode::Switched ? "switched" : "beamsplitter");
    out += "\n[run]\n";
    line("events", std::to_string(cfg.events));
    line("seed", std::to_string(cfg.seed));
    out += "\n[source]\n";
    line("model", cfg.source == SourceModel::Gaussian ? "gaussian" : "feshbach");
    line("molecules", fmt_num(cfg.molecules));
    if (cfg.c_tilde_norm_sq) line("c_tilde_norm_sq", fmt_num(*cfg.c_tilde_norm_sq));
    return out;
}

Config load_config(const std::string& path) { return ConfigDocument::load(path).resolve(); }

}  // namespace dtebell

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dtebell/correlation.hpp"
#include "dtebell/scenario.hpp"

namespace dtebell {

enum class SourceModel { Gaussian, Feshbach };

// Resolved run configuration, SI units.
struct Config {
    Scenario scenario = Scenario::lithium6();
    // Absolute arm-length variations; unset means the envelope centre.
    std::optional<double> ell1;
    std::optional<double> ell2;
    double theta1 = constants::pi / 4.0;
    double theta2 = constants::pi / 4.0;
    SwitchMode mode = SwitchMode::Switched;
    std::uint64_t events = 10000;
    std::uint64_t seed = 20240917;
    SourceModel source = SourceModel::Gaussian;
    double molecules = 100.0;
    // Overlap norm entering the dissociation probability; unset means one
    // molecule of `molecules` dissociates on average.
    std::optional<double> c_tilde_norm_sq;

    bool operator==(const Config&) const = default;
};

// Sectioned key-value document in lab units:
//   [scenario]       mass_amu omega_guide_hz omega_trap_hz trap_depth_nK
//   [resonance]      width_mG moment_diff_muB a_bg_a0 position_mG
//   [pulses]         base_field_mG height_mG duration_ms separation_s
//   [interferometer] ell1_um ell2_um theta1_deg theta2_deg mode
//   [run]            events seed
//   [source]         model molecules c_tilde_norm_sq
// Frequencies are cyclic (omega / 2 pi). Missing keys take the built-in
// Li-6 values. Unknown sections or keys are rejected with ConfigError.
class ConfigDocument {
public:
    static ConfigDocument parse(std::string_view text, const std::string& origin = "<config>");
    static ConfigDocument load(const std::string& path);

    // `key` is "section.name". Throws ConfigError for unknown keys.
    void set(const std::string& key, const std::string& value);
    // Parses "section.name=value".
    void apply_override(const std::string& assignment);

    const std::map<std::string, std::string>& values() const noexcept { return values_; }

    // Converts to SI and validates the scenario. Throws ConfigError naming
    // the offending key.
    Config resolve() const;

    static const std::vector<std::string>& known_keys();

private:
    std::map<std::string, std::string> values_;
    std::string origin_ = "<config>";
};

// Every key written out in lab units with 17 significant digits; parsing
// the result reproduces `config` to within unit-conversion rounding.
std::string write_config(const Config& config);

Config load_config(const std::string& path);

}  // namespace dtebell

#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "dtebell/bell.hpp"
#include "dtebell/correlation.hpp"
#include "dtebell/rng.hpp"

namespace dtebell {

struct PortOutcome {
    int sigma1 = 1;
    int sigma2 = 1;
    bool operator==(const PortOutcome&) const = default;
};

// Inverse-CDF draw over (+,+), (+,-), (-,+), (-,-). In BeamSplitter mode
// the event is first discarded with probability 1/2. Throws Error when `p`
// is not a normalised distribution.
std::optional<PortOutcome> sample_event(const CorrelationResult& p, SwitchMode mode, SplitMixStream& rng);

template <class Setting>
struct RunConfigOf {
    std::uint64_t events_per_setting = 10000;
    std::uint64_t seed = 0;
    SwitchMode mode = SwitchMode::Switched;
    ChshSettingsOf<Setting> settings;
};
using RunConfig = RunConfigOf<InterferometerSetting>;

struct SettingCounts {
    std::array<std::uint64_t, 4> n{};  // (+,+), (+,-), (-,+), (-,-)
    std::uint64_t discarded = 0;

    std::uint64_t kept() const noexcept { return n[0] + n[1] + n[2] + n[3]; }
    bool operator==(const SettingCounts&) const = default;
};

// Setting pairs in the order (a,b), (a,b'), (a',b), (a',b').
struct CountTable {
    std::array<SettingCounts, 4> pairs{};
    std::uint64_t events_per_setting = 0;
    std::uint64_t seed = 0;
    SwitchMode mode = SwitchMode::Switched;

    bool operator==(const CountTable&) const = default;
};

// Pair i draws from the stream derive_key(seed, i).
CountTable sample_counts(const std::array<CorrelationResult, 4>& probabilities,
                         std::uint64_t events_per_setting, std::uint64_t seed, SwitchMode mode);

template <class Setting>
std::array<CorrelationResult, 4> chsh_probabilities(const CorrelatorOf<Setting>& correlator,
                                                    const ChshSettingsOf<Setting>& s) {
    return {correlator(s.a, s.b), correlator(s.a, s.b_prime), correlator(s.a_prime, s.b),
            correlator(s.a_prime, s.b_prime)};
}

template <class Setting>
CountTable run(const CorrelatorOf<Setting>& correlator, const RunConfigOf<Setting>& config) {
    if (config.events_per_setting < 1) throw DomainError("events", "must be at least 1");
    return sample_counts(chsh_probabilities(correlator, config.settings), config.events_per_setting,
                         config.seed, config.mode);
}

struct CorrelationEstimate {
    std::array<double, 4> e_values{};
    std::array<double, 4> variances{};
    double s_value = 0.0;
    double standard_error = 0.0;
};

// E_i = (n++ + n-- - n+- - n-+) / n_kept with variance (1 - E_i^2) / n_kept.
// Throws InsufficientDataError when a pair kept fewer than two events.
CorrelationEstimate estimate_correlations(const CountTable& counts);

template <class Setting>
BellOutcomeOf<Setting> estimate_chsh(const CountTable& counts, const ChshSettingsOf<Setting>& settings) {
    const auto est = estimate_correlations(counts);
    return make_outcome(est.e_values, settings, /*sampled=*/true, est.standard_error);
}

BellOutcome estimate_chsh(const CountTable& counts);

}  // namespace dtebell

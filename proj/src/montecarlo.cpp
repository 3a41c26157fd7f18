#include "dtebell/montecarlo.hpp"

#include <cmath>
#include <string>

#include "dtebell/errors.hpp"
#include "dtebell/parallel.hpp"

namespace dtebell {

namespace {

constexpr PortOutcome kPorts[4] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};

void check_distribution(const CorrelationResult& p) {
    double total = 0.0;
    for (double v : p.p) {
        if (!(v >= 0.0 && v <= 1.0)) throw Error("sample_event: probability outside [0, 1]");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error("sample_event: probabilities not normalised");
}

std::size_t draw_port(const CorrelationResult& p, double u) {
    double cumulative = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        cumulative += p.p[k];
        if (u < cumulative) return k;
    }
    // Remaining mass, never a zero-probability port.
    for (std::size_t k = 4; k-- > 0;) {
        if (p.p[k] > 0.0) return k;
    }
    return 3;
}

}  // namespace

std::optional<PortOutcome> sample_event(const CorrelationResult& p, SwitchMode mode, SplitMixStream& rng) {
    check_distribution(p);
    if (mode == SwitchMode::BeamSplitter && rng.uniform() < 0.5) return std::nullopt;
    return kPorts[draw_port(p, rng.uniform())];
}

CountTable sample_counts(const std::array<CorrelationResult, 4>& probabilities,
                         std::uint64_t events_per_setting, std::uint64_t seed, SwitchMode mode) {
    if (events_per_setting < 1) throw DomainError("events", "must be at least 1");
    for (const auto& p : probabilities) check_distribution(p);

    CountTable table;
    table.events_per_setting = events_per_setting;
    table.seed = seed;
    table.mode = mode;
    const auto pairs = parallel_map(4, [&](std::size_t i) {
        SplitMixStream rng(seed, i);
        SettingCounts counts;
        const auto& p = probabilities[i];
        for (std::uint64_t e = 0; e < events_per_setting; ++e) {
            if (mode == SwitchMode::BeamSplitter && rng.uniform() < 0.5) {
                ++counts.discarded;
                continue;
            }
            ++counts.n[draw_port(p, rng.uniform())];
        }
        return counts;
    });
    for (std::size_t i = 0; i < 4; ++i) table.pairs[i] = pairs[i];
    return table;
}

CorrelationEstimate estimate_correlations(const CountTable& counts) {
    CorrelationEstimate est;
    double variance = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& c = counts.pairs[i];
        const std::uint64_t kept = c.kept();
        if (kept < 2) {
            throw InsufficientDataError("setting pair " + std::to_string(i) + " kept " +
                                        std::to_string(kept) + " events, need at least 2");
        }
        const double n = static_cast<double>(kept);
        const double e = (static_cast<double>(c.n[0]) + static_cast<double>(c.n[3]) -
                          static_cast<double>(c.n[1]) - static_cast<double>(c.n[2])) /
                         n;
        est.e_values[i] = e;
        est.variances[i] = (1.0 - e * e) / n;
        variance += est.variances[i];
    }
    est.s_value = chsh_combination(est.e_values);
    est.standard_error = std::sqrt(variance);
    return est;
}

BellOutcome estimate_chsh(const CountTable& counts) { return estimate_chsh(counts, ChshSettings{}); }

}  // namespace dtebell

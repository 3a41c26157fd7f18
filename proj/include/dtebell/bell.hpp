#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "dtebell/constants.hpp"
#include "dtebell/correlation.hpp"
#include "dtebell/errors.hpp"
#include "dtebell/scenario.hpp"

namespace dtebell {

inline constexpr double kTsirelsonBound = 2.8284271247461900976;  // 2 sqrt(2)
inline constexpr double kTsirelsonTolerance = 1e-9;
inline constexpr double kViolationThreshold = 0.70710678118654752440;  // 1/sqrt(2)

// Settings for the four CHSH measurements. `Setting` is an
// InterferometerSetting for length-controlled interferometers, or an
// analyser angle for the spin reference model.
template <class Setting>
struct ChshSettingsOf {
    Setting a{};
    Setting a_prime{};
    Setting b{};
    Setting b_prime{};
};

using ChshSettings = ChshSettingsOf<InterferometerSetting>;
using ChshAngles = ChshSettingsOf<double>;

template <class Setting>
struct BellOutcomeOf {
    double s_value = 0.0;
    double visibility = 0.0;
    bool violated = false;
    ChshSettingsOf<Setting> settings;
    double margin = 0.0;  // s_value - 2
    // E(a,b), E(a,b'), E(a',b), E(a',b')
    std::array<double, 4> e_values{};
    double standard_error = 0.0;
    // Set instead of throwing when a sampled estimate exceeds 2 sqrt(2).
    bool above_tsirelson = false;
};

using BellOutcome = BellOutcomeOf<InterferometerSetting>;
using SpinBellOutcome = BellOutcomeOf<double>;

template <class Setting>
using CorrelatorOf = std::function<CorrelationResult(const Setting&, const Setting&)>;
using Correlator = CorrelatorOf<InterferometerSetting>;
using AngleCorrelator = CorrelatorOf<double>;

// S = |E(a,b) - E(a,b') + E(a',b) + E(a',b')|.
inline double chsh_combination(const std::array<double, 4>& e) {
    return std::abs(e[0] - e[1] + e[2] + e[3]);
}

// Fringe amplitude implied by two settings a quarter period apart on each side.
inline double visibility_estimate(const std::array<double, 4>& e) {
    return 0.5 * (std::hypot(e[0], e[1]) + std::hypot(e[2], e[3]));
}

// Assembles an outcome from the four correlator values. An exact
// correlator above 2 sqrt(2) + 1e-9 is an error; sampled estimates
// (`sampled`) only carry the flag.
template <class Setting>
BellOutcomeOf<Setting> make_outcome(const std::array<double, 4>& e, const ChshSettingsOf<Setting>& settings,
                                    bool sampled = false, double standard_error = 0.0) {
    BellOutcomeOf<Setting> out;
    out.e_values = e;
    out.settings = settings;
    out.s_value = chsh_combination(e);
    out.visibility = std::min(1.0, visibility_estimate(e));
    out.violated = out.s_value > 2.0;
    out.margin = out.s_value - 2.0;
    out.standard_error = standard_error;
    out.above_tsirelson = out.s_value > kTsirelsonBound + kTsirelsonTolerance;
    if (out.above_tsirelson && !sampled) {
        throw Error("CHSH value " + std::to_string(out.s_value) + " exceeds the Tsirelson bound");
    }
    return out;
}

template <class Setting>
BellOutcomeOf<Setting> chsh_value(const CorrelatorOf<Setting>& correlator,
                                  const ChshSettingsOf<Setting>& s) {
    const std::array<double, 4> e = {
        correlator(s.a, s.b).e_value,
        correlator(s.a, s.b_prime).e_value,
        correlator(s.a_prime, s.b).e_value,
        correlator(s.a_prime, s.b_prime).e_value,
    };
    return make_outcome(e, s);
}

// P = {1 + s1 s2 cos(phi1 - phi2)} / 4.
CorrelationResult spin_reference_correlation(double phi1, double phi2);
AngleCorrelator spin_reference_correlator();
// a = 0, a' = pi/2, b = pi/4, b' = 3 pi/4.
ChshAngles textbook_angles();

// V = [(1 + tau^2/T_cm^2)(1 + tau^2/T_rel^2)]^(-1/4).
double visibility(const TimescaleSummary& scales, double tau);

struct Feasibility {
    bool feasible = false;
    double product = 0.0;       // (1 + tau^2/T_cm^2)(1 + tau^2/T_rel^2)
    double lambda_ratio = 0.0;  // lambda_bar / (tau v_rel)
    bool product_below_four = false;
    bool lambda_guard_passed = false;
};

inline constexpr double kLambdaRatioGuard = 0.01;
Feasibility feasible(const TimescaleSummary& scales, double tau, double lambda_ratio_guard = kLambdaRatioGuard);

// Smallest tau at which visibility() drops to `threshold`, by bisection.
// Returns +infinity when no crossing exists below `tau_max`.
double visibility_crossing(const TimescaleSummary& scales, double threshold = kViolationThreshold,
                           double tau_max = 1e6);

Correlator closed_form_correlator(const ClosedFormModel& model);
Correlator quadrature_correlator(const DtePair& pair, const QuadratureOptions& options = {});

// Length settings whose effective analyser angles are the textbook CHSH
// angles, placed around the envelope centre l1 - l2 = tau v_rel, l1 + l2 = 0.
ChshSettings seed_settings(const ClosedFormModel& model);

struct LengthBounds {
    double ell1_lo = -std::numeric_limits<double>::infinity();
    double ell1_hi = std::numeric_limits<double>::infinity();
    double ell2_lo = -std::numeric_limits<double>::infinity();
    double ell2_hi = std::numeric_limits<double>::infinity();
};

struct OptimizeOptions {
    double step = 0.0;  // m, half-width of each line search; required
    int max_sweeps = 50;
    double tolerance = 1e-13;  // stop when a sweep gains less than this in S
    LengthBounds bounds;
};

struct OptimizedSettings {
    ChshSettings settings;
    double s_value = 0.0;
    int sweeps = 0;
    bool converged = false;
};

// Coordinate ascent of S over the four lengths, one bounded Brent line
// search per length and sweep. Deterministic for given inputs.
OptimizedSettings optimize_settings(const Correlator& correlator, const ChshSettings& initial,
                                    const OptimizeOptions& options);

// Seeds from `model` and optimises its closed-form correlator.
OptimizedSettings optimize_closed_form(const ClosedFormModel& model);

// Extent of the l1 scan (l2 held at the envelope centre) over which the
// envelope-adjusted visibility stays above `threshold`, in fringe periods.
struct FringeRegion {
    double ell1_lo = 0.0;
    double ell1_hi = 0.0;
    double periods = 0.0;
};
FringeRegion fringe_periods_above_threshold(const ClosedFormModel& model,
                                            double threshold = kViolationThreshold);

}  // namespace dtebell

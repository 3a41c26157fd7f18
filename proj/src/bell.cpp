#include "dtebell/bell.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>

namespace dtebell {

using constants::pi;

CorrelationResult spin_reference_correlation(double phi1, double phi2) {
    return correlation_from_interference(std::cos(phi1 - phi2), InterferometerSetting{},
                                         InterferometerSetting{}, CorrelationMethod::Reference);
}

AngleCorrelator spin_reference_correlator() {
    return [](const double& a, const double& b) { return spin_reference_correlation(a, b); };
}

ChshAngles textbook_angles() { return ChshAngles{0.0, pi / 2.0, pi / 4.0, 3.0 * pi / 4.0}; }

double visibility(const TimescaleSummary& scales, double tau) {
    if (!(tau >= 0.0)) throw DomainError("tau", "must be non-negative");
    const double a = tau / scales.t_cm;
    const double b = tau / scales.t_rel;
    return std::pow((1.0 + a * a) * (1.0 + b * b), -0.25);
}

Feasibility feasible(const TimescaleSummary& scales, double tau, double lambda_ratio_guard) {
    if (!(tau >= 0.0)) throw DomainError("tau", "must be non-negative");
    Feasibility f;
    const double a = tau / scales.t_cm;
    const double b = tau / scales.t_rel;
    f.product = (1.0 + a * a) * (1.0 + b * b);
    f.lambda_ratio = tau > 0.0 ? scales.lambda_bar_rel / (tau * scales.v_rel)
                               : std::numeric_limits<double>::infinity();
    f.product_below_four = f.product < 4.0;
    f.lambda_guard_passed = f.lambda_ratio < lambda_ratio_guard;
    f.feasible = f.product_below_four && f.lambda_guard_passed;
    return f;
}

double visibility_crossing(const TimescaleSummary& scales, double threshold, double tau_max) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw DomainError("threshold", "must lie in (0, 1)");
    if (visibility(scales, tau_max) > threshold) return std::numeric_limits<double>::infinity();
    double lo = 0.0;
    double hi = tau_max;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (visibility(scales, mid) > threshold ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Correlator closed_form_correlator(const ClosedFormModel& model) {
    model.validate();
    return [model](const InterferometerSetting& a, const InterferometerSetting& b) {
        return model.correlate(a, b);
    };
}

Correlator quadrature_correlator(const DtePair& pair, const QuadratureOptions& options) {
    return [pair, options](const InterferometerSetting& a, const InterferometerSetting& b) {
        return correlate_quadrature(pair, a, b, options);
    };
}

ChshSettings seed_settings(const ClosedFormModel& model) {
    const auto angles = textbook_angles();
    const double lb = model.scales().lambda_bar_rel;
    const double l1c = model.center_ell1();
    const double l2c = model.center_ell2();
    const double center_phase = model.fringe_phase(l1c, l2c);
    const double mean_a = 0.5 * (angles.a + angles.a_prime);
    const double mean_b = 0.5 * (angles.b + angles.b_prime);
    // Split the phase still needed at the centre evenly between the arms.
    const double shift = std::remainder(mean_a - mean_b - center_phase, 2.0 * pi);
    auto arm1 = [&](double alpha) {
        return InterferometerSetting{l1c + lb * (alpha - mean_a + 0.5 * shift)};
    };
    auto arm2 = [&](double beta) {
        return InterferometerSetting{l2c + lb * (beta - mean_b - 0.5 * shift)};
    };
    return ChshSettings{arm1(angles.a), arm1(angles.a_prime), arm2(angles.b), arm2(angles.b_prime)};
}

OptimizedSettings optimize_settings(const Correlator& correlator, const ChshSettings& initial,
                                    const OptimizeOptions& options) {
    if (!(options.step > 0.0)) throw DomainError("step", "must be positive");
    if (options.max_sweeps < 1) throw DomainError("max_sweeps", "must be at least 1");

    OptimizedSettings best;
    best.settings = initial;
    best.s_value = chsh_value(correlator, initial).s_value;

    struct Coordinate {
        InterferometerSetting ChshSettings::*member;
        double lo;
        double hi;
    };
    const auto& bd = options.bounds;
    const Coordinate coords[] = {
        {&ChshSettings::a, bd.ell1_lo, bd.ell1_hi},
        {&ChshSettings::a_prime, bd.ell1_lo, bd.ell1_hi},
        {&ChshSettings::b, bd.ell2_lo, bd.ell2_hi},
        {&ChshSettings::b_prime, bd.ell2_lo, bd.ell2_hi},
    };
    for (const auto& c : coords) {
        const double x = (initial.*c.member).ell;
        if (x < c.lo || x > c.hi) throw DomainError("initial", "settings outside the length bounds");
    }

    for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
        const double start = best.s_value;
        for (const auto& c : coords) {
            const double x0 = (best.settings.*c.member).ell;
            const double t_lo = std::max(-1.0, (c.lo - x0) / options.step);
            const double t_hi = std::min(1.0, (c.hi - x0) / options.step);
            if (!(t_hi > t_lo)) continue;
            ChshSettings trial = best.settings;
            auto negative_s = [&](double t) {
                (trial.*c.member).ell = x0 + t * options.step;
                return -chsh_value(correlator, trial).s_value;
            };
            const auto [t, value] = boost::math::tools::brent_find_minima(negative_s, t_lo, t_hi, 52);
            if (-value > best.s_value) {
                (best.settings.*c.member).ell = x0 + t * options.step;
                best.s_value = -value;
            }
        }
        best.sweeps = sweep;
        if (best.s_value - start <= options.tolerance) {
            best.converged = true;
            break;
        }
    }
    return best;
}

OptimizedSettings optimize_closed_form(const ClosedFormModel& model) {
    OptimizeOptions options;
    options.step = 0.5 * model.scales().lambda_bar_rel;
    return optimize_settings(closed_form_correlator(model), seed_settings(model), options);
}

FringeRegion fringe_periods_above_threshold(const ClosedFormModel& model, double threshold) {
    const double lb = model.scales().lambda_bar_rel;
    const double l1c = model.center_ell1();
    const double l2c = model.center_ell2();
    const double v = model.visibility();
    FringeRegion region{l1c, l1c, 0.0};
    if (!(v * model.envelope(l1c, l2c) > threshold)) return region;

    // The envelope along l1 is a Gaussian peaked near the centre; find the
    // threshold crossing on each side.
    auto above = [&](double offset) { return v * model.envelope(l1c + offset, l2c) > threshold; };
    auto crossing = [&](double direction) {
        double inside = 0.0;
        double outside = direction * lb;
        while (above(outside)) {
            inside = outside;
            outside *= 2.0;
        }
        for (int i = 0; i < 200 && std::abs(outside - inside) > 1e-12 * lb; ++i) {
            const double mid = 0.5 * (inside + outside);
            (above(mid) ? inside : outside) = mid;
        }
        return 0.5 * (inside + outside);
    };
    region.ell1_lo = l1c + crossing(-1.0);
    region.ell1_hi = l1c + crossing(1.0);
    region.periods = std::abs(model.fringe_phase(region.ell1_hi, l2c) -
                              model.fringe_phase(region.ell1_lo, l2c)) /
                     (2.0 * pi);
    return region;
}

}  // namespace dtebell

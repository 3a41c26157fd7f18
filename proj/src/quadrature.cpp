#include "dtebell/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <stdexcept>

namespace dtebell::quad {

Rule composite_gauss_legendre(std::span<const double> breaks) {
    if (breaks.size() < 2) throw std::invalid_argument("composite_gauss_legendre: need two breaks");
    using Gauss = boost::math::quadrature::gauss<double, kPanelOrder>;
    const auto& abscissa = Gauss::abscissa();  // non-negative half, 8 entries for n = 16
    const auto& weight = Gauss::weights();

    Rule rule;
    const std::size_t panels = breaks.size() - 1;
    rule.nodes.reserve(panels * kPanelOrder);
    rule.weights.reserve(panels * kPanelOrder);
    for (std::size_t k = 0; k < panels; ++k) {
        const double a = breaks[k];
        const double b = breaks[k + 1];
        if (!(b > a)) throw std::invalid_argument("composite_gauss_legendre: breaks not increasing");
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        for (std::size_t i = abscissa.size(); i-- > 0;) {
            rule.nodes.push_back(mid - half * abscissa[i]);
            rule.weights.push_back(half * weight[i]);
        }
        for (std::size_t i = 0; i < abscissa.size(); ++i) {
            rule.nodes.push_back(mid + half * abscissa[i]);
            rule.weights.push_back(half * weight[i]);
        }
    }
    return rule;
}

namespace {

// Cumulative |rate| on a uniform sample grid; cumulative[0] == 0.
std::vector<double> cumulative_variation(double lo, double hi, const RateFn& rate,
                                         std::size_t samples) {
    std::vector<double> cumulative(samples + 1, 0.0);
    const double h = (hi - lo) / static_cast<double>(samples);
    double previous = std::abs(rate(lo));
    for (std::size_t i = 1; i <= samples; ++i) {
        const double current = std::abs(rate(lo + h * static_cast<double>(i)));
        cumulative[i] = cumulative[i - 1] + 0.5 * h * (previous + current);
        previous = current;
    }
    return cumulative;
}

}  // namespace

double total_variation(double lo, double hi, const RateFn& rate, std::size_t samples) {
    if (!(hi > lo)) return 0.0;
    return cumulative_variation(lo, hi, rate, samples).back();
}

std::vector<double> equidistributed_breaks(double lo, double hi, const RateFn& rate,
                                           double radians_per_panel, std::size_t min_panels,
                                           std::size_t samples) {
    if (!(hi > lo)) throw std::invalid_argument("equidistributed_breaks: empty interval");
    min_panels = std::max<std::size_t>(min_panels, 1);
    const auto cumulative = cumulative_variation(lo, hi, rate, samples);
    const double total = cumulative.back();
    const auto by_phase =
        static_cast<std::size_t>(std::ceil(total / std::max(radians_per_panel, 1e-300)));
    const std::size_t panels = std::max(min_panels, by_phase);

    // Blend phase-equidistribution with uniform spacing so flat stretches
    // still receive panels.
    const double h = (hi - lo) / static_cast<double>(samples);
    std::vector<double> blended(cumulative.size());
    for (std::size_t i = 0; i < cumulative.size(); ++i) {
        const double uniform = static_cast<double>(i) / static_cast<double>(samples);
        const double phase = total > 0.0 ? cumulative[i] / total : uniform;
        const double w = total > 0.0 ? std::min(1.0, static_cast<double>(by_phase) / panels) : 0.0;
        blended[i] = w * phase + (1.0 - w) * uniform;
    }

    std::vector<double> breaks;
    breaks.reserve(panels + 1);
    breaks.push_back(lo);
    std::size_t j = 0;
    for (std::size_t k = 1; k < panels; ++k) {
        const double target = static_cast<double>(k) / static_cast<double>(panels);
        while (j + 1 < blended.size() && blended[j + 1] < target) ++j;
        const double span = blended[j + 1] - blended[j];
        const double frac = span > 0.0 ? (target - blended[j]) / span : 0.0;
        const double x = lo + h * (static_cast<double>(j) + frac);
        if (x > breaks.back()) breaks.push_back(x);
    }
    breaks.push_back(hi);
    return breaks;
}

std::vector<double> refine(std::span<const double> breaks) {
    std::vector<double> out;
    if (breaks.empty()) return out;
    out.reserve(2 * breaks.size() - 1);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        out.push_back(breaks[i]);
        out.push_back(0.5 * (breaks[i] + breaks[i + 1]));
    }
    out.push_back(breaks.back());
    return out;
}

}  // namespace dtebell::quad

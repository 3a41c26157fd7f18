#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dtebell::quad {

// Nodes and weights of a one-dimensional rule over [lo, hi].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }
};

inline constexpr std::size_t kPanelOrder = 16;

// Composite 16-point Gauss-Legendre rule over the panels delimited by
// `breaks` (strictly increasing, at least two entries).
Rule composite_gauss_legendre(std::span<const double> breaks);

// Local oscillation rate of an integrand, radians per unit of the variable.
using RateFn = std::function<double(double)>;

// Integral of |rate| over [lo, hi] from a fine trapezoid sweep.
double total_variation(double lo, double hi, const RateFn& rate, std::size_t samples = 4096);

// Panel breaks over [lo, hi] such that every panel sweeps about
// `radians_per_panel` of phase. Never fewer than `min_panels` panels; panels
// are additionally limited to `max_width` (when positive) so that smooth but
// strongly peaked integrands remain resolved.
std::vector<double> equidistributed_breaks(double lo, double hi, const RateFn& rate,
                                           double radians_per_panel, std::size_t min_panels,
                                           std::size_t samples = 4096);

// Each panel split in two.
std::vector<double> refine(std::span<const double> breaks);

}  // namespace dtebell::quad

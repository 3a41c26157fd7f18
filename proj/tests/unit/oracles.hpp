#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "dtebell/distribution.hpp"

namespace dtebell::testing {

// Lobe-by-lobe Gauss-Kronrod integral of the density over the whole plane,
// in scaled variables. Lobes are delimited by the zeros of the sinc factor
// up to x = 2000; beyond, sin^2 is replaced by its mean and the remaining
// oscillatory part is below 1e-7.
inline double plane_integral(const FeshbachDistribution& d) {
    using boost::math::quadrature::gauss_kronrod;
    const double p0 = d.p0();
    const double R = d.shell_ratio();
    const double sc = d.cm_state().sigma_p / p0;
    auto rho = [&](double u, double w) { return p0 * p0 * d.density(u * p0, w * p0); };
    auto rel_integral = [&](double u) {
        const double base = 1.0 - 0.25 * u * u;
        auto w_at = [&](double x) { return std::sqrt(base + x / R); };
        const double x0 = -base * R;
        double sum = 0.0;
        double lo = 0.0;
        long n = static_cast<long>(std::ceil(x0 / M_PI));
        if (n * M_PI == x0) ++n;
        const double x_end = 2000.0;
        for (; n * M_PI <= x_end; ++n) {
            const double hi = w_at(n * M_PI);
            sum += gauss_kronrod<double, 15>::integrate([&](double w) { return rho(u, w); }, lo, hi, 0, 0);
            lo = hi;
        }
        const double g = std::exp(-0.5 * u * u / (sc * sc)) / (std::sqrt(2.0 * M_PI) * sc);
        const double B = d.lorentz_ratio();
        const double norm = d.normalization();
        auto mean_tail = [&](double w) {
            const double x = (0.25 * u * u + w * w - 1.0) * R;
            const double lorentz = 1.0 / (1.0 + x / (R * B));
            return norm * R / M_PI * 0.5 / (x * x) * lorentz * lorentz * g;
        };
        sum += gauss_kronrod<double, 31>::integrate(mean_tail, lo, std::numeric_limits<double>::infinity(), 15, 1e-12);
        return 2.0 * sum;
    };
    return gauss_kronrod<double, 61>::integrate(rel_integral, -9.0 * sc, 9.0 * sc, 6, 1e-10);
}

}  // namespace dtebell::testing

#include "dtebell/distribution.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "dtebell/constants.hpp"
#include "dtebell/errors.hpp"
#include "dtebell/quadrature.hpp"

namespace dtebell {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
// Half-width of Gaussian windows, in standard deviations.
constexpr double kGaussWindow = 8.0;

double normal_pdf(double x, double mean, double sigma) {
    const double z = (x - mean) / sigma;
    return kInvSqrt2Pi / sigma * std::exp(-0.5 * z * z);
}

// Two-sided mass beyond kGaussWindow standard deviations.
double gauss_outside_mass() { return std::erfc(kGaussWindow / std::sqrt(2.0)); }

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

// integral_lo^inf f(w) dw for a positive, algebraically decaying f, via
// w = lo / t on (0, 1].
template <class F>
double algebraic_tail(double lo, F&& f) {
    using Gauss = boost::math::quadrature::gauss<double, 30>;
    return Gauss::integrate(
        [&](double s) {
            const double t = 0.5 * (s + 1.0);
            if (t <= 0.0) return 0.0;
            const double w = lo / t;
            return 0.5 * f(w) * lo / (t * t);
        },
        -1.0, 1.0);
}

}  // namespace

double GaussianMode::density(double p) const {
    validate("sigma_p");
    return normal_pdf(p, mean_p, sigma_p);
}

void GaussianMode::validate(const char* field) const {
    if (!(sigma_p > 0.0) || !std::isfinite(sigma_p)) throw DomainError(field, "spread must be positive");
    if (!std::isfinite(mean_p)) throw DomainError(field, "mean must be finite");
}

// ---------------------------------------------------------------- Gaussian

GaussianPair::GaussianPair(GaussianMode cm, GaussianMode rel) : cm_(cm), rel_(rel) {
    cm_.validate("cm.sigma_p");
    rel_.validate("rel.sigma_p");
    if (!(rel_.mean_p > 0.0)) throw DomainError("rel.mean_p", "must be positive");
    if (rel_.sigma_p * kGaussWindow >= rel_.mean_p) {
        throw DomainError("rel.sigma_p", "relative branches at +-p0 overlap");
    }
}

GaussianPair GaussianPair::shifted(double dx_cm, double dx_rel) const {
    GaussianPair out = *this;
    out.x_cm_ += dx_cm;
    out.x_rel_ += dx_rel;
    return out;
}

double GaussianPair::density(double p_cm, double p_rel) const {
    const double rel = 0.5 * (normal_pdf(p_rel, rel_.mean_p, rel_.sigma_p) +
                              normal_pdf(p_rel, -rel_.mean_p, rel_.sigma_p));
    return normal_pdf(p_cm, cm_.mean_p, cm_.sigma_p) * rel;
}

std::complex<double> GaussianPair::amplitude(double p_cm, double p_rel) const {
    using namespace std::complex_literals;
    const double hbar = constants::hbar;
    const auto cm = std::sqrt(normal_pdf(p_cm, cm_.mean_p, cm_.sigma_p)) *
                    std::exp(-1i * (p_cm * x_cm_ / hbar));
    const auto forward = std::sqrt(normal_pdf(p_rel, rel_.mean_p, rel_.sigma_p)) *
                         std::exp(-1i * (p_rel * x_rel_ / hbar));
    const auto backward = std::sqrt(normal_pdf(p_rel, -rel_.mean_p, rel_.sigma_p)) *
                          std::exp(1i * (p_rel * x_rel_ / hbar));
    return cm * (forward + backward) / std::sqrt(2.0);
}

double GaussianPair::cm_factor_scaled(double u) const {
    const double p0 = rel_.mean_p;
    return normal_pdf(u, cm_.mean_p / p0, cm_.sigma_p / p0);
}

double GaussianPair::rel_factor_scaled(double w) const {
    const double s = rel_.sigma_p / rel_.mean_p;
    return 0.5 * (normal_pdf(w, 1.0, s) + normal_pdf(w, -1.0, s));
}

double GaussianPair::density_scaled(double u, double w) const {
    return cm_factor_scaled(u) * rel_factor_scaled(w);
}

BranchWindow GaussianPair::window(const PhaseModel&) const {
    const double p0 = rel_.mean_p;
    const double mc = cm_.mean_p / p0;
    const double sc = cm_.sigma_p / p0;
    const double sr = rel_.sigma_p / p0;
    BranchWindow win;
    win.u_lo = mc - kGaussWindow * sc;
    win.u_hi = mc + kGaussWindow * sc;
    win.w_lo = 1.0 - kGaussWindow * sr;
    win.w_hi = 1.0 + kGaussWindow * sr;
    win.truncation_bound = 2.0 * gauss_outside_mass();
    return win;
}

// ----------------------------------------------------------------- Feshbach

FeshbachDistribution::FeshbachDistribution(double p0, double p_bar, double delta_p,
                                           GaussianMode cm_state)
    : p0_(p0), p_bar_(p_bar), delta_p_(delta_p), cm_(cm_state) {
    if (!(p0 > 0.0) || !std::isfinite(p0)) throw DomainError("p0", "must be positive");
    if (!(delta_p > 0.0)) throw DomainError("delta_p", "must be positive");
    cm_.validate("cm_state.sigma_p");
    if (delta_p > 0.2 * p0) throw DomainError("delta_p", "must satisfy delta_p <= 0.2 p0");
    if (cm_.sigma_p > 0.2 * p0) throw DomainError("cm_state.sigma_p", "must satisfy sigma_cm <= 0.2 p0");
    if (!(p_bar > p0)) {
        throw DomainError("p_bar", "must exceed p0 (base field has to lie below the resonance)");
    }
    shell_ratio_ = (p0 / delta_p) * (p0 / delta_p);
    lorentz_ratio_ = (p_bar / p0) * (p_bar / p0);
    cm_mean_ = cm_.mean_p / p0;
    cm_sigma_ = cm_.sigma_p / p0;
    normalise();
}

double FeshbachDistribution::shell_argument(double u, double w) const noexcept {
    return (0.25 * u * u + w * w - 1.0) * shell_ratio_;
}

double FeshbachDistribution::rel_oscillation_rate(double w) const noexcept {
    return 4.0 * shell_ratio_ * std::abs(w);
}

double FeshbachDistribution::cm_oscillation_rate(double u) const noexcept {
    return shell_ratio_ * std::abs(u);
}

double FeshbachDistribution::unnormalised_scaled(double u, double w) const noexcept {
    const double x = shell_argument(u, w);
    const double s = sinc(x);
    const double lorentz = 1.0 / (1.0 + x / (shell_ratio_ * lorentz_ratio_));
    return shell_ratio_ / constants::pi * s * s * lorentz * lorentz *
           normal_pdf(u, cm_mean_, cm_sigma_);
}

double FeshbachDistribution::density_scaled(double u, double w) const {
    return normalization_ * unnormalised_scaled(u, w);
}

double FeshbachDistribution::raw_density(double p_cm, double p_rel) const {
    return unnormalised_scaled(p_cm / p0_, p_rel / p0_) / (p0_ * p0_);
}

double FeshbachDistribution::density(double p_cm, double p_rel) const {
    return normalization_ * raw_density(p_cm, p_rel);
}

double FeshbachDistribution::tail_envelope(double w) const noexcept {
    const double x = shell_argument(0.0, w);
    const double lorentz = 1.0 / (1.0 + x / (shell_ratio_ * lorentz_ratio_));
    return normalization_ * shell_ratio_ / constants::pi * lorentz * lorentz / (x * x);
}

void FeshbachDistribution::normalise() {
    const double R = shell_ratio_;
    const double u_lo = cm_mean_ - kGaussWindow * cm_sigma_;
    const double u_hi = cm_mean_ + kGaussWindow * cm_sigma_;
    const auto u_breaks = quad::equidistributed_breaks(
        u_lo, u_hi, [R](double u) { return R * std::abs(u); }, 8.0, 4);
    const auto u_rule = quad::composite_gauss_legendre(u_breaks);

    // Beyond x = 4000 the sinc^2 factor is replaced by its mean 1/2; the
    // oscillating remainder is bounded below.
    const double w_hi = std::sqrt(1.0 + 4000.0 / R);
    const auto w_breaks = quad::equidistributed_breaks(
        0.0, w_hi, [this](double w) { return rel_oscillation_rate(w); }, 8.0, 16);

    auto body = [&](const std::vector<double>& breaks) {
        const auto w_rule = quad::composite_gauss_legendre(breaks);
        double sum = 0.0;
        for (std::size_t i = 0; i < u_rule.size(); ++i) {
            double inner = 0.0;
            for (std::size_t j = 0; j < w_rule.size(); ++j) {
                inner += w_rule.weights[j] * unnormalised_scaled(u_rule.nodes[i], w_rule.nodes[j]);
            }
            sum += u_rule.weights[i] * inner;
        }
        return sum;
    };
    const double coarse = body(w_breaks);
    const double fine = body(quad::refine(w_breaks));

    double tail = 0.0;
    double remainder = 0.0;
    for (std::size_t i = 0; i < u_rule.size(); ++i) {
        const double u = u_rule.nodes[i];
        const double g = normal_pdf(u, cm_mean_, cm_sigma_);
        auto envelope = [&](double w) {
            const double x = shell_argument(u, w);
            const double lorentz = 1.0 / (1.0 + x / (R * lorentz_ratio_));
            return R / constants::pi * lorentz * lorentz * g / (x * x);
        };
        tail += u_rule.weights[i] * 0.5 * algebraic_tail(w_hi, envelope);
        remainder += u_rule.weights[i] * envelope(w_hi) / (4.0 * R * w_hi);
    }

    const double total = 2.0 * (fine + tail);
    normalization_ = 1.0 / total;
    normalization_error_ =
        (2.0 * std::abs(fine - coarse) + 2.0 * remainder + gauss_outside_mass() * total) / total;
}

BranchWindow FeshbachDistribution::window(const PhaseModel& phase) const {
    constexpr double kTarget = 2e-7;
    const double R = shell_ratio_;
    BranchWindow win;
    win.u_lo = cm_mean_ - kGaussWindow * cm_sigma_;
    win.u_hi = cm_mean_ + kGaussWindow * cm_sigma_;
    win.w_lo = 0.0;

    // Oscillatory tail bound for w >= W: sin^2 x = 1/2 - cos(2x)/2 splits the
    // integrand into three monotone-amplitude phasors with linear phase
    // derivative; each is bounded by 4 f(W) / min|psi'| or by its mass.
    auto tail_bound = [&](double W) {
        const double f = tail_envelope(W);
        const double mass = algebraic_tail(W, [this](double w) { return tail_envelope(w); });
        const double weights[3] = {0.5, 0.25, 0.25};
        const int harmonics[3] = {0, 1, -1};
        double bound = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double slope = -2.0 * phase.rel_quadratic + 4.0 * harmonics[k] * R;
            const double value = phase.rel_linear - 2.0 * phase.rel_quadratic * W +
                                 4.0 * harmonics[k] * R * W;
            const bool receding = slope == 0.0 || (slope > 0.0) == (value > 0.0);
            const double lambda = receding ? std::abs(value) : 0.0;
            const double oscillatory = lambda > 0.0 ? 4.0 * f / lambda : mass;
            bound += weights[k] * std::min(oscillatory, mass);
        }
        return 2.0 * bound;
    };

    double W = std::sqrt(1.0 + 40.0 / R);
    const double w_max = std::sqrt(1.0 + 4000.0 / R);
    double bound = tail_bound(W);
    while (bound > kTarget && W < w_max) {
        W = std::min(w_max, W * 1.05);
        bound = tail_bound(W);
    }
    win.w_hi = W;
    win.truncation_bound = bound + 2.0 * gauss_outside_mass();
    return win;
}

// ------------------------------------------------------------------ variant

double density(const MomentumDistribution& dist, double p_cm, double p_rel) {
    return std::visit([&](const auto& d) { return d.density(p_cm, p_rel); }, dist);
}

double density_p1p2(const MomentumDistribution& dist, double p1, double p2) {
    return density(dist, p1 + p2, 0.5 * (p1 - p2));
}

double reference_momentum(const MomentumDistribution& dist) {
    return std::visit([](const auto& d) { return d.reference_momentum(); }, dist);
}

}  // namespace dtebell

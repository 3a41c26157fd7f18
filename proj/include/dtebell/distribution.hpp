#pragma once

#include <complex>
#include <variant>

namespace dtebell {

struct GaussianMode {
    double mean_p = 0.0;   // kg m/s
    double sigma_p = 0.0;  // kg m/s

    // Probability density of the momentum, 1/(kg m/s). Throws DomainError
    // unless sigma_p > 0.
    double density(double p) const;
    void validate(const char* field) const;
};

// Oscillating phase accumulated across the integration window, in the
// scaled variables u = p_cm/p0 and w = p_rel/p0 of the positive branch:
//   phi(u, w) = cm_linear*u - cm_quadratic*u^2 + rel_linear*w - rel_quadratic*w^2
struct PhaseModel {
    double cm_linear = 0.0;
    double cm_quadratic = 0.0;
    double rel_linear = 0.0;
    double rel_quadratic = 0.0;
};

// Integration window for the positive relative-momentum branch, scaled
// units. The negative branch is its mirror image in w.
struct BranchWindow {
    double u_lo = 0.0;
    double u_hi = 0.0;
    double w_lo = 0.0;
    double w_hi = 0.0;
    // Bound on |integral of density * exp(i phi)| outside the window,
    // summed over both branches.
    double truncation_bound = 0.0;
};

// Product of Gaussians in p_cm and a parity-symmetrised Gaussian in p_rel
// centred at +-p0. The two relative branches are taken as non-overlapping
// (sigma_rel << p0), so the interference cross term is dropped.
class GaussianPair {
public:
    GaussianPair(GaussianMode cm, GaussianMode rel);

    // Same momentum-space modulus, translated in position. Only the
    // amplitude changes; the momentum distribution is identical.
    GaussianPair shifted(double dx_cm, double dx_rel) const;

    const GaussianMode& cm() const noexcept { return cm_; }
    const GaussianMode& rel() const noexcept { return rel_; }
    double reference_momentum() const noexcept { return rel_.mean_p; }

    double density(double p_cm, double p_rel) const;
    std::complex<double> amplitude(double p_cm, double p_rel) const;

    // Scaled interface (u = p_cm/p0, w = p_rel/p0, density times p0^2).
    double density_scaled(double u, double w) const;
    double cm_factor_scaled(double u) const;
    double rel_factor_scaled(double w) const;
    BranchWindow window(const PhaseModel& phase) const;
    double rel_oscillation_rate(double) const noexcept { return 0.0; }
    double cm_oscillation_rate(double) const noexcept { return 0.0; }
    static constexpr bool separable = true;

private:
    GaussianMode cm_;
    GaussianMode rel_;
    double x_cm_ = 0.0;
    double x_rel_ = 0.0;
};

// Longitudinal momentum distribution left behind by two square Feshbach
// pulses: a sinc^2 shell of radius p0 in (p_cm/2, p_rel) with a Lorentzian
// factor of scale p_bar, times the trapped centre-of-mass Gaussian.
class FeshbachDistribution {
public:
    // Throws DomainError when delta_p or sigma_cm exceed 0.2 p0, or when
    // p_bar <= p0 (the denominator would vanish inside the shell).
    FeshbachDistribution(double p0, double p_bar, double delta_p, GaussianMode cm_state);

    double p0() const noexcept { return p0_; }
    double p_bar() const noexcept { return p_bar_; }
    double delta_p() const noexcept { return delta_p_; }
    const GaussianMode& cm_state() const noexcept { return cm_; }
    double reference_momentum() const noexcept { return p0_; }
    // Factor applied to the closed-form expression so that the density
    // integrates to one.
    double normalization() const noexcept { return normalization_; }
    // Bound on the error of the normalising integral.
    double normalization_error() const noexcept { return normalization_error_; }

    double density(double p_cm, double p_rel) const;
    // Unnormalised closed-form expression.
    double raw_density(double p_cm, double p_rel) const;

    // Argument of sinc^2 in scaled variables.
    double shell_argument(double u, double w) const noexcept;

    double density_scaled(double u, double w) const;
    double cm_factor_scaled(double) const { return 1.0; }
    double rel_factor_scaled(double) const { return 1.0; }
    BranchWindow window(const PhaseModel& phase) const;
    // d(2x)/dw: the sinc^2 factor oscillates with twice its argument.
    double rel_oscillation_rate(double w) const noexcept;
    double cm_oscillation_rate(double u) const noexcept;
    static constexpr bool separable = false;

    // Scaled shape parameters: (p0/delta_p)^2, (p_bar/p0)^2, sigma_cm/p0.
    double shell_ratio() const noexcept { return shell_ratio_; }
    double lorentz_ratio() const noexcept { return lorentz_ratio_; }

private:
    double unnormalised_scaled(double u, double w) const noexcept;
    // Envelope of the positive-x tail, L(x)/x^2 (R/pi) times normalisation.
    double tail_envelope(double w) const noexcept;
    void normalise();

    double p0_;
    double p_bar_;
    double delta_p_;
    GaussianMode cm_;
    double shell_ratio_;    // R
    double lorentz_ratio_;  // B
    double cm_mean_;        // scaled
    double cm_sigma_;       // scaled
    double normalization_ = 1.0;
    double normalization_error_ = 0.0;
};

using MomentumDistribution = std::variant<GaussianPair, FeshbachDistribution>;

// pr(p_cm, p_rel) for either source.
double density(const MomentumDistribution& dist, double p_cm, double p_rel);
// pr(p1, p2) with p1 = p_cm/2 + p_rel, p2 = p_cm/2 - p_rel.
double density_p1p2(const MomentumDistribution& dist, double p1, double p2);
double reference_momentum(const MomentumDistribution& dist);

}  // namespace dtebell

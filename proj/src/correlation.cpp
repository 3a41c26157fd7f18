#include "dtebell/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dtebell/errors.hpp"
#include "dtebell/quadrature.hpp"

namespace dtebell {

using constants::hbar;
using constants::pi;

namespace {

constexpr double kTwoPi = 2.0 * pi;
constexpr double kNormTolerance = 1e-9;

double reduce(double phase) { return std::remainder(phase, kTwoPi); }

// Amplitude weights of the two switch states for one port.
double on_weight(const InterferometerSetting& s, int port) {
    return port > 0 ? std::cos(s.theta) : std::sin(s.theta);
}
double off_weight(const InterferometerSetting& s, int port) {
    return port > 0 ? std::sin(s.theta) : -std::cos(s.theta);
}

bool symmetric(const InterferometerSetting& s) { return std::abs(s.theta - pi / 4.0) <= 1e-12; }

void check_port(int port) {
    if (port != 1 && port != -1) throw DomainError("port", "must be +1 or -1");
}

struct Spreads {
    double cm;
    double rel;
};

Spreads spreads_of(const MomentumDistribution& dist) {
    struct Visitor {
        Spreads operator()(const GaussianPair& g) const { return {g.cm().sigma_p, g.rel().sigma_p}; }
        Spreads operator()(const FeshbachDistribution& f) const {
            return {f.cm_state().sigma_p,
                    kRelSpreadFactor * f.delta_p() * f.delta_p() / (2.0 * f.p0())};
        }
    };
    return std::visit(Visitor{}, dist);
}

// Kinematics of the interference phase in scaled units: momenta in p0,
// lengths in lambda_bar = hbar / p0.
struct Kinematics {
    double kappa;     // tau v_rel / lambda_bar
    double sum_len;   // (l1 + l2) / lambda_bar
    double diff_len;  // (l1 - l2) / lambda_bar
    double phi_tau;
};

Kinematics kinematics(double p0, double mass, double tau, double phi_tau, double ell1, double ell2) {
    const double lambda_bar = hbar / p0;
    return Kinematics{2.0 * p0 * p0 * tau / (mass * hbar), (ell1 + ell2) / lambda_bar,
                      (ell1 - ell2) / lambda_bar, phi_tau};
}

struct Grid {
    quad::Rule u;
    quad::Rule w;  // offsets from the reference momentum, delta = w - 1
    std::size_t nodes() const { return u.size() * w.size(); }
};

template <class D>
std::array<std::complex<double>, 2> evaluate(const D& dist, const Kinematics& k, const Grid& grid,
                                             bool exploit_separability) {
    using namespace std::complex_literals;
    const std::size_t nu = grid.u.size();
    const std::size_t nw = grid.w.size();
    std::vector<std::complex<double>> eu(nu), ew(nw);
    for (std::size_t i = 0; i < nu; ++i) {
        const double u = grid.u.nodes[i];
        eu[i] = grid.u.weights[i] * std::exp(1i * (0.5 * k.sum_len * u - 0.125 * k.kappa * u * u));
    }
    for (std::size_t j = 0; j < nw; ++j) {
        const double d = grid.w.nodes[j];
        ew[j] = grid.w.weights[j] * std::exp(1i * ((k.diff_len - k.kappa) * d - 0.5 * k.kappa * d * d));
    }

    std::complex<double> positive = 0.0;
    std::complex<double> negative = 0.0;
    if constexpr (D::separable) {
        if (exploit_separability) {
            std::complex<double> su = 0.0, sp = 0.0, sn = 0.0;
            for (std::size_t i = 0; i < nu; ++i) su += eu[i] * dist.cm_factor_scaled(grid.u.nodes[i]);
            for (std::size_t j = 0; j < nw; ++j) {
                const double w = 1.0 + grid.w.nodes[j];
                sp += ew[j] * dist.rel_factor_scaled(w);
                sn += ew[j] * dist.rel_factor_scaled(-w);
            }
            return {su * sp, su * sn};
        }
    }
    for (std::size_t i = 0; i < nu; ++i) {
        const double u = grid.u.nodes[i];
        std::complex<double> ip = 0.0, in = 0.0;
        for (std::size_t j = 0; j < nw; ++j) {
            const double w = 1.0 + grid.w.nodes[j];
            ip += ew[j] * dist.density_scaled(u, w);
            in += ew[j] * dist.density_scaled(u, -w);
        }
        positive += eu[i] * ip;
        negative += eu[i] * in;
    }
    return {positive, negative};
}

double normalization_error_of(const GaussianPair&) { return 0.0; }
double normalization_error_of(const FeshbachDistribution& f) { return f.normalization_error(); }

template <class D>
InterferenceIntegral integrate(const D& dist, const Kinematics& k, const QuadratureOptions& opt) {
    using namespace std::complex_literals;
    PhaseModel phase{0.5 * k.sum_len, 0.125 * k.kappa, k.diff_len, 0.5 * k.kappa};
    const BranchWindow win = dist.window(phase);

    const quad::RateFn u_rate = [&](double u) {
        return std::abs(0.5 * k.sum_len - 0.25 * k.kappa * u) + dist.cm_oscillation_rate(u);
    };
    const quad::RateFn w_rate = [&](double d) {
        return std::abs(k.diff_len - k.kappa * (1.0 + d)) + dist.rel_oscillation_rate(1.0 + d);
    };
    const double d_lo = win.w_lo - 1.0;
    const double d_hi = win.w_hi - 1.0;
    const double order = static_cast<double>(quad::kPanelOrder);
    constexpr std::size_t kMinPanels = 4;

    // Phase-sampling density, lowered from the target toward the floor
    // when the refined grid would exceed the node cap.
    const double tv_u = quad::total_variation(win.u_lo, win.u_hi, u_rate);
    const double tv_w = quad::total_variation(d_lo, d_hi, w_rate);
    auto grid_size = [&](double per_radian) {
        const double pu = std::max<double>(kMinPanels, std::ceil(tv_u * per_radian / order));
        const double pw = std::max<double>(kMinPanels, std::ceil(tv_w * per_radian / order));
        return pu * pw * order * order;
    };
    double per_radian = opt.nodes_per_radian;
    while (4.0 * grid_size(per_radian) > static_cast<double>(opt.max_nodes) &&
           per_radian > opt.min_nodes_per_radian) {
        per_radian = std::max(opt.min_nodes_per_radian, 0.5 * per_radian);
    }
    if (4.0 * grid_size(per_radian) > static_cast<double>(opt.max_nodes)) {
        throw QuadratureError("node budget exceeded before the first refinement",
                              std::numeric_limits<double>::infinity());
    }

    auto u_breaks = quad::equidistributed_breaks(win.u_lo, win.u_hi, u_rate, order / per_radian, kMinPanels);
    auto w_breaks = quad::equidistributed_breaks(d_lo, d_hi, w_rate, order / per_radian, kMinPanels);
    auto make_grid = [&] {
        return Grid{quad::composite_gauss_legendre(u_breaks), quad::composite_gauss_legendre(w_breaks)};
    };

    // Constant part of the phase, reduced before it multiplies the sums.
    const double constant = reduce(reduce(k.diff_len - 0.5 * k.kappa) - reduce(k.phi_tau));
    const std::complex<double> carrier = std::exp(1i * constant);

    Grid grid = make_grid();
    auto previous = evaluate(dist, k, grid, opt.exploit_separability);
    const double floor = 0.25 * (win.truncation_bound + normalization_error_of(dist));

    InterferenceIntegral out;
    out.truncation_bound = win.truncation_bound;
    for (int level = 1;; ++level) {
        u_breaks = quad::refine(u_breaks);
        w_breaks = quad::refine(w_breaks);
        grid = make_grid();
        const auto current = evaluate(dist, k, grid, opt.exploit_separability);
        const double change = std::abs((current[0] + current[1]) - (previous[0] + previous[1]));
        out.positive_branch = carrier * current[0];
        out.negative_branch = carrier * current[1];
        out.value = out.positive_branch + out.negative_branch;
        out.nodes = grid.nodes();
        out.refinements = level;
        out.error_estimate = change + win.truncation_bound + normalization_error_of(dist);
        const double p_error = 0.25 * change + floor;
        if (p_error <= opt.tolerance) return out;
        const bool capped = 4.0 * static_cast<double>(grid.nodes()) > static_cast<double>(opt.max_nodes);
        if (level >= opt.max_refinements || capped) {
            throw QuadratureError("interference integral did not converge", p_error);
        }
        previous = current;
    }
}

double ratio_term(double t_disp, double tau) {
    // T / (T^2 + tau^2), well defined for T -> infinity
    if (std::isinf(t_disp)) return 0.0;
    return 1.0 / (t_disp + tau * tau / t_disp);
}

double chirp_term(double t_disp, double tau) {
    if (std::isinf(t_disp)) return 0.0;
    return tau / (t_disp * t_disp + tau * tau);
}

}  // namespace

void InterferometerSetting::validate() const {
    if (!std::isfinite(ell)) throw DomainError("ell", "must be finite");
    if (!(theta >= 0.0 && theta <= pi / 2.0)) throw DomainError("theta", "must lie in [0, pi/2]");
}

std::complex<double> smatrix_amplitude(const InterferometerSetting& setting, int port,
                                       SwitchState state, double p) {
    setting.validate();
    check_port(port);
    if (state == SwitchState::Off) return off_weight(setting, port);
    using namespace std::complex_literals;
    return std::exp(1i * (p * setting.ell / hbar)) * on_weight(setting, port);
}

// ------------------------------------------------------------------ DtePair

double DtePair::separation_margin() const {
    const auto [s_cm, s_rel] = spreads_of(distribution);
    const double m = species.atom_mass;
    const double M = species.molecule_mass();
    const double p0 = reference_momentum(distribution);
    const double t = tau;
    // Free broadening of the centre-of-mass (mass 2m) and relative (mass m/2)
    // coordinates; x1 = X + r/2.
    const double x0 = hbar / (2.0 * s_cm);
    const double xt = s_cm * t / M;
    const double r0 = hbar / (2.0 * s_rel);
    const double rt = s_rel * t / (0.5 * m);
    const double width = std::sqrt(x0 * x0 + xt * xt + 0.25 * (r0 * r0 + rt * rt));
    const double v_rel = 2.0 * p0 / m;
    return 0.5 * v_rel * tau / width;
}

std::vector<std::string> DtePair::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("tau", "must be positive");
    if (!std::isfinite(phi_tau)) throw DomainError("phi_tau", "must be finite");
    if (!(species.atom_mass > 0.0)) throw DomainError("atom_mass", "must be positive");
    const double margin = separation_margin();
    if (margin < 2.0) {
        throw DomainError("tau", "early and late wave packets overlap (separation margin " +
                                     std::to_string(margin) + " < 2)");
    }
    std::vector<std::string> warnings;
    if (margin < 10.0) {
        warnings.push_back("early/late separation margin " + std::to_string(margin) + " below 10");
    }
    return warnings;
}

DtePair gaussian_pair_from_scenario(const Scenario& scenario) {
    const auto g = gaussian_approximation(scenario);
    return DtePair{GaussianPair(g.cm, g.rel), scenario.pulses.pulse_separation, phi_tau(scenario),
                   scenario.species};
}

DtePair feshbach_pair_from_scenario(const Scenario& scenario) {
    return DtePair{feshbach_distribution(scenario), scenario.pulses.pulse_separation,
                   phi_tau(scenario), scenario.species};
}

// ------------------------------------------------------------------ results

std::string to_string(CorrelationMethod method) {
    switch (method) {
        case CorrelationMethod::Quadrature: return "quadrature";
        case CorrelationMethod::ClosedForm: return "closed";
        case CorrelationMethod::Reference: return "reference";
        case CorrelationMethod::Empirical: return "empirical";
    }
    return "unknown";
}

double CorrelationResult::probability(int sigma1, int sigma2) const {
    check_port(sigma1);
    check_port(sigma2);
    return p[port_index(sigma1, sigma2)];
}

CorrelationResult correlation_from_interference(std::complex<double> interference,
                                                const InterferometerSetting& s1,
                                                const InterferometerSetting& s2,
                                                CorrelationMethod method, double error_estimate) {
    s1.validate();
    s2.validate();
    CorrelationResult r;
    r.method = method;
    r.quadrature_error_estimate = error_estimate;
    r.extension = !symmetric(s1) || !symmetric(s2);
    const double re = interference.real();
    for (int a : {1, -1}) {
        for (int b : {1, -1}) {
            const double c = on_weight(s1, a) * on_weight(s2, b);
            const double s = off_weight(s1, a) * off_weight(s2, b);
            double value = 0.5 * (c * c + s * s) + c * s * re;
            // Rounding can leave values a few ulp outside [0, 1].
            if (value < 0.0 && value > -kNormTolerance) value = 0.0;
            if (value > 1.0 && value < 1.0 + kNormTolerance) value = 1.0;
            r.p[port_index(a, b)] = value;
        }
    }
    double total = 0.0;
    for (double v : r.p) {
        if (!(v >= 0.0 && v <= 1.0)) throw Error("port probability outside [0, 1]");
        total += v;
    }
    if (std::abs(total - 1.0) > kNormTolerance) throw Error("port probabilities not normalised");
    r.e_value = r.p[0] - r.p[1] - r.p[2] + r.p[3];
    return r;
}

// --------------------------------------------------------------- quadrature

InterferenceIntegral interference_quadrature(const DtePair& pair, double ell1, double ell2,
                                             const QuadratureOptions& options) {
    if (!(options.tolerance > 0.0)) throw DomainError("tolerance", "must be positive");
    if (!(options.min_nodes_per_radian > 0.0) || options.nodes_per_radian < options.min_nodes_per_radian) {
        throw DomainError("nodes_per_radian", "must be positive and above the floor");
    }
    if (options.check_separation) {
        pair.validate();
    } else if (!(pair.tau >= 0.0)) {
        throw DomainError("tau", "must be non-negative");
    }
    const double p0 = reference_momentum(pair.distribution);
    const Kinematics k = kinematics(p0, pair.species.atom_mass, pair.tau, pair.phi_tau, ell1, ell2);
    return std::visit([&](const auto& d) { return integrate(d, k, options); }, pair.distribution);
}

CorrelationResult correlate_quadrature(const DtePair& pair, const InterferometerSetting& s1,
                                       const InterferometerSetting& s2,
                                       const QuadratureOptions& options) {
    s1.validate();
    s2.validate();
    const auto integral = interference_quadrature(pair, s1.ell, s2.ell, options);
    auto r = correlation_from_interference(integral.value, s1, s2, CorrelationMethod::Quadrature,
                                           0.25 * integral.error_estimate);
    r.nodes = integral.nodes;
    return r;
}

// -------------------------------------------------------------- closed form

ClosedFormModel ClosedFormModel::from_scenario(const Scenario& scenario) {
    return ClosedFormModel{gaussian_approximation(scenario), scenario.species,
                           scenario.pulses.pulse_separation, dtebell::phi_tau(scenario)};
}

void ClosedFormModel::validate() const {
    if (!(gaussians.rel.mean_p > 0.0)) throw DomainError("rel.mean_p", "must be positive");
    gaussians.rel.validate("rel.sigma_p");
    gaussians.cm.validate("cm.sigma_p");
    if (!(species.atom_mass > 0.0)) throw DomainError("atom_mass", "must be positive");
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("tau", "must be non-negative");
    if (!std::isfinite(phi_tau)) throw DomainError("phi_tau", "must be finite");
}

TimescaleSummary ClosedFormModel::scales() const {
    validate();
    return derive_scales(species, gaussians.cm.sigma_p, gaussians.rel.sigma_p, gaussians.rel.mean_p);
}

double ClosedFormModel::center_ell1() const { return 0.5 * tau * scales().v_rel; }
double ClosedFormModel::center_ell2() const { return -0.5 * tau * scales().v_rel; }

double ClosedFormModel::visibility() const {
    const auto s = scales();
    const double a = tau / s.t_cm;
    const double b = tau / s.t_rel;
    return std::pow((1.0 + a * a) * (1.0 + b * b), -0.25);
}

namespace {

// Squared offsets over 2 v lambda_bar, in seconds^-1 times the time ratios.
struct ClosedFormTerms {
    double rel_sq;  // (l1 - l2 - tau v)^2 / (2 v lambda_bar), seconds
    double cm_sq;   // (l1 + l2)^2 / (2 v lambda_bar), seconds
    double fringe;  // (l1 - l2) / lambda_bar - tau v / (2 lambda_bar)
};

ClosedFormTerms terms(const TimescaleSummary& s, double tau, double ell1, double ell2) {
    const double lb = s.lambda_bar_rel;
    const double kappa = tau * s.v_rel / lb;
    const double diff = (ell1 - ell2) / lb;
    const double sum = (ell1 + ell2) / lb;
    const double rho = 0.5 * lb / s.v_rel;
    return ClosedFormTerms{(diff - kappa) * (diff - kappa) * rho, sum * sum * rho, diff - 0.5 * kappa};
}

}  // namespace

double ClosedFormModel::envelope(double ell1, double ell2) const {
    const auto s = scales();
    const auto t = terms(s, tau, ell1, ell2);
    return std::exp(-ratio_term(s.t_rel, tau) * t.rel_sq - ratio_term(s.t_cm, tau) * t.cm_sq);
}

double ClosedFormModel::fringe_phase(double ell1, double ell2) const {
    const auto s = scales();
    const auto t = terms(s, tau, ell1, ell2);
    const double chirp = chirp_term(s.t_rel, tau) * t.rel_sq + chirp_term(s.t_cm, tau) * t.cm_sq;
    return t.fringe + chirp - 0.5 * (std::atan(tau / s.t_cm) + std::atan(tau / s.t_rel)) - phi_tau;
}

double ClosedFormModel::interference(double ell1, double ell2) const {
    const double phase = reduce(fringe_phase(ell1, ell2));
    return visibility() * envelope(ell1, ell2) * std::cos(phase);
}

CorrelationResult ClosedFormModel::correlate(const InterferometerSetting& s1,
                                             const InterferometerSetting& s2) const {
    const double re = interference(s1.ell, s2.ell);
    return correlation_from_interference(re, s1, s2, CorrelationMethod::ClosedForm, 0.0);
}

CorrelationResult correlate_closed_form(const GaussianApproximation& gaussians,
                                        const Species& species, double tau, double phi_tau,
                                        double ell1, double ell2) {
    const ClosedFormModel model{gaussians, species, tau, phi_tau};
    return model.correlate(InterferometerSetting{ell1}, InterferometerSetting{ell2});
}

double fringe_phase(const GaussianApproximation& gaussians, const Species& species, double tau,
                    double phi_tau, double ell1, double ell2) {
    return ClosedFormModel{gaussians, species, tau, phi_tau}.fringe_phase(ell1, ell2);
}

}  // namespace dtebell

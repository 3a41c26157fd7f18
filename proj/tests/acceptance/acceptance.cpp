// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "dtebell/bell.hpp"
#include "dtebell/cli.hpp"
#include "dtebell/config.hpp"
#include "dtebell/csv.hpp"
#include "dtebell/dissociation.hpp"
#include "dtebell/montecarlo.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace dtebell;

namespace {

const std::string kCfg = std::string(DTEBELL_DATA_DIR) + "/paper-li6.cfg";

constexpr double kTRelTarget = 3.4, kTRelTol = 0.1;
constexpr double kTCmTarget = 0.64, kTCmTol = 0.01;
constexpr double kScalesRuntime = 1.0;  // s
constexpr double kVisTarget = 0.72, kVisTol = 0.01;
constexpr double kLambdaTarget = 13.3e-6, kLambdaTol = 0.1e-6;
constexpr double kOracleTol = 1e-6;
constexpr double kOracleRuntime = 60.0;  // s
constexpr double kChshTol = 1e-3;
constexpr double kStderrMultiple = 4.0;
constexpr int kSeedRuns = 100, kSeedRunsRequired = 95;
constexpr double kScalingTol = 0.10;
constexpr double kNormTol = 1e-9;
constexpr double kDensityTol = 1e-6;
constexpr double kFiniteDiffTol = 1e-8;
constexpr double kStabilityRelError = 1e-5;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

int failures = 0;

void report(int id, bool ok, const std::string& what) {
    std::printf("%s %d %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

InterferometerSetting at(double ell) { return InterferometerSetting{ell, constants::pi / 4.0, SwitchMode::Switched}; }

ClosedFormModel shipped_model() { return ClosedFormModel::from_scenario(load_config(kCfg).scenario); }

void criterion1() {
    const auto t0 = Clock::now();
    const auto r = cli({"scales", kCfg});
    const double elapsed = seconds_since(t0);
    std::map<std::string, double> v;
    std::istringstream in(r.out);
    std::string k, val;
    while (in >> k >> val) {
        if (k != "feasible") v[k] = std::stod(val);
    }
    const bool ok = r.code == 0 && std::abs(v["t_rel_s"] - kTRelTarget) <= kTRelTol &&
                    std::abs(v["t_cm_s"] - kTCmTarget) <= kTCmTol && elapsed < kScalesRuntime;
    report(1, ok, "scenario scales: T_rel = " + fmt("%.4f", v["t_rel_s"]) + " s, T_cm = " + fmt("%.4f", v["t_cm_s"]) +
                      " s, runtime " + fmt("%.3f", elapsed) + " s");
}

void criterion2() {
    const auto model = shipped_model();
    const double V = model.visibility();
    const auto f = feasible(model.scales(), model.tau);
    const bool ok = std::abs(V - kVisTarget) <= kVisTol && V > kViolationThreshold && f.product < 4.0;
    report(2, ok, "fringe-centre visibility V = " + fmt("%.6f", V) + ", product = " + fmt("%.4f", f.product));
}

void criterion3() {
    const auto li = load_config(kCfg).scenario.species;
    const double v = 0.01;
    const double p0 = 0.5 * li.atom_mass * v;
    const auto s = derive_scales(li, 0.01 * p0, 0.01 * p0, p0);
    const bool ok = std::abs(s.lambda_rel() - kLambdaTarget) <= kLambdaTol && std::abs(s.v_rel - v) < 1e-15;
    report(3, ok, "lambda_rel at 1 cm/s = " + fmt("%.4f", s.lambda_rel() * 1e6) + " um");
}

void criterion4() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240917);
    const double offsets[5] = {-3.0, -1.5, 0.0, 1.5, 3.0};
    double worst = 0.0;
    int points = 0;
    for (int c = 0; c < 20; ++c) {
        const auto rc = testing::random_gaussian_case(rng);
        const auto model = rc.model();
        const auto pair = rc.pair();
        const double period = 2.0 * constants::pi * model.scales().lambda_bar_rel;
        for (double o1 : offsets) {
            for (double o2 : offsets) {
                const double l1 = model.center_ell1() + o1 * period;
                const double l2 = model.center_ell2() + o2 * period;
                const auto q = correlate_quadrature(pair, at(l1), at(l2));
                const auto f = model.correlate(at(l1), at(l2));
                for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(q.p[k] - f.p[k]));
                ++points;
            }
        }
    }
    const double elapsed = seconds_since(t0);
    report(4, worst <= kOracleTol && elapsed < kOracleRuntime,
           "quadrature vs closed form over " + std::to_string(points) + " points: max |dP| = " + fmt("%.2e", worst) +
               ", runtime " + fmt("%.2f", elapsed) + " s");
}

void criterion5() {
    const auto model = shipped_model();
    const auto opt = optimize_closed_form(model);
    const double target = kTsirelsonBound * model.visibility();
    ConfigDocument doc = ConfigDocument::load(kCfg);
    doc.apply_override("pulses.separation_s=2");
    const auto late = optimize_closed_form(ClosedFormModel::from_scenario(doc.resolve().scenario));
    const bool ok = std::abs(opt.s_value - target) <= kChshTol && opt.s_value > 2.0 && late.s_value < 2.0;
    report(5, ok, "optimised S = " + fmt("%.6f", opt.s_value) + " (2 sqrt2 V = " + fmt("%.6f", target) +
                      "), tau = 2 s gives S = " + fmt("%.6f", late.s_value));
}

void criterion6() {
    const auto model = shipped_model();
    const auto settings = optimize_closed_form(model).settings;
    const auto corr = closed_form_correlator(model);
    const auto exact = chsh_probabilities(corr, settings);
    int good = 0;
    for (int s = 0; s < kSeedRuns; ++s) {
        const auto est = estimate_correlations(run(corr, RunConfig{10000, 1000u + s, SwitchMode::Switched, settings}));
        bool all = true;
        for (int i = 0; i < 4; ++i) {
            all = all && std::abs(est.e_values[i] - exact[i].e_value) <= kStderrMultiple * std::sqrt(est.variances[i]);
        }
        good += all;
    }
    auto scaled_stderr = [&](std::uint64_t n, int seeds) {
        double sum = 0.0;
        for (int s = 0; s < seeds; ++s) {
            sum += estimate_correlations(run(corr, RunConfig{n, 5000u + s, SwitchMode::Switched, settings})).standard_error;
        }
        return sum / seeds * std::sqrt(static_cast<double>(n));
    };
    const double a = scaled_stderr(100, 100), b = scaled_stderr(10000, 20), c = scaled_stderr(1000000, 2);
    const double hi = std::max({a, b, c}), lo = std::min({a, b, c});
    const bool ok = good >= kSeedRunsRequired && hi / lo - 1.0 <= kScalingTol;
    report(6, ok, std::to_string(good) + "/" + std::to_string(kSeedRuns) + " runs within 4 stderr; stderr*sqrt(N) = " +
                      fmt("%.4f", a) + ", " + fmt("%.4f", b) + ", " + fmt("%.4f", c));
}

void criterion7() {
    std::vector<std::string> broken;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    // normalisation, both methods
    double worst_norm = 0.0;
    for (int i = 0; i < 40; ++i) {
        const auto rc = testing::random_gaussian_case(rng);
        const auto model = rc.model();
        const double l1 = model.center_ell1() + 2e-5 * unit(rng), l2 = model.center_ell2() + 2e-5 * unit(rng);
        for (const auto& r : {model.correlate(at(l1), at(l2)), correlate_quadrature(rc.pair(), at(l1), at(l2))}) {
            worst_norm = std::max(worst_norm, std::abs(r.p[0] + r.p[1] + r.p[2] + r.p[3] - 1.0));
        }
    }
    if (worst_norm > kNormTol) broken.push_back("normalisation");

    // Tsirelson bound on random settings
    double worst_s = 0.0;
    const auto spin = spin_reference_correlator();
    for (int i = 0; i < 1000; ++i) {
        const ChshAngles a{4.0 * unit(rng), 4.0 * unit(rng), 4.0 * unit(rng), 4.0 * unit(rng)};
        worst_s = std::max(worst_s, chsh_value(spin, a).s_value);
    }
    const auto model = shipped_model();
    const auto corr = closed_form_correlator(model);
    for (int i = 0; i < 200; ++i) {
        auto s = seed_settings(model);
        for (auto* x : {&s.a, &s.a_prime, &s.b, &s.b_prime}) x->ell += 5e-6 * unit(rng);
        worst_s = std::max(worst_s, chsh_value(corr, s).s_value);
    }
    if (worst_s > kTsirelsonBound + kTsirelsonTolerance) broken.push_back("tsirelson");

    // sinc^2 parity and normalisation
    const auto dist = feshbach_distribution(load_config(kCfg).scenario);
    bool parity = true;
    for (int i = 0; i < 500; ++i) {
        const double pc = 0.2 * dist.p0() * unit(rng), pr = 1.5 * dist.p0() * unit(rng);
        const double v = dist.density(pc, pr);
        parity = parity && v == dist.density(-pc, pr) && v == dist.density(pc, -pr);
    }
    const double norm = testing::plane_integral(dist);
    if (!parity) broken.push_back("parity");
    if (std::abs(norm - 1.0) > kDensityTol) broken.push_back("sinc2 normalisation");

    // phase-stability derivatives against central differences
    const auto scenario = load_config(kCfg).scenario;
    const auto budget = phase_stability(scenario, RelativeErrors{1, 1, 1, 1, 1, 1});
    const std::function<double&(Scenario&)> refs[] = {
        [](Scenario& s) -> double& { return s.pulses.base_field; },
        [](Scenario& s) -> double& { return s.pulses.pulse_height; },
        [](Scenario& s) -> double& { return s.resonance.position; },
        [](Scenario& s) -> double& { return s.pulses.pulse_duration; },
        [](Scenario& s) -> double& { return s.pulses.pulse_separation; },
        [](Scenario& s) -> double& { return s.trap.trap_depth; },
    };
    double worst_fd = 0.0;
    for (std::size_t i = 0; i < budget.terms.size(); ++i) {
        Scenario up = scenario, down = scenario;
        const double h = 1e-4 * std::abs(budget.terms[i].value);
        refs[i](up) += h;
        refs[i](down) -= h;
        const double fd = (phi_tau(up) - phi_tau(down)) / (2.0 * h);
        worst_fd = std::max(worst_fd, std::abs(budget.terms[i].derivative / fd - 1.0));
    }
    if (worst_fd > kFiniteDiffTol) broken.push_back("finite differences");

    // deterministic CLI output
    const std::vector<std::string> mc = {"montecarlo", kCfg, "--seed", "42", "--events", "5000"};
    const auto r1 = cli(mc), r2 = cli(mc);
    if (r1.code != 0 || r1.out != r2.out) broken.push_back("determinism");

    std::string detail = "max |sum P - 1| = " + fmt("%.1e", worst_norm) + ", max S = " + fmt("%.6f", worst_s) +
                         ", sinc2 norm - 1 = " + fmt("%.1e", norm - 1.0) + ", max fd rel = " + fmt("%.1e", worst_fd);
    for (const auto& b : broken) detail += "; broken: " + b;
    report(7, broken.empty(), "properties: " + detail);
}

void criterion8() {
    const auto r = cli({"feasibility", kCfg, "--stability", "--relative-error", fmt("%.0e", kStabilityRelError)});
    const auto records = csv::parse(r.out);
    bool ok = r.code == 0 && records.size() == 8;
    std::string detail;
    if (ok) {
        std::size_t pass_col = 0, contrib_col = 0;
        for (std::size_t j = 0; j < records[0].size(); ++j) {
            if (records[0][j] == "pass") pass_col = j;
            if (records[0][j] == "contribution_rad") contrib_col = j;
        }
        for (std::size_t i = 1; i < records.size(); ++i) {
            const auto& pass = records[i][pass_col];
            ok = ok && (pass == "true" || pass == "false");
            detail += (i > 1 ? ", " : "") + records[i][0] + " " + fmt("%.3g", std::stod(records[i][contrib_col])) +
                      " rad " + (pass == "true" ? "pass" : "fail");
        }
    }
    report(8, ok, "phase budget 50 mrad at 1e-5: " + detail);
}

}  // namespace

int main() {
    const std::function<void()> criteria[] = {criterion1, criterion2, criterion3, criterion4,
                                              criterion5, criterion6, criterion7, criterion8};
    int id = 1;
    for (const auto& c : criteria) {
        try {
            c();
        } catch (const std::exception& e) {
            report(id, false, std::string("exception: ") + e.what());
        }
        ++id;
    }
    return failures == 0 ? 0 : 1;
}

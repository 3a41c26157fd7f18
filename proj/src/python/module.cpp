#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dtebell/bell.hpp"
#include "dtebell/cli.hpp"
#include "dtebell/config.hpp"
#include "dtebell/dissociation.hpp"
#include "dtebell/errors.hpp"
#include "dtebell/montecarlo.hpp"

namespace py = pybind11;
using namespace dtebell;

namespace {

SwitchMode parse_mode(const std::string& mode) {
    if (mode == "switched") return SwitchMode::Switched;
    if (mode == "beamsplitter") return SwitchMode::BeamSplitter;
    throw DomainError("mode", "must be 'switched' or 'beamsplitter'");
}

DtePair make_pair(const Scenario& s, const std::string& source) {
    if (source == "gaussian") return gaussian_pair_from_scenario(s);
    if (source == "feshbach") return feshbach_pair_from_scenario(s);
    throw DomainError("source", "must be 'gaussian' or 'feshbach'");
}

InterferometerSetting setting(double ell, double theta, SwitchMode mode = SwitchMode::Switched) {
    return InterferometerSetting{ell, theta, mode};
}

ChshSettings settings_from(const std::vector<double>& ells, SwitchMode mode = SwitchMode::Switched) {
    if (ells.size() != 4) throw DomainError("settings", "needs four lengths a, a', b, b'");
    const double q = constants::pi / 4.0;
    return ChshSettings{setting(ells[0], q, mode), setting(ells[1], q, mode), setting(ells[2], q, mode),
                        setting(ells[3], q, mode)};
}

std::vector<double> lengths(const ChshSettings& s) { return {s.a.ell, s.a_prime.ell, s.b.ell, s.b_prime.ell}; }

py::dict outcome_dict(const BellOutcome& o) {
    py::dict d;
    d["s_value"] = o.s_value;
    d["visibility"] = o.visibility;
    d["violated"] = o.violated;
    d["margin"] = o.margin;
    d["e_values"] = o.e_values;
    d["standard_error"] = o.standard_error;
    d["settings"] = lengths(o.settings);
    return d;
}

}  // namespace

PYBIND11_MODULE(_dtebell, m) {
    m.doc() = "Bell-test calculator for dissociation-time entangled atom pairs";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<BelowThresholdError>(m, "BelowThresholdError", base.ptr());
    py::register_exception<QuadratureError>(m, "QuadratureError", base.ptr());
    py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base.ptr());

    py::class_<Species>(m, "Species")
        .def(py::init<>())
        .def_static("from_amu", &Species::from_amu)
        .def_readwrite("atom_mass", &Species::atom_mass)
        .def_property_readonly("molecule_mass", &Species::molecule_mass);
    py::class_<TrapGuide>(m, "TrapGuide")
        .def(py::init<>())
        .def_readwrite("omega_guide", &TrapGuide::omega_guide)
        .def_readwrite("omega_trap", &TrapGuide::omega_trap)
        .def_readwrite("trap_depth", &TrapGuide::trap_depth);
    py::class_<Resonance>(m, "Resonance")
        .def(py::init<>())
        .def_readwrite("width", &Resonance::width)
        .def_readwrite("moment_diff", &Resonance::moment_diff)
        .def_readwrite("background_length", &Resonance::background_length)
        .def_readwrite("position", &Resonance::position);
    py::class_<PulseSequence>(m, "PulseSequence")
        .def(py::init<>())
        .def_readwrite("base_field", &PulseSequence::base_field)
        .def_readwrite("pulse_height", &PulseSequence::pulse_height)
        .def_readwrite("pulse_duration", &PulseSequence::pulse_duration)
        .def_readwrite("pulse_separation", &PulseSequence::pulse_separation);
    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_static("lithium6", &Scenario::lithium6)
        .def_readwrite("species", &Scenario::species)
        .def_readwrite("trap", &Scenario::trap)
        .def_readwrite("resonance", &Scenario::resonance)
        .def_readwrite("pulses", &Scenario::pulses)
        .def("validate", &Scenario::validate)
        .def("warnings", &Scenario::warnings);

    m.def("load_scenario", [](const std::string& path) { return load_config(path).scenario; }, py::arg("path"),
          "Scenario section of a configuration file");

    py::class_<TimescaleSummary>(m, "TimescaleSummary")
        .def_readonly("t_cm", &TimescaleSummary::t_cm)
        .def_readonly("t_rel", &TimescaleSummary::t_rel)
        .def_readonly("lambda_bar_rel", &TimescaleSummary::lambda_bar_rel)
        .def_readonly("v_rel", &TimescaleSummary::v_rel)
        .def_readonly("sigma_p_cm", &TimescaleSummary::sigma_p_cm)
        .def_readonly("sigma_p_rel", &TimescaleSummary::sigma_p_rel)
        .def_readonly("p0_rel", &TimescaleSummary::p0_rel)
        .def_property_readonly("lambda_rel", &TimescaleSummary::lambda_rel);

    m.def("scales", &scales_from_scenario, py::arg("scenario"));
    m.def("p0_from_fields", &p0_from_fields, py::arg("scenario"));
    m.def("phi_tau", &phi_tau, py::arg("scenario"), py::arg("wrap") = false);
    m.def("visibility", &dtebell::visibility, py::arg("scales"), py::arg("tau"));

    py::class_<Feasibility>(m, "Feasibility")
        .def_readonly("feasible", &Feasibility::feasible)
        .def_readonly("product", &Feasibility::product)
        .def_readonly("lambda_ratio", &Feasibility::lambda_ratio)
        .def_readonly("product_below_four", &Feasibility::product_below_four)
        .def_readonly("lambda_guard_passed", &Feasibility::lambda_guard_passed);
    m.def("feasible", &feasible, py::arg("scales"), py::arg("tau"), py::arg("lambda_ratio_guard") = kLambdaRatioGuard);

    py::class_<CorrelationResult>(m, "CorrelationResult")
        .def_readonly("p", &CorrelationResult::p, "Port probabilities (++, +-, -+, --)")
        .def_readonly("e_value", &CorrelationResult::e_value)
        .def_readonly("quadrature_error_estimate", &CorrelationResult::quadrature_error_estimate)
        .def_readonly("extension", &CorrelationResult::extension)
        .def_property_readonly("method", [](const CorrelationResult& r) { return to_string(r.method); })
        .def("probability", &CorrelationResult::probability, py::arg("sigma1"), py::arg("sigma2"));

    py::class_<ClosedFormModel>(m, "ClosedFormModel")
        .def_static("from_scenario", &ClosedFormModel::from_scenario, py::arg("scenario"))
        .def_readonly("tau", &ClosedFormModel::tau)
        .def_readonly("phi_tau", &ClosedFormModel::phi_tau)
        .def("scales", &ClosedFormModel::scales)
        .def("visibility", &ClosedFormModel::visibility)
        .def("center", [](const ClosedFormModel& c) { return py::make_tuple(c.center_ell1(), c.center_ell2()); })
        .def("envelope", &ClosedFormModel::envelope, py::arg("ell1"), py::arg("ell2"))
        .def("fringe_phase", &ClosedFormModel::fringe_phase, py::arg("ell1"), py::arg("ell2"))
        .def(
            "correlate",
            [](const ClosedFormModel& c, double ell1, double ell2, double theta1, double theta2) {
                return c.correlate(setting(ell1, theta1), setting(ell2, theta2));
            },
            py::arg("ell1"), py::arg("ell2"), py::arg("theta1") = constants::pi / 4.0,
            py::arg("theta2") = constants::pi / 4.0);

    m.def(
        "correlate_quadrature",
        [](const Scenario& s, double ell1, double ell2, const std::string& source, double theta1, double theta2,
           double tolerance) {
            QuadratureOptions opts;
            opts.tolerance = tolerance;
            const auto pair = make_pair(s, source);
            py::gil_scoped_release release;
            return correlate_quadrature(pair, setting(ell1, theta1), setting(ell2, theta2), opts);
        },
        py::arg("scenario"), py::arg("ell1"), py::arg("ell2"), py::arg("source") = "gaussian",
        py::arg("theta1") = constants::pi / 4.0, py::arg("theta2") = constants::pi / 4.0, py::arg("tolerance") = 1e-6,
        "Port probabilities by direct quadrature over the momentum distribution");

    m.def(
        "optimize_chsh",
        [](const Scenario& s) {
            const auto model = ClosedFormModel::from_scenario(s);
            const auto opt = optimize_closed_form(model);
            py::dict d = outcome_dict(chsh_value(closed_form_correlator(model), opt.settings));
            d["converged"] = opt.converged;
            d["sweeps"] = opt.sweeps;
            return d;
        },
        py::arg("scenario"), "Closed-form CHSH maximum over the four arm lengths");

    m.def(
        "chsh",
        [](const Scenario& s, const std::vector<double>& ells, const std::string& method) {
            const auto settings = settings_from(ells);
            if (method == "closed") return outcome_dict(chsh_value(closed_form_correlator(ClosedFormModel::from_scenario(s)), settings));
            if (method == "quad") return outcome_dict(chsh_value(quadrature_correlator(gaussian_pair_from_scenario(s)), settings));
            throw DomainError("method", "must be 'closed' or 'quad'");
        },
        py::arg("scenario"), py::arg("settings"), py::arg("method") = "closed",
        "CHSH value for explicit lengths (a, a', b, b') in metres");

    m.def(
        "montecarlo",
        [](const Scenario& s, std::uint64_t events, std::uint64_t seed, const std::string& mode,
           std::optional<std::vector<double>> ells) {
            const auto model = ClosedFormModel::from_scenario(s);
            const SwitchMode sw = parse_mode(mode);
            ChshSettings settings = ells ? settings_from(*ells, sw) : optimize_closed_form(model).settings;
            for (auto* x : {&settings.a, &settings.a_prime, &settings.b, &settings.b_prime}) x->switch_mode = sw;
            CountTable counts;
            {
                py::gil_scoped_release release;
                counts = run(closed_form_correlator(model), RunConfig{events, seed, sw, settings});
            }
            py::dict d = outcome_dict(estimate_chsh(counts, settings));
            py::list table;
            for (const auto& p : counts.pairs) {
                py::dict row;
                row["n"] = p.n;
                row["discarded"] = p.discarded;
                table.append(row);
            }
            d["counts"] = table;
            return d;
        },
        py::arg("scenario"), py::arg("events") = 10000, py::arg("seed") = 20240917, py::arg("mode") = "switched",
        py::arg("settings") = py::none(), "Sampled CHSH run; settings default to the closed-form optimum");

    m.def(
        "phase_stability",
        [](const Scenario& s, double r) {
            const auto b = phase_stability(s, RelativeErrors{r, r, r, r, r, r});
            py::list rows;
            for (const auto& t : b.terms) {
                py::dict row;
                row["parameter"] = t.parameter;
                row["value"] = t.value;
                row["derivative"] = t.derivative;
                row["contribution"] = t.contribution;
                row["within_budget"] = t.within_budget;
                rows.append(row);
            }
            return py::make_tuple(rows, b.total, b.within_budget);
        },
        py::arg("scenario"), py::arg("relative_error") = 1e-5);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line tool in-process; returns (exit_code, stdout, stderr)");

    m.attr("TSIRELSON_BOUND") = kTsirelsonBound;
    m.attr("VIOLATION_THRESHOLD") = kViolationThreshold;
}

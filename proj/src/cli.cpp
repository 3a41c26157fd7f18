#include "dtebell/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>
#include <sstream>

#include "dtebell/bell.hpp"
#include "dtebell/config.hpp"
#include "dtebell/csv.hpp"
#include "dtebell/dissociation.hpp"
#include "dtebell/errors.hpp"
#include "dtebell/montecarlo.hpp"
#include "dtebell/parallel.hpp"

namespace dtebell {

namespace {

constexpr double kMicron = 1e-6;
constexpr double kMilliGauss = 1e-7;

class UsageError : public Error {
public:
    using Error::Error;
};

enum class Method { Closed, Quad };

Method parse_method(const std::string& text) {
    if (text == "closed") return Method::Closed;
    if (text == "quad") return Method::Quad;
    throw UsageError("--method must be 'closed' or 'quad'");
}

SwitchMode parse_mode(const std::string& text) {
    if (text == "switched") return SwitchMode::Switched;
    if (text == "beamsplitter") return SwitchMode::BeamSplitter;
    throw UsageError("--mode must be 'switched' or 'beamsplitter'");
}

const char* mode_name(SwitchMode mode) {
    return mode == SwitchMode::Switched ? "switched" : "beamsplitter";
}

// Everything derived from one resolved configuration.
struct Analysis {
    Config config;
    ClosedFormModel model;

    explicit Analysis(Config cfg) : config(std::move(cfg)), model(ClosedFormModel::from_scenario(config.scenario)) {}

    InterferometerSetting setting1(std::optional<double> ell = std::nullopt) const {
        return {ell.value_or(config.ell1.value_or(model.center_ell1())), config.theta1, config.mode};
    }
    InterferometerSetting setting2(std::optional<double> ell = std::nullopt) const {
        return {ell.value_or(config.ell2.value_or(model.center_ell2())), config.theta2, config.mode};
    }

    DtePair pair() const {
        return config.source == SourceModel::Feshbach ? feshbach_pair_from_scenario(config.scenario)
                                                      : gaussian_pair_from_scenario(config.scenario);
    }

    Correlator correlator(Method method) const {
        if (method == Method::Closed) return closed_form_correlator(model);
        return quadrature_correlator(pair());
    }
};

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
};

Config resolve(const Common& common) {
    ConfigDocument doc = common.config_path.empty() ? ConfigDocument{} : ConfigDocument::load(common.config_path);
    for (const auto& o : common.overrides) doc.apply_override(o);
    return doc.resolve();
}

void print_warnings(const Analysis& a, std::ostream& err) {
    for (const auto& w : a.config.scenario.warnings()) fmt::print(err, "warning: {}\n", w);
}

// ------------------------------------------------------------------ scales

struct ScalesArgs {
    bool json = false;
};

int cmd_scales(const Common& common, const ScalesArgs& args, std::ostream& out, std::ostream& err) {
    const Analysis a(resolve(common));
    print_warnings(a, err);
    const auto s = a.model.scales();
    const double tau = a.model.tau;
    const auto f = feasible(s, tau);
    const auto pair = gaussian_pair_from_scenario(a.config.scenario);
    const std::vector<std::pair<std::string, double>> rows = {
        {"p0_rel_kg_m_s", s.p0_rel},
        {"v_rel_m_s", s.v_rel},
        {"lambda_bar_rel_m", s.lambda_bar_rel},
        {"lambda_rel_m", s.lambda_rel()},
        {"sigma_p_cm_kg_m_s", s.sigma_p_cm},
        {"sigma_p_rel_kg_m_s", s.sigma_p_rel},
        {"t_cm_s", s.t_cm},
        {"t_rel_s", s.t_rel},
        {"tau_s", tau},
        {"visibility", visibility(s, tau)},
        {"feasibility_product", f.product},
        {"lambda_ratio", f.lambda_ratio},
        {"separation_margin", pair.separation_margin()},
        {"phi_tau_rad", phi_tau(a.config.scenario, true)},
    };
    if (args.json) {
        nlohmann::ordered_json doc;
        for (const auto& [k, v] : rows) doc[k] = v;
        doc["feasible"] = f.feasible;
        out << doc.dump(2) << "\n";
    } else {
        for (const auto& [k, v] : rows) fmt::print(out, "{:<22}{:.12g}\n", k, v);
        fmt::print(out, "{:<22}{}\n", "feasible", f.feasible ? "true" : "false");
    }
    return kExitSuccess;
}

// -------------------------------------------------------------------- scan

struct ScanArgs {
    std::string axis;
    double from = 0.0;
    double to = 0.0;
    int steps = 0;
    std::string method = "closed";
    bool around_center = false;
};

int cmd_scan(const Common& common, const ScanArgs& args, std::ostream& out, std::ostream& err) {
    const Config base = resolve(common);
    const Method method = parse_method(args.method);
    if (args.axis != "ell1" && args.axis != "ell2" && args.axis != "tau" && args.axis != "field") {
        throw UsageError("--axis must be one of ell1, ell2, tau, field");
    }
    if (args.steps < 2) throw UsageError("--steps must be at least 2");
    if (!std::isfinite(args.from) || !std::isfinite(args.to)) throw UsageError("scan range must be finite");
    if (args.from == args.to) throw UsageError("scan range is empty (--from equals --to)");

    const Analysis reference(base);
    print_warnings(reference, err);
    const double center = args.axis == "ell1"   ? reference.model.center_ell1() / kMicron
                          : args.axis == "ell2" ? reference.model.center_ell2() / kMicron
                          : args.axis == "tau"  ? base.scenario.pulses.pulse_separation
                                                : base.scenario.pulses.base_field / kMilliGauss;
    const double offset = args.around_center ? center : 0.0;

    const auto n = static_cast<std::size_t>(args.steps);
    const auto rows = parallel_map(n, [&](std::size_t i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        const double value = offset + args.from + (args.to - args.from) * t;
        std::vector<csv::Cell> row{args.axis, value};
        Config cfg = base;
        std::optional<double> ell1, ell2;
        if (args.axis == "ell1") ell1 = value * kMicron;
        if (args.axis == "ell2") ell2 = value * kMicron;
        if (args.axis == "tau") cfg.scenario.pulses.pulse_separation = value;
        if (args.axis == "field") cfg.scenario.pulses.base_field = value * kMilliGauss;
        try {
            const Analysis a(cfg);
            const auto s1 = a.setting1(ell1);
            const auto s2 = a.setting2(ell2);
            row.insert(row.end(), {s1.ell / kMicron, s2.ell / kMicron, cfg.scenario.pulses.pulse_separation,
                                   cfg.scenario.pulses.base_field / kMilliGauss, args.method});
            const auto r = a.correlator(method)(s1, s2);
            row.insert(row.end(), {r.p[0], r.p[1], r.p[2], r.p[3], r.e_value, a.model.visibility(),
                                   r.quadrature_error_estimate, std::string{}});
        } catch (const Error& e) {
            row.resize(2);
            row.insert(row.end(), {std::monostate{}, std::monostate{}, cfg.scenario.pulses.pulse_separation,
                                   cfg.scenario.pulses.base_field / kMilliGauss, args.method});
            row.resize(14);
            row.emplace_back(std::string(e.what()));
        }
        return row;
    });

    csv::Writer writer(out, {"axis", "value", "ell1_um", "ell2_um", "tau_s", "base_field_mG", "method",
                             "P_pp", "P_pm", "P_mp", "P_mm", "E", "V", "error_estimate", "error"});
    int failures = 0;
    for (const auto& row : rows) {
        writer.row(row);
        if (!csv::format_cell(row.back()).empty()) ++failures;
    }
    if (failures) {
        fmt::print(err, "{} of {} scan points failed\n", failures, rows.size());
        return kExitRuntime;
    }
    return kExitSuccess;
}

// -------------------------------------------------------------------- bell

struct SettingsArgs {
    bool optimize = false;
    std::vector<double> settings_um;  // a, a', b, b'
    bool around_center = false;
    std::string method = "closed";
};

ChshSettings chosen_settings(const Analysis& a, const SettingsArgs& args, const Correlator& correlator,
                             std::ostream& err) {
    auto stamp = [&](ChshSettings s) {
        for (auto* ptr : {&s.a, &s.a_prime}) {
            ptr->theta = a.config.theta1;
            ptr->switch_mode = a.config.mode;
        }
        for (auto* ptr : {&s.b, &s.b_prime}) {
            ptr->theta = a.config.theta2;
            ptr->switch_mode = a.config.mode;
        }
        return s;
    };
    if (!args.settings_um.empty()) {
        if (args.settings_um.size() != 4) throw UsageError("--settings takes four lengths a,a',b,b' in um");
        const double c1 = args.around_center ? a.model.center_ell1() : 0.0;
        const double c2 = args.around_center ? a.model.center_ell2() : 0.0;
        const auto& v = args.settings_um;
        return stamp(ChshSettings{{c1 + v[0] * kMicron}, {c1 + v[1] * kMicron}, {c2 + v[2] * kMicron},
                                  {c2 + v[3] * kMicron}});
    }
    OptimizeOptions options;
    options.step = 0.5 * a.model.scales().lambda_bar_rel;
    const auto result = optimize_settings(correlator, stamp(seed_settings(a.model)), options);
    if (!result.converged) fmt::print(err, "warning: settings search stopped after {} sweeps\n", result.sweeps);
    return result.settings;
}

const char* kPairNames[4] = {"a,b", "a,b'", "a',b", "a',b'"};

std::array<std::pair<InterferometerSetting, InterferometerSetting>, 4> setting_pairs(const ChshSettings& s) {
    return {{{s.a, s.b}, {s.a, s.b_prime}, {s.a_prime, s.b}, {s.a_prime, s.b_prime}}};
}

int cmd_bell(const Common& common, const SettingsArgs& args, std::ostream& out, std::ostream& err) {
    if (args.optimize && !args.settings_um.empty()) throw UsageError("--optimize and --settings are exclusive");
    const Analysis a(resolve(common));
    print_warnings(a, err);
    const Method method = parse_method(args.method);
    const auto correlator = a.correlator(method);
    const auto settings = chosen_settings(a, args, correlator, err);
    const auto outcome = chsh_value(correlator, settings);
    const auto pairs = setting_pairs(settings);

    csv::Writer writer(out, {"pair", "ell1_um", "ell2_um", "method", "P_pp", "P_pm", "P_mp", "P_mm", "E",
                             "V", "S", "violated"});
    for (std::size_t i = 0; i < 4; ++i) {
        const auto r = correlator(pairs[i].first, pairs[i].second);
        writer.row({std::string(kPairNames[i]), pairs[i].first.ell / kMicron, pairs[i].second.ell / kMicron,
                    args.method, r.p[0], r.p[1], r.p[2], r.p[3], r.e_value, outcome.visibility,
                    outcome.s_value, outcome.violated});
    }
    fmt::print(err, "S = {:.6f}, visibility = {:.6f}, violated = {}\n", outcome.s_value, outcome.visibility,
               outcome.violated ? "true" : "false");
    return kExitSuccess;
}

// -------------------------------------------------------------- montecarlo

struct MonteCarloArgs {
    SettingsArgs settings;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> events;
    std::string mode;
};

int cmd_montecarlo(const Common& common, const MonteCarloArgs& args, std::ostream& out, std::ostream& err) {
    Config cfg = resolve(common);
    if (args.seed) cfg.seed = *args.seed;
    if (args.events) cfg.events = *args.events;
    if (!args.mode.empty()) cfg.mode = parse_mode(args.mode);
    if (cfg.events < 1) throw UsageError("--events must be at least 1");
    const Analysis a(cfg);
    print_warnings(a, err);
    const auto correlator = a.correlator(parse_method(args.settings.method));
    const auto settings = chosen_settings(a, args.settings, correlator, err);

    RunConfig run_config{cfg.events, cfg.seed, cfg.mode, settings};
    const auto probabilities = chsh_probabilities(correlator, settings);
    const auto table = sample_counts(probabilities, run_config.events_per_setting, run_config.seed,
                                     run_config.mode);
    const auto est = estimate_correlations(table);
    const auto outcome = estimate_chsh(table, settings);
    const auto pairs = setting_pairs(settings);

    csv::Writer writer(out, {"pair", "ell1_um", "ell2_um", "mode", "seed", "events", "n_pp", "n_pm", "n_mp",
                             "n_mm", "discarded", "E_hat", "E_stderr", "E_exact", "S_hat", "stderr",
                             "violated"});
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& c = table.pairs[i];
        writer.row({std::string(kPairNames[i]), pairs[i].first.ell / kMicron, pairs[i].second.ell / kMicron,
                    std::string(mode_name(cfg.mode)), cfg.seed, cfg.events, c.n[0], c.n[1], c.n[2], c.n[3],
                    c.discarded, est.e_values[i], std::sqrt(est.variances[i]), probabilities[i].e_value,
                    outcome.s_value, outcome.standard_error, outcome.violated});
    }

    const double c_tilde = cfg.c_tilde_norm_sq.value_or(c_tilde_for_mean_count(cfg.scenario, cfg.molecules));
    const double p = std::min(1.0, dissociation_probability(cfg.scenario, c_tilde));
    fmt::print(err, "S_hat = {:.6f} +- {:.6f}{}\n", outcome.s_value, outcome.standard_error,
               outcome.above_tsirelson ? " (above 2 sqrt 2, statistical fluctuation)" : "");
    fmt::print(err, "dissociation probability per molecule {:.6g}; multi-dissociation fraction {:.6g}\n", p,
               multi_dissociation_fraction(p, cfg.molecules));
    return kExitSuccess;
}

// ------------------------------------------------------------- feasibility

struct FeasibilityArgs {
    bool sweep_tau = false;
    double from = 0.0;
    double to = 3.0;
    int steps = 31;
    bool stability = false;
    double relative_error = 1e-5;
};

int cmd_feasibility(const Common& common, const FeasibilityArgs& args, std::ostream& out, std::ostream& err) {
    if (args.sweep_tau && args.stability) throw UsageError("--sweep-tau and --stability are exclusive");
    const Analysis a(resolve(common));
    print_warnings(a, err);
    const auto s = a.model.scales();

    if (args.sweep_tau) {
        if (args.steps < 2) throw UsageError("--steps must be at least 2");
        if (!(args.from >= 0.0) || !(args.to > args.from)) throw UsageError("tau range must satisfy 0 <= from < to");
        csv::Writer writer(out, {"tau_s", "t_cm_s", "t_rel_s", "product", "V", "lambda_ratio", "feasible"});
        for (int i = 0; i < args.steps; ++i) {
            const double tau = args.from + (args.to - args.from) * i / (args.steps - 1);
            const auto f = feasible(s, tau);
            writer.row({tau, s.t_cm, s.t_rel, f.product, visibility(s, tau), f.lambda_ratio, f.feasible});
        }
        fmt::print(err, "visibility crosses 1/sqrt(2) at tau = {:.6f} s\n", visibility_crossing(s));
        return kExitSuccess;
    }

    if (args.stability) {
        if (!(args.relative_error >= 0.0)) throw UsageError("--relative-error must be non-negative");
        const double r = args.relative_error;
        RelativeErrors errors{r, r, r, r, r, r};
        const auto budget = phase_stability(a.config.scenario, errors);
        csv::Writer writer(out, {"parameter", "value", "derivative_rad_per_unit", "relative_error", "delta",
                                 "contribution_rad", "budget_rad", "pass"});
        for (const auto& t : budget.terms) {
            writer.row({t.parameter, t.value, t.derivative, r, t.delta, t.contribution, budget.budget,
                        t.within_budget});
        }
        writer.row({std::string("total"), std::monostate{}, std::monostate{}, r, std::monostate{}, budget.total,
                    budget.budget, budget.within_budget});
        return kExitSuccess;
    }

    const double tau = a.model.tau;
    const auto f = feasible(s, tau);
    const auto fringe = fringe_periods_above_threshold(a.model);
    csv::Writer writer(out, {"quantity", "value"});
    writer.row({std::string("tau_s"), tau});
    writer.row({std::string("product"), f.product});
    writer.row({std::string("visibility"), visibility(s, tau)});
    writer.row({std::string("lambda_ratio"), f.lambda_ratio});
    writer.row({std::string("product_below_four"), f.product_below_four});
    writer.row({std::string("lambda_guard_passed"), f.lambda_guard_passed});
    writer.row({std::string("feasible"), f.feasible});
    writer.row({std::string("tau_crossing_s"), visibility_crossing(s)});
    writer.row({std::string("fringe_periods_above_threshold"), fringe.periods});

    const auto& cfg = a.config;
    const double c_tilde = cfg.c_tilde_norm_sq.value_or(c_tilde_for_mean_count(cfg.scenario, cfg.molecules));
    const double p = dissociation_probability(cfg.scenario, c_tilde);
    writer.row({std::string("molecules"), cfg.molecules});
    writer.row({std::string("c_tilde_norm_sq"), c_tilde});
    writer.row({std::string("dissociation_probability"), p});
    writer.row({std::string("mean_dissociated"), p * cfg.molecules});
    writer.row({std::string("multi_dissociation_fraction"), multi_dissociation_fraction(std::min(1.0, p), cfg.molecules)});
    return kExitSuccess;
}

void add_common(CLI::App* sub, Common& common) {
    sub->add_option("config", common.config_path, "Scenario configuration file")->check(CLI::ExistingFile);
    sub->add_option("--set", common.overrides, "Override a configuration key (section.key=value)")
        ->allow_extra_args(false);
}

void add_settings(CLI::App* sub, SettingsArgs& s) {
    auto* opt = sub->add_flag("--optimize", s.optimize, "Search CHSH settings starting from textbook angles");
    sub->add_option("--settings", s.settings_um, "Four lengths a,a',b,b' in um")
        ->delimiter(',')
        ->allow_extra_args(false)
        ->excludes(opt);
    sub->add_flag("--around-center", s.around_center, "Lengths are offsets from the envelope centre");
    sub->add_option("--method", s.method, "Correlator: closed or quad")->check(CLI::IsMember({"closed", "quad"}));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dissociation-time entanglement Bell-test calculator", "dtebell"};
    app.require_subcommand(1);

    Common common;
    ScalesArgs scales;
    ScanArgs scan;
    SettingsArgs bell;
    MonteCarloArgs mc;
    FeasibilityArgs feas;

    auto* s_scales = app.add_subcommand("scales", "Dispersion times, wavelength, and visibility");
    add_common(s_scales, common);
    s_scales->add_flag("--json", scales.json, "Emit a JSON document");

    auto* s_scan = app.add_subcommand("scan", "Correlation scan along one axis (CSV)");
    add_common(s_scan, common);
    s_scan->add_option("--axis", scan.axis, "ell1, ell2, tau or field")->required();
    s_scan->add_option("--from", scan.from, "Start (um, s or mG)")->required();
    s_scan->add_option("--to", scan.to, "End (um, s or mG)")->required();
    s_scan->add_option("--steps", scan.steps, "Number of grid points (>= 2)")->required();
    s_scan->add_option("--method", scan.method, "closed or quad");
    s_scan->add_flag("--around-center", scan.around_center, "Range is relative to the configured value or centre");

    auto* s_bell = app.add_subcommand("bell", "CHSH value for optimised or explicit settings (CSV)");
    add_common(s_bell, common);
    add_settings(s_bell, bell);

    auto* s_mc = app.add_subcommand("montecarlo", "Sampled CHSH run with counts (CSV)");
    add_common(s_mc, common);
    add_settings(s_mc, mc.settings);
    s_mc->add_option("--seed", mc.seed, "RNG seed, overrides run.seed");
    s_mc->add_option("--events", mc.events, "Events per setting pair, overrides run.events");
    s_mc->add_option("--mode", mc.mode, "switched or beamsplitter")->check(CLI::IsMember({"switched", "beamsplitter"}));

    auto* s_feas = app.add_subcommand("feasibility", "Feasibility summary, tau sweep, or phase stability (CSV)");
    add_common(s_feas, common);
    s_feas->add_flag("--sweep-tau", feas.sweep_tau, "Sweep the pulse separation");
    s_feas->add_option("--from", feas.from, "Sweep start (s)");
    s_feas->add_option("--to", feas.to, "Sweep end (s)");
    s_feas->add_option("--steps", feas.steps, "Sweep points");
    s_feas->add_flag("--stability", feas.stability, "Phase-stability report");
    s_feas->add_option("--relative-error", feas.relative_error, "Relative shot-to-shot error of each parameter");

    std::vector<std::string> argv_storage{"dtebell"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitSuccess;
    } catch (const CLI::ParseError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitConfig;
    }

    try {
        if (s_scales->parsed()) return cmd_scales(common, scales, out, err);
        if (s_scan->parsed()) return cmd_scan(common, scan, out, err);
        if (s_bell->parsed()) return cmd_bell(common, bell, out, err);
        if (s_mc->parsed()) return cmd_montecarlo(common, mc, out, err);
        if (s_feas->parsed()) return cmd_feasibility(common, feas, out, err);
    } catch (const ConfigError& e) {
        fmt::print(err, "config error: {}\n", e.what());
        return kExitConfig;
    } catch (const UsageError& e) {
        fmt::print(err, "usage error: {}\n", e.what());
        return kExitConfig;
    } catch (const BelowThresholdError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitConfig;
    } catch (const DomainError& e) {
        fmt::print(err, "invalid input: {}\n", e.what());
        return kExitConfig;
    } catch (const QuadratureError& e) {
        fmt::print(err, "quadrature failure: {}\n", e.what());
        return kExitRuntime;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitRuntime;
    }
    return kExitConfig;
}

}  // namespace dtebell

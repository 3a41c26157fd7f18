#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <json.hpp>
#include <map>
#include <sstream>

#include "dtebell/bell.hpp"
#include "dtebell/cli.hpp"
#include "dtebell/config.hpp"
#include "dtebell/csv.hpp"

using namespace dtebell;

namespace {

const std::string kCfg = std::string(DTEBELL_DATA_DIR) + "/paper-li6.cfg";

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    Outcome o;
    o.code = run_cli(args, out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

// Rows of a CSV output keyed by header name.
std::vector<std::map<std::string, std::string>> table(const std::string& text) {
    const auto records = csv::parse(text);
    std::vector<std::map<std::string, std::string>> rows;
    for (std::size_t i = 1; i < records.size(); ++i) {
        std::map<std::string, std::string> row;
        for (std::size_t j = 0; j < records[0].size(); ++j) row[records[0][j]] = records[i][j];
        rows.push_back(row);
    }
    return rows;
}

double num(const std::map<std::string, std::string>& row, const std::string& key) { return std::stod(row.at(key)); }

}  // namespace

TEST(Cli, ExitCodes) {
    EXPECT_EQ(cli({"--help"}).code, 0);
    EXPECT_EQ(cli({}).code, 2);
    EXPECT_EQ(cli({"warp"}).code, 2);
    EXPECT_EQ(cli({"scales", kCfg, "--set", "run.bogus=1"}).code, 2);
    EXPECT_EQ(cli({"scales", "/nonexistent.cfg"}).code, 2);
    const auto below = cli({"scales", kCfg, "--set", "pulses.height_mG=10"});
    EXPECT_EQ(below.code, 2);
    EXPECT_NE(below.err.find("below-threshold pulse"), std::string::npos);
}

TEST(Cli, ScalesHumanAndJsonAgree) {
    const auto human = cli({"scales", kCfg});
    ASSERT_EQ(human.code, 0) << human.err;
    const auto js = cli({"scales", kCfg, "--json"});
    ASSERT_EQ(js.code, 0);
    const auto doc = nlohmann::json::parse(js.out);
    EXPECT_NEAR(doc["t_rel_s"].get<double>(), 3.4, 0.1);
    EXPECT_NEAR(doc["t_cm_s"].get<double>(), 0.64, 0.01);
    EXPECT_NEAR(doc["visibility"].get<double>(), 0.72, 0.01);
    EXPECT_TRUE(doc["feasible"].get<bool>());
    std::istringstream lines(human.out);
    std::string key, value;
    int seen = 0;
    while (lines >> key >> value) {
        ASSERT_TRUE(doc.contains(key)) << key;
        if (key == "feasible") {
            EXPECT_EQ(value, "true");
        } else {
            const double v = doc[key].get<double>();
            EXPECT_NEAR(std::stod(value), v, 1e-11 * std::abs(v)) << key;
        }
        ++seen;
    }
    EXPECT_EQ(seen, static_cast<int>(doc.size()));
}

TEST(Cli, ScanUsageErrors) {
    EXPECT_EQ(cli({"scan", kCfg, "--axis", "ell1", "--from", "0", "--to", "1", "--steps", "1"}).code, 2);
    EXPECT_EQ(cli({"scan", kCfg, "--axis", "ell1", "--from", "1", "--to", "1", "--steps", "5"}).code, 2);
    EXPECT_EQ(cli({"scan", kCfg, "--axis", "mass", "--from", "0", "--to", "1", "--steps", "5"}).code, 2);
}

TEST(Cli, ScanFringePeriodMatchesWavelength) {
    const auto r = cli({"scan", kCfg, "--axis", "ell1", "--from", "-37", "--to", "37", "--steps", "741",
                        "--around-center"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = table(r.out);
    ASSERT_EQ(rows.size(), 741u);
    std::vector<double> x, e;
    for (const auto& row : rows) {
        x.push_back(num(row, "ell1_um"));
        e.push_back(num(row, "E"));
        const double derived = num(row, "P_pp") - num(row, "P_pm") - num(row, "P_mp") + num(row, "P_mm");
        EXPECT_NEAR(derived, num(row, "E"), 1e-9);
        EXPECT_TRUE(row.at("error").empty());
    }
    // Peak of the continuous Fourier transform of E(l1).
    double best_f = 0.0, best = 0.0;
    for (double f = 0.05; f < 0.12; f += 1e-5) {
        std::complex<double> s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += e[i] * std::exp(std::complex<double>(0.0, -2.0 * M_PI * f * x[i]));
        if (std::abs(s) > best) best = std::abs(s), best_f = f;
    }
    const auto model = ClosedFormModel::from_scenario(load_config(kCfg).scenario);
    const double lambda_um = model.scales().lambda_rel() * 1e6;
    EXPECT_NEAR(1.0 / best_f, lambda_um, 0.01 * lambda_um);
}

TEST(Cli, ScanQuadratureMatchesClosedForm) {
    const std::vector<std::string> base = {"scan", kCfg, "--axis", "ell2", "--from", "-8", "--to", "8",
                                          "--steps", "5", "--around-center"};
    auto closed = base, quad = base;
    quad.insert(quad.end(), {"--method", "quad"});
    const auto a = cli(closed), b = cli(quad);
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0) << b.err;
    const auto ra = table(a.out), rb = table(b.out);
    ASSERT_EQ(ra.size(), rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) {
        for (const char* k : {"P_pp", "P_pm", "P_mp", "P_mm"}) EXPECT_NEAR(num(ra[i], k), num(rb[i], k), 1e-6);
        EXPECT_EQ(rb[i].at("method"), "quad");
    }
}

TEST(Cli, ScanReportsFailingRows) {
    // Separations this short violate the packet-separation condition.
    const auto r = cli({"scan", kCfg, "--axis", "tau", "--from", "0.001", "--to", "1", "--steps", "3"});
    EXPECT_EQ(r.code, 1);
    const auto rows = table(r.out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_FALSE(rows[0].at("error").empty());
    EXPECT_TRUE(rows[2].at("error").empty());
    EXPECT_TRUE(rows[0].at("P_pp").empty());
}

TEST(Cli, BellOptimisedViolation) {
    const auto r = cli({"bell", kCfg, "--optimize"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = table(r.out);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_NEAR(num(rows[0], "S"), 2.03, 0.005);
    EXPECT_EQ(rows[0].at("violated"), "true");
    const auto late = table(cli({"bell", kCfg, "--optimize", "--set", "pulses.separation_s=2"}).out);
    EXPECT_LT(num(late[0], "S"), 2.0);
    EXPECT_EQ(late[0].at("violated"), "false");
}

TEST(Cli, BellExplicitSettingsMatchLibrary) {
    const auto r = cli({"bell", kCfg, "--settings", "0,3.1,1.55,-1.55", "--around-center"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto cfg = load_config(kCfg);
    const auto model = ClosedFormModel::from_scenario(cfg.scenario);
    auto s = [&](double base, double um, double theta) {
        return InterferometerSetting{base + um * 1e-6, theta, cfg.mode};
    };
    const ChshSettings settings{s(model.center_ell1(), 0.0, cfg.theta1), s(model.center_ell1(), 3.1, cfg.theta1),
                                s(model.center_ell2(), 1.55, cfg.theta2), s(model.center_ell2(), -1.55, cfg.theta2)};
    const auto out = chsh_value(closed_form_correlator(model), settings);
    const auto rows = table(r.out);
    EXPECT_EQ(rows[0].at("S"), csv::format_cell(out.s_value));
    EXPECT_EQ(rows[1].at("E"), csv::format_cell(out.e_values[1]));
    EXPECT_EQ(cli({"bell", kCfg, "--settings", "1,2,3"}).code, 2);
}

TEST(Cli, MonteCarloDeterministicAndPostSelected) {
    const auto a = cli({"montecarlo", kCfg, "--seed", "7", "--events", "10000"});
    const auto b = cli({"montecarlo", kCfg, "--seed", "7", "--events", "10000"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto rows = table(a.out);
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& row : rows) {
        EXPECT_EQ(num(row, "discarded"), 0.0);
        const double kept = num(row, "n_pp") + num(row, "n_pm") + num(row, "n_mp") + num(row, "n_mm");
        EXPECT_EQ(kept, 10000.0);
        EXPECT_NEAR(num(row, "E_hat"), num(row, "E_exact"), 5.0 * num(row, "E_stderr"));
    }
    const auto bs = table(cli({"montecarlo", kCfg, "--mode", "beamsplitter", "--seed", "3"}).out);
    for (const auto& row : bs) EXPECT_NEAR(num(row, "discarded"), 5000.0, 4.0 * 50.0);
}

TEST(Cli, FeasibilitySummarySweepAndStability) {
    const auto r = cli({"feasibility", kCfg});
    ASSERT_EQ(r.code, 0) << r.err;
    std::map<std::string, std::string> q;
    for (const auto& row : table(r.out)) q[row.at("quantity")] = row.at("value");
    EXPECT_EQ(q.at("feasible"), "true");
    EXPECT_NEAR(std::stod(q.at("product")), 3.77, 0.01);
    EXPECT_GT(std::stod(q.at("tau_crossing_s")), 1.0);
    EXPECT_LT(std::stod(q.at("tau_crossing_s")), 2.0);
    EXPECT_NEAR(std::stod(q.at("mean_dissociated")), 1.0, 1e-9);
    EXPECT_GT(std::stod(q.at("multi_dissociation_fraction")), 0.0);

    const auto sweep = table(cli({"feasibility", kCfg, "--sweep-tau"}).out);
    ASSERT_EQ(sweep.size(), 31u);
    double crossing = -1.0;
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        if (num(sweep[i - 1], "V") > kViolationThreshold && num(sweep[i], "V") <= kViolationThreshold) {
            crossing = num(sweep[i], "tau_s");
        }
        EXPECT_EQ(sweep[i].at("feasible"), num(sweep[i], "product") < 4.0 ? "true" : "false");
    }
    EXPECT_GT(crossing, 1.0);
    EXPECT_LE(crossing, 2.0);

    const auto st = table(cli({"feasibility", kCfg, "--stability", "--relative-error", "1e-5"}).out);
    ASSERT_EQ(st.size(), 7u);
    std::map<std::string, std::string> pass;
    for (const auto& row : st) pass[row.at("parameter")] = row.at("pass");
    EXPECT_EQ(pass.at("pulse_height"), "true");
    EXPECT_EQ(pass.at("pulse_duration"), "true");
    EXPECT_EQ(pass.at("base_field"), "false");
    EXPECT_NEAR(num(st[0], "contribution_rad"), 477.7, 0.5);

    const auto explicit_c = table(cli({"feasibility", kCfg, "--set", "source.c_tilde_norm_sq=0"}).out);
    for (const auto& row : explicit_c) {
        if (row.at("quantity") == "dissociation_probability") EXPECT_EQ(std::stod(row.at("value")), 0.0);
    }
}

TEST(Cli, OutputsAreDeterministic) {
    for (const std::vector<std::string>& args :
         {std::vector<std::string>{"scales", kCfg}, {"bell", kCfg},
          {"scan", kCfg, "--axis", "tau", "--from", "0.5", "--to", "1.5", "--steps", "7"}}) {
        EXPECT_EQ(cli(args).out, cli(args).out);
    }
}

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "nmar/errors.hpp"
#include "nmar/harness.hpp"
#include "nmar/models.hpp"
#include "nmar/stats.hpp"

using namespace nmar;

namespace {

SyntheticModel model_named(const std::string& name, double level = 0.5) {
    ModelParams p;
    p.name = name;
    p.level = level;
    return make_model(p);
}

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.estimators = {"select_phi", "ht_breve", "complete_case"};
    c.n_grid = {200, 400, 800};
    c.replications = 3;
    c.n_eval = 2000;
    return c;
}

std::string csv_of(const ExperimentResult& r) {
    std::ostringstream out;
    write_results_csv(r, out);
    return out.str();
}

}  // namespace

TEST(LpError, TruthGivesZero) {
    const auto m = model_named("nmar_sine");
    EXPECT_EQ(lp_error(m.m_true, m, 2.0, 5000, 1), 0.0);
}

TEST(LpError, ConstantIntegrand) {
    const auto m = model_named("classification_constant", 0.3);
    const PointFunction c = [](std::span<const double>) { return 0.8; };
    EXPECT_NEAR(lp_error(c, m, 2.0, 1000, 2), 0.25, 1e-15);
    EXPECT_NEAR(lp_error(c, m, 1.0, 1000, 2), 0.5, 1e-15);
    EXPECT_NEAR(lp_error(c, m, 3.0, 1000, 2), 0.125, 1e-15);
}

TEST(LpError, StepAgainstIdentityWithinMonteCarloError) {
    const auto m = model_named("classification_linear");
    const PointFunction step = [](std::span<const double> x) { return x[0] < 0.5 ? 0.0 : 1.0; };
    const std::size_t n = 100000;
    // Integral of (step - x)^2 is 1/12; the integrand has variance 1/80 - 1/144 = 1/180.
    EXPECT_NEAR(lp_error(step, m, 2.0, n, 3), 1.0 / 12.0, 3.0 * std::sqrt(1.0 / 180.0 / n));
    EXPECT_THROW(lp_error(step, m, 2.0, 999, 3), ConfigError);
    EXPECT_THROW(lp_error(step, m, 0.5, 1000, 3), ConfigError);
}

TEST(RateFit, ExactPowerLawAndConstant) {
    std::vector<std::pair<double, double>> pts;
    for (double n : {500.0, 2000.0, 8000.0, 32000.0}) pts.emplace_back(n, 3.0 * std::pow(n, -0.4));
    const auto f = rate_fit(pts);
    EXPECT_NEAR(f.slope, -0.4, 1e-10);
    EXPECT_NEAR(f.intercept, std::log(3.0), 1e-9);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    std::vector<std::pair<double, double>> flat{{10, 0.2}, {20, 0.2}, {40, 0.2}};
    EXPECT_NEAR(rate_fit(flat).slope, 0.0, 1e-15);
    std::vector<std::pair<double, double>> two{{10, 0.2}, {20, 0.1}};
    EXPECT_THROW(rate_fit(two), ConfigError);
    std::vector<std::pair<double, double>> bad{{10, 0.2}, {20, 0.0}, {40, 0.1}};
    EXPECT_THROW(rate_fit(bad), ConfigError);
}

TEST(Stats, MedianAndIqr) {
    EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
    EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
    EXPECT_TRUE(std::isnan(median({})));
    EXPECT_DOUBLE_EQ(iqr({1.0, 2.0, 3.0, 4.0, 5.0}), 2.0);
}

TEST(RunExperiment, SmallestRun) {
    ExperimentConfig c;
    c.model.name = "full_observation";
    c.estimators = {"nw_full"};
    c.n_grid = {300};
    c.replications = 1;
    c.n_eval = 1000;
    const auto r = run_experiment(c);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_TRUE(std::isfinite(r.rows[0].lp_error));
    EXPECT_TRUE(r.rows[0].failure.empty());
    EXPECT_EQ(r.rows[0].rep, 0);
    EXPECT_TRUE(r.rates.empty());
}

TEST(RunExperiment, DeterministicAcrossThreadCounts) {
    auto c = small_config();
    c.threads = 1;
    const auto a = csv_of(run_experiment(c));
    c.threads = 4;
    const auto b = csv_of(run_experiment(c));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, csv_of(run_experiment(c)));
    c.seed = 2;
    EXPECT_NE(a, csv_of(run_experiment(c)));
}

TEST(RunExperiment, AggregatesRecomputableFromRows) {
    const auto c = small_config();
    const auto r = run_experiment(c);
    EXPECT_EQ(r.rows.size(), c.estimators.size() * c.n_grid.size() * c.replications);
    for (const auto& name : c.estimators) {
        for (auto n : c.n_grid) {
            std::vector<double> errs;
            for (const auto& row : r.rows) {
                if (row.estimator == name && row.n == n) errs.push_back(row.lp_error);
            }
            const auto* agg = r.find(name, n);
            ASSERT_NE(agg, nullptr);
            EXPECT_EQ(agg->median, median(errs));
            EXPECT_EQ(agg->count, errs.size());
        }
    }
    for (const auto& row : r.rows) {
        if (row.estimator == "complete_case") {
            EXPECT_FALSE(row.phi_index.has_value());
        } else {
            EXPECT_TRUE(row.phi_index.has_value());
        }
        EXPECT_EQ(row.runtime_ms, 0.0);
    }
    EXPECT_EQ(r.rates.size(), c.estimators.size());
}

TEST(RunExperiment, CsvLayout) {
    auto c = small_config();
    c.estimators = {"complete_case"};
    c.replications = 2;
    const auto text = csv_of(run_experiment(c));
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "estimator,n,rep,lp_error,phi_index,runtime_ms");
    std::size_t rows = 0, aggregates = 0;
    while (std::getline(in, line)) {
        if (line.find(",-1,") != std::string::npos) {
            ++aggregates;
        } else {
            ++rows;
        }
    }
    EXPECT_EQ(rows, 6u);
    EXPECT_EQ(aggregates, 3u);
}

TEST(RunExperiment, FailuresAreRecordedAndRunContinues) {
    auto c = small_config();
    c.estimators = {"nw_full", "complete_case"};
    c.replications = 2;
    const auto r = run_experiment(c);
    for (const auto& row : r.rows) {
        if (row.estimator == "nw_full") {
            EXPECT_TRUE(std::isnan(row.lp_error));
            EXPECT_FALSE(row.failure.empty());
        } else {
            EXPECT_TRUE(std::isfinite(row.lp_error));
        }
    }
    EXPECT_EQ(r.find("nw_full", 200)->failures, 2u);
    EXPECT_EQ(r.find("nw_full", 200)->count, 0u);
}

TEST(RunExperiment, ClassificationColumns) {
    ExperimentConfig c;
    c.model.name = "classification_linear";
    c.estimators = {"complete_case"};
    c.n_grid = {400};
    c.replications = 2;
    c.n_eval = 2000;
    const auto r = run_experiment(c);
    EXPECT_TRUE(r.classification);
    for (const auto& row : r.rows) {
        ASSERT_TRUE(row.excess.has_value());
        EXPECT_DOUBLE_EQ(*row.excess, *row.risk - *row.bayes_risk);
        EXPECT_EQ(*row.bayes_risk, 0.25);
    }
    const auto text = csv_of(r);
    EXPECT_EQ(text.substr(0, text.find('\n')), "estimator,n,rep,lp_error,phi_index,runtime_ms,risk,bayes_risk,excess");
}

TEST(Isolation, EstimatesIgnoreTamperedTruth) {
    const auto model = model_named("nmar_sine");
    auto g = generate(model, 400, 9);
    const auto before = g.data;
    for (auto& y : g.truth.y) y = -y;
    for (auto& p : g.truth.pi) p = 1.0;
    EXPECT_EQ(g.data, before);
    const ExperimentConfig c;
    const auto s = split(g.data, 0.5, 1);
    const auto cover = make_cover(c, 400, 1.0);
    const auto clean = generate(model, 400, 9);
    for (const auto& name : {"select_phi", "ht_breve", "ht_tilde", "complete_case", "plugin_gamma"}) {
        const auto a = fit_estimator(name, g.data, s, cover, c);
        const auto b = fit_estimator(name, clean.data, s, cover, c);
        for (int i = 0; i <= 50; ++i) {
            const std::vector<double> x{i / 50.0};
            EXPECT_EQ(a(x), b(x)) << name;
        }
    }
}

TEST(FitEstimator, UnknownNameAndPluginDefault) {
    const auto model = model_named("nmar_sine");
    const auto g = generate(model, 300, 4);
    const auto s = split(g.data, 0.5, 1);
    ExperimentConfig c;
    const auto cover = make_cover(c, 300, 1.0);
    EXPECT_THROW(fit_estimator("oracle", g.data, s, cover, c), ConfigError);
    const auto sm = make_smoothers(c, 300);
    const auto est = fit_estimator("plugin_gamma", g.data, s, cover, c);
    const std::vector<double> x{0.3};
    EXPECT_EQ(est(x), m_hat_gamma(g.data, sm.K, sm.h, x, 1.0));
    c.plugin_gamma = -0.5;
    EXPECT_EQ(fit_estimator("plugin_gamma", g.data, s, cover, c)(x), m_hat_gamma(g.data, sm.K, sm.h, x, -0.5));
}

TEST(Smoothers, BandwidthsFromConfig) {
    ExperimentConfig c;
    c.bandwidth = BandwidthPolicy::power_rule(1.0, 0.2);
    auto sm = make_smoothers(c, 32);
    EXPECT_NEAR(sm.h, 0.5, 1e-15);
    EXPECT_EQ(sm.h, sm.lambda);
    c.aux_bandwidth = BandwidthPolicy::fixed(0.3);
    c.aux_kernel_family = "triangle";
    sm = make_smoothers(c, 32);
    EXPECT_EQ(sm.lambda, 0.3);
    EXPECT_EQ(sm.H, KernelSpec::triangle());
    EXPECT_EQ(sm.K, KernelSpec::box());
}

TEST(RiskTable, Layout) {
    SelectionResult s;
    s.risks = {0.5, 0.25};
    const PhiCover cover({PhiFunction::exp_gamma(-1.0), PhiFunction::exp_gamma(1.0, 0.5)}, 0.1, 1.0, 3.0, "two");
    std::ostringstream out;
    write_risk_table(s, cover, out, "breve");
    EXPECT_EQ(out.str(), "phi_index,gamma_or_tag,risk,variant\n0,-1,0.5,breve\n1,0.5*exp(1y),0.25,breve\n");
}

TEST(Plot, WritesSvg) {
    const auto r = run_experiment(small_config());
    const auto path = std::filesystem::temp_directory_path() / "nmar_plot_test.svg";
    write_rate_plot(r, path);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_NE(ss.str().find("<svg"), std::string::npos);
    EXPECT_NE(ss.str().find("select_phi"), std::string::npos);
    std::filesystem::remove(path);
}

TEST(Config, ParsesKeysCommentsAndLists) {
    std::istringstream in(
        "# experiment\n"
        "model.name = mar_sine\n"
        "model.d = 2\n"
        "model.z_coords = 1\n"
        "estimators = select_phi, complete_case  # two\n"
        "n_grid = 100,200,400\n"
        "replications = 4\n"
        "cover.epsilon_mode = fixed\n"
        "cover.epsilon = 0.2\n"
        "kernel.family = triangle\n"
        "bandwidth.mode = fixed\n"
        "bandwidth.h0 = 0.3\n"
        "aux_bandwidth.h0 = 0.4\n"
        "ht.use_lambda = true\n"
        "\n");
    const auto c = parse_config(in);
    EXPECT_EQ(c.model.name, "mar_sine");
    EXPECT_EQ(c.model.d, 2u);
    EXPECT_EQ(c.model.z_coords, std::vector<std::size_t>{0});
    EXPECT_EQ(c.estimators, (std::vector<std::string>{"select_phi", "complete_case"}));
    EXPECT_EQ(c.n_grid, (std::vector<std::size_t>{100, 200, 400}));
    EXPECT_EQ(c.replications, 4u);
    EXPECT_EQ(c.epsilon_mode, EpsilonMode::fixed);
    EXPECT_EQ(regression_kernel(c), KernelSpec::triangle());
    EXPECT_EQ(auxiliary_kernel(c), KernelSpec::triangle());
    EXPECT_EQ(c.bandwidth.mode, BandwidthMode::fixed);
    EXPECT_EQ(auxiliary_bandwidth(c).h0, 0.4);
    EXPECT_EQ(auxiliary_bandwidth(c).mode, BandwidthMode::fixed);
    EXPECT_TRUE(c.ht_use_lambda);
}

TEST(Config, ErrorsNameTheLine) {
    const auto message = [](const std::string& text) {
        std::istringstream in(text);
        try {
            parse_config(in);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message("seed = 1\nbogus.key = 3\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("replications = many\n").find("line 1"), std::string::npos);
    EXPECT_NE(message("just words\n").find("line 1"), std::string::npos);
    EXPECT_NE(message("model.z_coords = 0\n").find("line 1"), std::string::npos);
    EXPECT_NE(message("n_grid = 400, 200\n").find("increasing"), std::string::npos);
    EXPECT_NE(message("estimators = magic\n").find("magic"), std::string::npos);
    EXPECT_NE(message("replications = 0\n").find("replications"), std::string::npos);
    EXPECT_NE(message("p = 0.5\n").find("p must"), std::string::npos);
    EXPECT_NE(message("bandwidth.beta = 1.0\n").find("beta"), std::string::npos);
    EXPECT_NE(message("model.name = unknown\n").find("unknown model"), std::string::npos);
}

TEST(Config, Defaults) {
    const ExperimentConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.split_alpha, 0.5);
    EXPECT_EQ(c.p, 2.0);
    EXPECT_EQ(c.n_eval, 20000u);
    EXPECT_EQ(c.n_grid, (std::vector<std::size_t>{500, 2000, 8000}));
    EXPECT_EQ(c.epsilon_mode, EpsilonMode::n_power);
    EXPECT_EQ(c.ht_pi0, 1e-3);
    EXPECT_EQ(regression_kernel(c), KernelSpec::box());
}

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + NMAR_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ExitCodes) {
    const auto dir = std::filesystem::temp_directory_path() / "nmar_cli_test";
    std::filesystem::create_directories(dir);
    const auto data = (dir / "d.csv").string();
    EXPECT_EQ(run_cli("simulate -n 200 --seed 3 -o " + data), 0);
    EXPECT_TRUE(std::filesystem::exists(data));
    EXPECT_EQ(run_cli("fit -d " + data + " -e complete_case -o " + (dir / "fit.csv").string()), 0);
    EXPECT_EQ(run_cli("select-phi -d " + data + " --variant breve -o " + (dir / "r.csv").string()), 0);
    EXPECT_EQ(run_cli("simulate -n 10 --set no.such.key=1"), 1);
    EXPECT_EQ(run_cli("fit -d " + (dir / "missing.csv").string()), 2);
    EXPECT_EQ(run_cli("cover-check -n 400 --samples 200 --grid 200"), 0);
    EXPECT_EQ(run_cli("cover-check -n 400 --samples 200 --grid 200 --tolerance 0.01"), 2);
    std::filesystem::remove_all(dir);
}

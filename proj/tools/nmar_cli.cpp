#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nmar/classify.hpp"
#include "nmar/config.hpp"
#include "nmar/cover.hpp"
#include "nmar/csv.hpp"
#include "nmar/errors.hpp"
#include "nmar/harness.hpp"
#include "nmar/ht.hpp"
#include "nmar/models.hpp"
#include "nmar/rng.hpp"
#include "nmar/simd.hpp"

namespace {

using namespace nmar;

struct Common {
    std::string config_path;
    std::vector<std::string> settings;

    ExperimentConfig load() const {
        ExperimentConfig c;
        if (!config_path.empty()) c = load_config(config_path);
        for (const auto& s : settings) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
            std::string key = s.substr(0, eq);
            while (!key.empty() && key.back() == ' ') key.pop_back();
            apply_setting(c, key, s.substr(eq + 1));
        }
        c.validate();
        return c;
    }
};

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("-c,--config", common.config_path, "Configuration file (key = value lines)");
    cmd->add_option("-s,--set", common.settings, "Override a configuration key, e.g. --set model.gamma=1");
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path, std::ios::binary);
    if (!file) throw ConfigError("cannot write '" + path + "'");
    return file;
}

Dataset load_data(const std::string& path, const ExperimentConfig& config) {
    DatasetMeta meta;
    meta.z_coords = config.model.z_coords;
    meta.bound = make_model(config.model).bound;
    return read_csv(std::filesystem::path(path), meta);
}

std::vector<std::vector<double>> load_points(const std::string& path, std::size_t d) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::vector<std::vector<double>> points;
    std::string line;
    std::getline(in, line);
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() < d) throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(d) + " coordinates");
        std::vector<double> x(d);
        for (std::size_t k = 0; k < d; ++k) x[k] = parse_double(fields[k], row);
        points.push_back(std::move(x));
    }
    return points;
}

int run(int argc, char** argv) {
    CLI::App app{"Kernel regression and classification with responses missing not at random"};
    app.require_subcommand(1);
    std::string simd_backend;
    app.add_option("--simd", simd_backend, "Force the SIMD backend (scalar or avx2)");

    Common common;

    auto* simulate = app.add_subcommand("simulate", "Draw a dataset from the configured model and write it as CSV");
    add_common(simulate, common);
    std::size_t sim_n = 1000;
    std::uint64_t sim_seed = 1;
    std::string sim_out;
    simulate->add_option("-n", sim_n, "Sample size");
    simulate->add_option("--seed", sim_seed, "Random seed");
    simulate->add_option("-o,--out", sim_out, "Output CSV (default stdout)");

    auto* fitcmd = app.add_subcommand("fit", "Fit one estimator to a dataset and write predictions x...,m_hat");
    add_common(fitcmd, common);
    std::string fit_data, fit_out, fit_at, fit_estimator_name = "select_phi";
    std::uint64_t fit_seed = 1;
    fitcmd->add_option("-d,--data", fit_data, "Dataset CSV")->required();
    fitcmd->add_option("-e,--estimator", fit_estimator_name, "Estimator name");
    fitcmd->add_option("--at", fit_at, "CSV of query points (header then x1..xd); default: the dataset rows");
    fitcmd->add_option("--seed", fit_seed, "Seed of the training/validation split");
    fitcmd->add_option("-o,--out", fit_out, "Output CSV (default stdout)");

    auto* selcmd = app.add_subcommand("select-phi", "Write the risk of every cover member for a dataset");
    add_common(selcmd, common);
    std::string sel_data, sel_out, sel_variant = "plug_in";
    std::uint64_t sel_seed = 1;
    selcmd->add_option("-d,--data", sel_data, "Dataset CSV")->required();
    selcmd->add_option("--variant", sel_variant, "plug_in, tilde or breve")
        ->check(CLI::IsMember({"plug_in", "tilde", "breve"}));
    selcmd->add_option("--seed", sel_seed, "Seed of the training/validation split");
    selcmd->add_option("-o,--out", sel_out, "Output CSV (default stdout)");

    auto* covcmd = app.add_subcommand("cover-check", "Validate the configured cover against sampled class members");
    add_common(covcmd, common);
    std::size_t cov_n = 1000, cov_samples = 1000, cov_grid = 1000;
    double cov_tol = 1.001;
    std::uint64_t cov_seed = 1;
    covcmd->add_option("-n", cov_n, "Sample size setting the epsilon schedule");
    covcmd->add_option("--samples", cov_samples, "Number of sampled exponents");
    covcmd->add_option("--grid", cov_grid, "Points of the y grid");
    covcmd->add_option("--tolerance", cov_tol, "Accepted distance as a multiple of epsilon");
    covcmd->add_option("--seed", cov_seed, "Random seed");

    auto* clscmd = app.add_subcommand("classify", "Fit plug-in classifiers and report their risk");
    add_common(clscmd, common);
    std::size_t cls_n = 2000;
    std::uint64_t cls_seed = 1;
    std::string cls_out;
    clscmd->add_option("-n", cls_n, "Sample size");
    clscmd->add_option("--seed", cls_seed, "Random seed");
    clscmd->add_option("-o,--out", cls_out, "Output CSV (default stdout)");

    auto* ratecmd = app.add_subcommand("rates", "Run the configured experiment; write results CSV and plot");
    add_common(ratecmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (simd_backend == "scalar") {
        simd::set_backend(simd::Backend::scalar);
    } else if (simd_backend == "avx2") {
        simd::set_backend(simd::Backend::avx2);
    } else if (!simd_backend.empty()) {
        throw ConfigError("--simd must be scalar or avx2");
    }

    const auto config = common.load();

    if (simulate->parsed()) {
        const auto model = make_model(config.model);
        const auto gen = generate(model, sim_n, sim_seed);
        std::ofstream file;
        write_csv(gen.data, open_output(sim_out, file));
        return 0;
    }

    if (fitcmd->parsed()) {
        const auto data = load_data(fit_data, config);
        const auto sp = split(data, config.split_alpha, fit_seed);
        const auto cover = make_cover(config, data.size(), data.bound());
        const auto est = fit_estimator(fit_estimator_name, data, sp, cover, config);
        std::vector<std::vector<double>> points;
        if (fit_at.empty()) {
            for (const auto& o : data.observations()) points.push_back(o.x);
        } else {
            points = load_points(fit_at, data.dim());
        }
        std::ofstream file;
        auto& out = open_output(fit_out, file);
        for (std::size_t k = 0; k < data.dim(); ++k) out << 'x' << k + 1 << ',';
        out << "m_hat\n";
        for (const auto& x : points) {
            for (double v : x) out << format_double(v) << ',';
            out << format_double(est(x)) << '\n';
        }
        if (est.meta().phi_index) std::cerr << "selected phi index " << *est.meta().phi_index << '\n';
        return 0;
    }

    if (selcmd->parsed()) {
        const auto data = load_data(sel_data, config);
        const auto sp = split(data, config.split_alpha, sel_seed);
        const auto cover = make_cover(config, data.size(), data.bound());
        const auto sm = make_smoothers(config, data.size());
        std::ofstream file;
        auto& out = open_output(sel_out, file);
        if (sel_variant == "plug_in") {
            write_risk_table(select_phi(data, sp, cover, sm), cover, out);
        } else {
            HTConfig ht;
            ht.variant = sel_variant == "tilde" ? PiKind::loo_tilde : PiKind::loo_breve;
            ht.pi0 = config.ht_pi0;
            ht.smoothers = sm;
            ht.use_lambda = config.ht_use_lambda;
            write_risk_table(select_phi_ht(data, sp, cover, ht), cover, out, sel_variant);
        }
        return 0;
    }

    if (covcmd->parsed()) {
        const auto cover = make_cover(config, cov_n, make_model(config.model).bound);
        std::vector<PhiFunction> sample;
        if (config.cover_kind == "exp") {
            auto rng = make_rng(cov_seed, {0xc0});
            std::uniform_real_distribution<double> u(-config.cover_M, config.cover_M);
            for (std::size_t i = 0; i < cov_samples; ++i) sample.push_back(PhiFunction::exp_gamma(u(rng)));
        } else {
            sample = cover.members();
        }
        const auto report = validate_cover(cover, sample, cov_grid, cov_tol);
        std::cout << "members," << cover.size() << "\nepsilon," << format_double(cover.epsilon())
                  << "\nworst_distance," << format_double(report.worst_distance) << "\nworst_sample,"
                  << sample[report.worst_sample].tag() << "\nnearest_member," << cover[report.nearest_member].tag()
                  << "\nworst_y," << format_double(report.worst_y) << "\nok," << (report.ok ? "true" : "false")
                  << '\n';
        if (config.cover_kind == "exp") {
            std::cout << "bound," << covering_number_bound(config.cover_M, cover.L(), cover.epsilon()) << '\n';
        }
        return report.ok ? 0 : 2;
    }

    if (clscmd->parsed()) {
        const auto model = make_model(config.model);
        if (model.task != Task::classification) throw ConfigError("classify needs a classification model");
        const auto gen = generate(model, cls_n, stream_seed(cls_seed, {1}));
        const auto sp = split(gen.data, config.split_alpha, stream_seed(cls_seed, {2}));
        const auto cover = make_cover(config, cls_n, model.bound);
        std::ofstream file;
        auto& out = open_output(cls_out, file);
        out << "classifier,empirical_risk,bayes_risk,excess,n_eval\n";
        auto emit = [&](const Classifier& c) {
            const auto r = risk_report(c, model, config.n_eval, stream_seed(cls_seed, {3}));
            out << c.source() << ',' << format_double(r.empirical_risk) << ',' << format_double(r.bayes_risk) << ','
                << format_double(r.excess) << ',' << r.n_eval << '\n';
        };
        emit(bayes_classifier(model));
        for (const auto& name : config.estimators) {
            emit(plugin_classifier(fit_estimator(name, gen.data, sp, cover, config)));
        }
        return 0;
    }

    if (ratecmd->parsed()) {
        const auto result = run_experiment(config);
        write_results_csv(result, std::filesystem::path(config.output_results));
        if (!config.output_plot.empty()) write_rate_plot(result, config.output_plot);
        std::cout << "estimator,slope,intercept,r_squared\n";
        for (const auto& r : result.rates) {
            std::cout << r.estimator << ',' << format_double(r.fit.slope) << ',' << format_double(r.fit.intercept)
                      << ',' << format_double(r.fit.r_squared) << '\n';
        }
        for (const auto& row : result.rows) {
            if (!row.failure.empty()) {
                std::cerr << "failed: " << row.estimator << " n=" << row.n << " rep=" << row.rep << ": "
                          << row.failure << '\n';
            }
        }
        return 0;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const nmar::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

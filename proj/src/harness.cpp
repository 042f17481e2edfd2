#include "nmar/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <thread>

#include "nmar/classify.hpp"
#include "nmar/csv.hpp"
#include "nmar/errors.hpp"
#include "nmar/ht.hpp"
#include "nmar/rng.hpp"

namespace nmar {

double lp_error(const PointFunction& f, const SyntheticModel& model, double p, std::size_t n_eval,
                std::uint64_t seed) {
    if (n_eval < 1000) throw ConfigError("lp_error needs n_eval >= 1000");
    if (!(p >= 1.0)) throw ConfigError("lp_error needs p >= 1");
    auto rng = make_rng(seed, {0xe7a1});
    double total = 0.0;
    for (std::size_t i = 0; i < n_eval; ++i) {
        const auto x = model.covariates.sample(rng);
        total += std::pow(std::abs(f(x) - model.m_true(x)), p);
    }
    return total / static_cast<double>(n_eval);
}

double lp_error(const RegressionEstimate& estimate, const SyntheticModel& model, double p, std::size_t n_eval,
                std::uint64_t seed) {
    return lp_error([&](std::span<const double> x) { return estimate(x); }, model, p, n_eval, seed);
}

LineFit rate_fit(std::span<const std::pair<double, double>> points) {
    if (points.size() < 3) throw ConfigError("rate fit needs at least 3 points");
    std::vector<double> lx, ly;
    for (const auto& [n, err] : points) {
        if (!(err > 0.0) || !(n > 0.0)) throw ConfigError("rate fit needs positive sample sizes and errors");
        lx.push_back(std::log(n));
        ly.push_back(std::log(err));
    }
    return ols(lx, ly);
}

const Aggregate* ExperimentResult::find(std::string_view estimator, std::size_t n) const {
    for (const auto& a : aggregates) {
        if (a.estimator == estimator && a.n == n) return &a;
    }
    return nullptr;
}

PhiCover make_cover(const ExperimentConfig& config, std::size_t n, double L) {
    const double eps = cover_epsilon(config.epsilon_mode, config.epsilon, n);
    if (config.cover_kind == "tabulated") return load_table_cover(config.cover_table, eps, L, *config.cover_B);
    auto cover = build_exp_cover(config.cover_M, L, eps);
    if (config.cover_B && *config.cover_B < cover.B()) throw ConfigError("cover.B is below exp(M L)");
    return cover;
}

Smoothers make_smoothers(const ExperimentConfig& config, std::size_t n) {
    Smoothers sm;
    sm.K = regression_kernel(config);
    sm.h = bandwidth(config.bandwidth, n, config.model.d);
    sm.H = auxiliary_kernel(config);
    sm.lambda = bandwidth(auxiliary_bandwidth(config), n, config.model.z_coords.size());
    return sm;
}

RegressionEstimate fit_estimator(const std::string& name, const Dataset& data, const DataSplit& split,
                                 const PhiCover& cover, const ExperimentConfig& config) {
    const auto sm = make_smoothers(config, data.size());
    if (name == "plugin_gamma") {
        const double model_gamma = config.model.name == "mar_sine" ? 0.0 : config.model.gamma;
        return plugin_gamma_estimate(data, sm.K, sm.h, config.plugin_gamma.value_or(model_gamma));
    }
    if (name == "select_phi") return fit(data, split, cover, sm);
    if (name == "ht_tilde" || name == "ht_breve") {
        HTConfig ht;
        ht.variant = name == "ht_tilde" ? PiKind::loo_tilde : PiKind::loo_breve;
        ht.pi0 = config.ht_pi0;
        ht.smoothers = sm;
        ht.use_lambda = config.ht_use_lambda;
        return fit_ht(data, split, cover, ht);
    }
    if (name == "complete_case") return complete_case_estimate(data, sm.K, sm.h);
    if (name == "nw_full") return nw_full_estimate(data, sm.K, sm.h);
    throw ConfigError("unknown estimator '" + name + "'");
}

namespace {

struct Cell {
    std::size_t n_index;
    std::size_t rep;
};

std::vector<ResultRow> run_cell(const ExperimentConfig& config, const SyntheticModel& model, const PhiCover& cover,
                                std::size_t n, std::size_t rep) {
    std::vector<ResultRow> rows;
    const auto data_seed = stream_seed(config.seed, {n, rep, 1});
    const auto split_seed = stream_seed(config.seed, {n, rep, 2});
    const auto eval_seed = stream_seed(config.seed, {3, rep});
    const auto risk_seed = stream_seed(config.seed, {4, rep});

    std::optional<Generated> gen;
    std::optional<DataSplit> sp;
    std::string setup_failure;
    try {
        gen = generate(model, n, data_seed);
        sp = split(gen->data, config.split_alpha, split_seed);
    } catch (const std::exception& e) {
        setup_failure = e.what();
    }

    for (const auto& name : config.estimators) {
        ResultRow row;
        row.estimator = name;
        row.n = n;
        row.rep = static_cast<long>(rep);
        if (!setup_failure.empty()) {
            row.lp_error = std::numeric_limits<double>::quiet_NaN();
            row.failure = setup_failure;
            rows.push_back(std::move(row));
            continue;
        }
        try {
            const auto start = std::chrono::steady_clock::now();
            // Estimators only see the Dataset; the truth record stays here.
            const auto est = fit_estimator(name, gen->data, *sp, cover, config);
            const auto stop = std::chrono::steady_clock::now();
            row.lp_error = lp_error(est, model, config.p, config.n_eval, eval_seed);
            row.phi_index = est.meta().phi_index;
            if (config.output_timing) row.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
            if (model.task == Task::classification) {
                const auto report = risk_report(plugin_classifier(est), model, config.n_eval, risk_seed);
                row.risk = report.empirical_risk;
                row.bayes_risk = report.bayes_risk;
                row.excess = report.excess;
            }
        } catch (const std::exception& e) {
            row.lp_error = std::numeric_limits<double>::quiet_NaN();
            row.phi_index.reset();
            row.failure = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<double> finite(const std::vector<double>& v) {
    std::vector<double> out;
    for (double x : v) {
        if (std::isfinite(x)) out.push_back(x);
    }
    return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto model = make_model(config.model);
    ExperimentResult result;
    result.classification = model.task == Task::classification;

    std::vector<PhiCover> covers;
    for (auto n : config.n_grid) covers.push_back(make_cover(config, n, model.bound));

    std::vector<Cell> cells;
    for (std::size_t k = 0; k < config.n_grid.size(); ++k) {
        for (std::size_t r = 0; r < config.replications; ++r) cells.push_back({k, r});
    }
    std::vector<std::vector<ResultRow>> slots(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t c = next++; c < cells.size(); c = next++) {
            const auto& cell = cells[c];
            slots[c] = run_cell(config, model, covers[cell.n_index], config.n_grid[cell.n_index], cell.rep);
        }
    };
    const std::size_t threads = std::min(config.threads, cells.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    // Fixed order: estimator (config order), then n, then replication.
    for (const auto& name : config.estimators) {
        for (std::size_t k = 0; k < config.n_grid.size(); ++k) {
            Aggregate agg;
            agg.estimator = name;
            agg.n = config.n_grid[k];
            std::vector<double> errors, runtimes, risks, excesses;
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (cells[c].n_index != k) continue;
                for (const auto& row : slots[c]) {
                    if (row.estimator != name) continue;
                    result.rows.push_back(row);
                    if (!row.failure.empty() || !std::isfinite(row.lp_error)) {
                        ++agg.failures;
                        continue;
                    }
                    errors.push_back(row.lp_error);
                    runtimes.push_back(row.runtime_ms);
                    if (row.risk) {
                        risks.push_back(*row.risk);
                        excesses.push_back(*row.excess);
                        agg.bayes_risk = row.bayes_risk;
                    }
                }
            }
            agg.count = errors.size();
            agg.median = median(errors);
            agg.iqr = iqr(errors);
            agg.median_runtime_ms = runtimes.empty() ? 0.0 : median(runtimes);
            if (!risks.empty()) {
                agg.median_risk = median(risks);
                agg.median_excess = median(finite(excesses));
            }
            result.aggregates.push_back(agg);
        }
        std::vector<std::pair<double, double>> points;
        for (const auto& a : result.aggregates) {
            if (a.estimator == name && a.count > 0 && a.median > 0.0) points.emplace_back(a.n, a.median);
        }
        if (points.size() >= 3) result.rates.push_back({name, rate_fit(points)});
    }
    return result;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

void write_results_csv(const ExperimentResult& result, std::ostream& out) {
    out << "estimator,n,rep,lp_error,phi_index,runtime_ms";
    if (result.classification) out << ",risk,bayes_risk,excess";
    out << '\n';
    for (const auto& r : result.rows) {
        out << r.estimator << ',' << r.n << ',' << r.rep << ',' << format_double(r.lp_error) << ','
            << (r.phi_index ? std::to_string(*r.phi_index) : std::string()) << ',' << format_double(r.runtime_ms);
        if (result.classification) out << ',' << opt(r.risk) << ',' << opt(r.bayes_risk) << ',' << opt(r.excess);
        out << '\n';
    }
    for (const auto& a : result.aggregates) {
        out << a.estimator << ',' << a.n << ",-1," << format_double(a.median) << ",," << format_double(a.median_runtime_ms);
        if (result.classification) out << ',' << opt(a.median_risk) << ',' << opt(a.bayes_risk) << ',' << opt(a.median_excess);
        out << '\n';
    }
}

void write_results_csv(const ExperimentResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    write_results_csv(result, out);
}

void write_risk_table(const SelectionResult& selection, const PhiCover& cover, std::ostream& out,
                      const std::string& variant) {
    out << "phi_index,gamma_or_tag,risk";
    if (!variant.empty()) out << ",variant";
    out << '\n';
    for (std::size_t i = 0; i < selection.risks.size(); ++i) {
        out << i << ',' << cover[i].tag() << ',' << format_double(selection.risks[i]);
        if (!variant.empty()) out << ',' << variant;
        out << '\n';
    }
}

}  // namespace nmar

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nmar/config.hpp"
#include "nmar/cover.hpp"
#include "nmar/data.hpp"
#include "nmar/models.hpp"
#include "nmar/plugin.hpp"
#include "nmar/selection.hpp"
#include "nmar/stats.hpp"

namespace nmar {

/// Monte Carlo estimate of the integral of |f - m_true|^p over the covariate law,
/// from n_eval fresh draws (n_eval >= 1000).
double lp_error(const PointFunction& f, const SyntheticModel& model, double p, std::size_t n_eval, std::uint64_t seed);
double lp_error(const RegressionEstimate& estimate, const SyntheticModel& model, double p, std::size_t n_eval,
                std::uint64_t seed);

/// OLS of log(error) on log(n). Needs >= 3 points with positive errors.
LineFit rate_fit(std::span<const std::pair<double, double>> points);

struct ResultRow {
    std::string estimator;
    std::size_t n = 0;
    long rep = 0;
    double lp_error = 0.0;
    std::optional<std::size_t> phi_index;
    double runtime_ms = 0.0;
    std::optional<double> risk;
    std::optional<double> bayes_risk;
    std::optional<double> excess;
    std::string failure;
};

struct Aggregate {
    std::string estimator;
    std::size_t n = 0;
    double median = 0.0;
    double iqr = 0.0;
    std::size_t count = 0;
    std::size_t failures = 0;
    double median_runtime_ms = 0.0;
    std::optional<double> median_risk;
    std::optional<double> bayes_risk;
    std::optional<double> median_excess;
};

struct RateFit {
    std::string estimator;
    LineFit fit;
};

struct ExperimentResult {
    bool classification = false;
    std::vector<ResultRow> rows;
    std::vector<Aggregate> aggregates;
    std::vector<RateFit> rates;

    const Aggregate* find(std::string_view estimator, std::size_t n) const;
};

/// Cover for sample size n (epsilon from the configured schedule).
PhiCover make_cover(const ExperimentConfig& config, std::size_t n, double L);
Smoothers make_smoothers(const ExperimentConfig& config, std::size_t n);

/// Fits one named estimator. `cover` is only read by the selecting estimators.
RegressionEstimate fit_estimator(const std::string& name, const Dataset& data, const DataSplit& split,
                                 const PhiCover& cover, const ExperimentConfig& config);

/// Every (estimator, n, replication) cell: generate, split, fit, evaluate. Cells are
/// seeded from (seed, n, rep) alone, so results do not depend on `threads`.
/// A failing cell becomes a row with NaN error and the message in `failure`.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// `estimator,n,rep,lp_error,phi_index,runtime_ms` (+ `risk,bayes_risk,excess` for
/// classification); aggregate medians follow with rep = -1.
void write_results_csv(const ExperimentResult& result, std::ostream& out);
void write_results_csv(const ExperimentResult& result, const std::filesystem::path& path);

/// `phi_index,gamma_or_tag,risk` (+ `variant` when given).
void write_risk_table(const SelectionResult& selection, const PhiCover& cover, std::ostream& out,
                      const std::string& variant = "");

/// Static SVG: median error against n on log-log axes, one series per estimator
/// with its fitted line.
void write_rate_plot(const ExperimentResult& result, const std::filesystem::path& path);

}  // namespace nmar

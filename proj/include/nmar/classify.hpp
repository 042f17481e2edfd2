#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nmar/models.hpp"
#include "nmar/plugin.hpp"
#include "nmar/population.hpp"

namespace nmar {

/// 1 iff m > 1/2; ties and NaN give 0.
int plugin_classify(double m_value);

class Classifier {
public:
    Classifier(std::function<int(std::span<const double>)> rule, std::string source);

    int operator()(std::span<const double> x) const;
    const std::string& source() const { return source_; }

private:
    std::function<int(std::span<const double>)> rule_;
    std::string source_;
};

Classifier plugin_classifier(const RegressionEstimate& estimate);

/// 1 iff m_true(x) > 1/2. Throws ModelError for a regression model.
int bayes_oracle(const SyntheticModel& model, std::span<const double> x);
Classifier bayes_classifier(const SyntheticModel& model);

/// E[min(m, 1 - m)]: the model's closed form when present, else midpoint
/// quadrature with 10^6 nodes (d <= 2) or a fixed-seed Monte Carlo average.
double bayes_risk(const SyntheticModel& model);

struct RiskReport {
    double empirical_risk = 0.0;
    double bayes_risk = 0.0;
    double excess = 0.0;
    std::size_t n_eval = 0;
    /// Binomial standard deviation of empirical_risk.
    double sigma = 0.0;
};

/// Misclassification rate on n_eval fresh labelled draws (n_eval >= 1000).
RiskReport risk_report(const Classifier& classifier, const SyntheticModel& model, std::size_t n_eval,
                       std::uint64_t seed);

struct MarginDiagnostic {
    std::vector<double> t;
    std::vector<double> probability;  // P(0 < |m(X) - 1/2| <= t)
    std::optional<double> exponent;   // slope of log P on log t
    std::optional<double> intercept;
};

/// Throws ConfigError for t outside (0, 1/2] and ModelError for regression models.
MarginDiagnostic margin_diagnostic(const SyntheticModel& model, std::span<const double> t_values);

/// P(rule(X) != Y) under a discrete joint (Y in {0, 1}).
double misclassification(const DiscreteJoint& joint, const std::function<int(std::span<const double>)>& rule);

}  // namespace nmar

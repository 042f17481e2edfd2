#include "nmar/classify.hpp"

#include <cmath>

#include "nmar/errors.hpp"
#include "nmar/rng.hpp"
#include "nmar/stats.hpp"

namespace nmar {

namespace {

void require_classification(const SyntheticModel& model) {
    if (model.task != Task::classification) throw ModelError("model '" + model.name + "' is not a classification model");
}

/// Average of f over the covariate law: midpoint rule for d <= 2, Monte Carlo otherwise.
double integrate(const SyntheticModel& model, const std::function<double(std::span<const double>)>& f) {
    const auto& box = model.covariates;
    const std::size_t d = box.dim();
    std::vector<double> x(d);
    double total = 0.0;
    if (d == 1) {
        const std::size_t n = 1000000;
        for (std::size_t i = 0; i < n; ++i) {
            x[0] = box.lo[0] + (box.hi[0] - box.lo[0]) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
            total += f(x);
        }
        return total / static_cast<double>(n);
    }
    if (d == 2) {
        const std::size_t n = 1000;
        for (std::size_t i = 0; i < n; ++i) {
            x[0] = box.lo[0] + (box.hi[0] - box.lo[0]) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
            for (std::size_t j = 0; j < n; ++j) {
                x[1] = box.lo[1] + (box.hi[1] - box.lo[1]) * (static_cast<double>(j) + 0.5) / static_cast<double>(n);
                total += f(x);
            }
        }
        return total / static_cast<double>(n * n);
    }
    auto rng = make_rng(0x9e3779b97f4a7c15ULL, {d});
    const std::size_t n = 1000000;
    for (std::size_t i = 0; i < n; ++i) total += f(box.sample(rng));
    return total / static_cast<double>(n);
}

}  // namespace

int plugin_classify(double m_value) { return m_value > 0.5 ? 1 : 0; }

Classifier::Classifier(std::function<int(std::span<const double>)> rule, std::string source)
    : rule_(std::move(rule)), source_(std::move(source)) {}

int Classifier::operator()(std::span<const double> x) const { return rule_(x) == 1 ? 1 : 0; }

Classifier plugin_classifier(const RegressionEstimate& estimate) {
    return Classifier([estimate](std::span<const double> x) { return plugin_classify(estimate(x)); },
                      "plugin:" + estimate.meta().kind);
}

int bayes_oracle(const SyntheticModel& model, std::span<const double> x) {
    require_classification(model);
    return plugin_classify(model.m_true(x));
}

Classifier bayes_classifier(const SyntheticModel& model) {
    require_classification(model);
    return Classifier([model](std::span<const double> x) { return bayes_oracle(model, x); }, "bayes_oracle");
}

double bayes_risk(const SyntheticModel& model) {
    require_classification(model);
    if (model.bayes_risk) return *model.bayes_risk;
    return integrate(model, [&](std::span<const double> x) {
        const double m = model.m_true(x);
        return std::min(m, 1.0 - m);
    });
}

RiskReport risk_report(const Classifier& classifier, const SyntheticModel& model, std::size_t n_eval,
                       std::uint64_t seed) {
    require_classification(model);
    if (n_eval < 1000) throw ConfigError("risk evaluation needs n_eval >= 1000");
    auto rng = make_rng(seed, {0xc1a55});
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t errors = 0;
    for (std::size_t i = 0; i < n_eval; ++i) {
        const auto x = model.covariates.sample(rng);
        const int y = u(rng) < model.m_true(x) ? 1 : 0;
        if (classifier(x) != y) ++errors;
    }
    RiskReport r;
    r.n_eval = n_eval;
    r.empirical_risk = static_cast<double>(errors) / static_cast<double>(n_eval);
    r.bayes_risk = bayes_risk(model);
    r.excess = r.empirical_risk - r.bayes_risk;
    r.sigma = std::sqrt(r.bayes_risk * (1.0 - r.bayes_risk) / static_cast<double>(n_eval));
    return r;
}

MarginDiagnostic margin_diagnostic(const SyntheticModel& model, std::span<const double> t_values) {
    require_classification(model);
    MarginDiagnostic out;
    for (double t : t_values) {
        if (!(t > 0.0 && t <= 0.5)) throw ConfigError("margin levels must lie in (0, 1/2]");
        out.t.push_back(t);
        out.probability.push_back(integrate(model, [&](std::span<const double> x) {
            const double gap = std::abs(model.m_true(x) - 0.5);
            return gap > 0.0 && gap <= t ? 1.0 : 0.0;
        }));
    }
    bool positive = out.t.size() >= 2;
    for (double p : out.probability) positive = positive && p > 0.0;
    if (positive) {
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < out.t.size(); ++i) {
            lx.push_back(std::log(out.t[i]));
            ly.push_back(std::log(out.probability[i]));
        }
        const auto fit = ols(lx, ly);
        out.exponent = fit.slope;
        out.intercept = fit.intercept;
    }
    return out;
}

double misclassification(const DiscreteJoint& joint, const std::function<int(std::span<const double>)>& rule) {
    double p = 0.0;
    for (const auto& a : joint.atoms()) {
        if (static_cast<double>(rule(a.x)) != a.y) p += a.probability;
    }
    return p;
}

}  // namespace nmar

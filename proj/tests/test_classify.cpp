#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nmar/classify.hpp"
#include "nmar/errors.hpp"
#include "nmar/models.hpp"
#include "nmar/population.hpp"

using namespace nmar;

namespace {

SyntheticModel classification(const std::string& name, double level = 0.5) {
    ModelParams p;
    p.name = name;
    p.level = level;
    return make_model(p);
}

std::vector<double> pt(double v) { return {v}; }

}  // namespace

TEST(PluginClassify, Threshold) {
    EXPECT_EQ(plugin_classify(0.7), 1);
    EXPECT_EQ(plugin_classify(0.5), 0);
    EXPECT_EQ(plugin_classify(0.3), 0);
    EXPECT_EQ(plugin_classify(std::nan("")), 0);
    EXPECT_EQ(plugin_classify(std::nextafter(0.5, 1.0)), 1);
}

TEST(BayesOracle, Examples) {
    EXPECT_EQ(bayes_oracle(classification("classification_constant", 0.9), pt(0.2)), 1);
    const auto tie = classification("classification_constant", 0.5);
    for (double x : {0.0, 0.3, 0.99}) EXPECT_EQ(bayes_oracle(tie, pt(x)), 0);
    const auto lin = classification("classification_linear");
    EXPECT_EQ(bayes_oracle(lin, pt(0.7)), 1);
    EXPECT_EQ(bayes_oracle(lin, pt(0.5)), 0);
    EXPECT_THROW(bayes_oracle(make_model(ModelParams{}), pt(0.1)), ModelError);
    EXPECT_THROW(bayes_classifier(make_model(ModelParams{})), ModelError);
    EXPECT_EQ(bayes_classifier(lin).source(), "bayes_oracle");
}

TEST(BayesRisk, ClosedFormsAgreeWithQuadrature) {
    auto lin = classification("classification_linear");
    EXPECT_EQ(bayes_risk(lin), 0.25);
    lin.bayes_risk.reset();
    EXPECT_NEAR(bayes_risk(lin), 0.25, 1e-9);
    auto cub = classification("classification_cubic");
    EXPECT_EQ(bayes_risk(cub), 0.375);
    cub.bayes_risk.reset();
    EXPECT_NEAR(bayes_risk(cub), 0.375, 1e-9);
}

TEST(RiskReport, BayesRuleHasNoExcess) {
    const auto lin = classification("classification_linear");
    const auto r = risk_report(bayes_classifier(lin), lin, 200000, 3);
    EXPECT_NEAR(r.excess, 0.0, 3.0 * r.sigma);
    EXPECT_DOUBLE_EQ(r.excess, r.empirical_risk - r.bayes_risk);
    EXPECT_EQ(r.n_eval, 200000u);
    EXPECT_THROW(risk_report(bayes_classifier(lin), lin, 999, 3), ConfigError);
}

TEST(RiskReport, ConstantRuleOnFairCoin) {
    const auto coin = classification("classification_constant", 0.5);
    const Classifier zero([](std::span<const double>) { return 0; }, "zero");
    const auto r = risk_report(zero, coin, 100000, 4);
    EXPECT_NEAR(r.empirical_risk, 0.5, 3.0 * std::sqrt(0.25 / 100000));
}

TEST(RiskReport, ExcessNeverMeaningfullyNegative) {
    const auto lin = classification("classification_linear");
    for (double c : {0.1, 0.3, 0.45, 0.5, 0.55, 0.8}) {
        const Classifier rule([c](std::span<const double> x) { return x[0] > c ? 1 : 0; }, "threshold");
        const auto r = risk_report(rule, lin, 50000, 5);
        EXPECT_GE(r.excess, -3.0 * r.sigma) << c;
        // Analytic risk of a threshold c: 1/4 + (c - 1/2)^2.
        EXPECT_NEAR(r.empirical_risk, 0.25 + (c - 0.5) * (c - 0.5), 4.0 * std::sqrt(0.25 / 50000));
    }
}

TEST(Margin, BoundedAwayFromHalf) {
    const std::vector<double> t{0.05, 0.1, 0.2, 0.3, 0.39};
    const auto m = margin_diagnostic(classification("classification_constant", 0.9), t);
    for (double p : m.probability) EXPECT_EQ(p, 0.0);
    EXPECT_FALSE(m.exponent.has_value());
}

TEST(Margin, LinearModelIsTwoT) {
    const std::vector<double> t{0.02, 0.05, 0.1, 0.2, 0.4};
    const auto m = margin_diagnostic(classification("classification_linear"), t);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(m.probability[i], 2.0 * t[i], 1e-5);
    ASSERT_TRUE(m.exponent.has_value());
    EXPECT_NEAR(*m.exponent, 1.0, 1e-3);
}

TEST(Margin, CubicModelHasExponentOneThird) {
    const std::vector<double> t{0.005, 0.01, 0.05, 0.1, 0.2};
    const auto m = margin_diagnostic(classification("classification_cubic"), t);
    for (std::size_t i = 0; i < t.size(); ++i) {
        // |4 (x - 1/2)^3| <= t  iff  |x - 1/2| <= (t/4)^{1/3}.
        EXPECT_NEAR(m.probability[i], 2.0 * std::cbrt(t[i] / 4.0), 1e-5);
    }
    ASSERT_TRUE(m.exponent.has_value());
    EXPECT_NEAR(*m.exponent, 1.0 / 3.0, 1e-3);
    EXPECT_THROW(margin_diagnostic(classification("classification_cubic"), std::vector<double>{0.6}), ConfigError);
}

TEST(PluginBound, ExcessAtMostTwiceL1OnJoints) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        std::vector<Atom> atoms;
        std::vector<double> m(4), mhat(4), px(4);
        double total = 0.0;
        for (int loc = 0; loc < 4; ++loc) {
            m[loc] = u(rng);
            mhat[loc] = u(rng);
            px[loc] = 0.05 + u(rng);
            total += px[loc];
        }
        for (int loc = 0; loc < 4; ++loc) {
            px[loc] /= total;
            atoms.push_back({{static_cast<double>(loc)}, 1.0, px[loc] * m[loc]});
            atoms.push_back({{static_cast<double>(loc)}, 0.0, px[loc] * (1.0 - m[loc])});
        }
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < atoms.size(); ++i) s += atoms[i].probability;
        atoms.back().probability = 1.0 - s;
        const DiscreteJoint joint(atoms, 1.0, {0}, [](std::span<const double>) { return 0.0; },
                                  [](double) { return 1.0; });
        const auto idx = [](std::span<const double> x) { return static_cast<std::size_t>(x[0]); };
        const double lhat = misclassification(joint, [&](std::span<const double> x) { return plugin_classify(mhat[idx(x)]); });
        const double lbayes = misclassification(joint, [&](std::span<const double> x) { return plugin_classify(m[idx(x)]); });
        double l1 = 0.0;
        for (int loc = 0; loc < 4; ++loc) l1 += px[loc] * std::abs(mhat[loc] - m[loc]);
        EXPECT_GE(lhat - lbayes, -1e-15);
        EXPECT_LE(lhat - lbayes, 2.0 * l1 + 1e-15);
    }
}

TEST(PluginClassifier, ThresholdPreservingMapsGiveSameRule) {
    const RegressionEstimate base([](std::span<const double> x) { return std::sin(6.0 * x[0]) * 0.4 + 0.5; }, 1.0,
                                  EstimateMeta{"toy"});
    const auto c0 = plugin_classifier(base);
    EXPECT_EQ(c0.source(), "plugin:toy");
    for (double a : {0.25, 0.5, 1.0}) {
        const RegressionEstimate mapped(
            [a](std::span<const double> x) { return a * (std::sin(6.0 * x[0]) * 0.4) + 0.5; }, 1.0,
            EstimateMeta{"mapped"});
        const auto c1 = plugin_classifier(mapped);
        for (int i = 0; i <= 1000; ++i) {
            const auto x = pt(i / 1000.0);
            EXPECT_EQ(c0(x), c1(x));
        }
    }
}

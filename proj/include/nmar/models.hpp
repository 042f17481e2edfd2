#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nmar/data.hpp"

namespace nmar {

enum class Task { regression, classification };

/// Uniform law on an axis-aligned box; the default covariate law is [0,1]^d.
struct UniformBox {
    std::vector<double> lo;
    std::vector<double> hi;

    static UniformBox unit(std::size_t d) { return {std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)}; }
    std::size_t dim() const { return lo.size(); }
    std::vector<double> sample(std::mt19937_64& rng) const;
    double volume() const;
};

using PointFunction = std::function<double(std::span<const double>)>;

/// A fully specified joint law of (X, Y, Delta):
///   X ~ covariates, Y = m_true(X) + U[-a, a] (regression) or Y ~ Bernoulli(m_true(X))
///   (classification), and P(Delta = 1 | X, Y) = 1 / (1 + exp(g(Z)) * phi_star(Y)).
/// `g_true` receives only the Z coordinates, so the selection probability can never
/// depend on the remaining covariates.
///
/// The declared bounds (m_lo, m_hi, g_max, phi_max) must be valid suprema; they give
/// the analytic pi_min checked by validate().
struct SyntheticModel {
    std::string name;
    std::size_t d = 1;
    std::vector<std::size_t> z_coords{0};
    double bound = 1.0;
    Task task = Task::regression;
    PointFunction m_true;
    PointFunction g_true;
    std::function<double(double)> phi_star;
    double noise_halfwidth = 0.0;
    double m_lo = 0.0;
    double m_hi = 0.0;
    double g_max = 0.0;
    double phi_max = 1.0;
    UniformBox covariates = UniformBox::unit(1);
    std::optional<double> bayes_risk;

    double pi_min() const;
    /// Throws ModelError if pi_min <= 0, responses can leave [-L, L], or the
    /// structural fields are inconsistent.
    void validate() const;
    double selection_probability(std::span<const double> x, double y) const;
    double regression(std::span<const double> x) const { return m_true(x); }
};

/// Hidden per-row truth, kept apart from the Dataset handed to estimators.
struct TruthRecord {
    std::vector<double> y;
    std::vector<double> pi;
};

struct Generated {
    Dataset data;
    TruthRecord truth;
};

/// n independent draws from the model; the response is hidden wherever Delta = 0.
Generated generate(const SyntheticModel& model, std::size_t n, std::uint64_t seed);

/// Parameters of the shipped model presets.
///
///   nmar_sine              m(x) = amplitude * sin(2 pi mean(x)), phi*(y) = exp(gamma y)
///   mar_sine               as nmar_sine with gamma = 0
///   full_observation       as nmar_sine but every response observed
///   classification_linear  m(x) = mean(x) (Bayes risk 1/4 when d = 1)
///   classification_cubic   m(x) = 1/2 + 4 (mean(x) - 1/2)^3 (Bayes risk 3/8 when d = 1)
///   classification_constant m(x) = level
///
/// In every preset g(z) = g_slope * (mean(z) - g_shift) on the unit box.
struct ModelParams {
    std::string name = "nmar_sine";
    std::size_t d = 1;
    std::vector<std::size_t> z_coords{0};
    double amplitude = 0.3;
    double noise = 0.7;
    double gamma = 1.0;
    double g_slope = 1.0;
    double g_shift = 0.5;
    double level = 0.5;
};

SyntheticModel make_model(const ModelParams& params);

}  // namespace nmar

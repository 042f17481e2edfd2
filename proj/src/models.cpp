#include "nmar/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>

#include "nmar/errors.hpp"
#include "nmar/rng.hpp"

namespace nmar {

std::vector<double> UniformBox::sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(lo.size());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = lo[k] + (hi[k] - lo[k]) * u(rng);
    return x;
}

double UniformBox::volume() const {
    double v = 1.0;
    for (std::size_t k = 0; k < lo.size(); ++k) v *= hi[k] - lo[k];
    return v;
}

double SyntheticModel::pi_min() const {
    const double odds = std::exp(g_max) * phi_max;
    if (std::isnan(odds)) return 0.0;
    return 1.0 / (1.0 + odds);
}

void SyntheticModel::validate() const {
    if (d == 0 || covariates.dim() != d) throw ModelError("model '" + name + "': covariate box dimension mismatch");
    if (z_coords.empty()) throw ModelError("model '" + name + "': z_coords must be nonempty");
    for (auto c : z_coords) {
        if (c >= d) throw ModelError("model '" + name + "': z coordinate out of range");
    }
    if (!m_true || !g_true || !phi_star) throw ModelError("model '" + name + "': missing component function");
    if (!(bound > 0.0)) throw ModelError("model '" + name + "': L must be positive");
    if (!(pi_min() > 0.0)) throw ModelError("model '" + name + "': selection probability not bounded away from 0");
    if (task == Task::regression) {
        if (!(noise_halfwidth > 0.0)) throw ModelError("model '" + name + "': noise half-width must be positive");
        if (m_lo - noise_halfwidth < -bound || m_hi + noise_halfwidth > bound) {
            throw ModelError("model '" + name + "': m range plus noise exceeds [-L, L]");
        }
    } else {
        if (m_lo < 0.0 || m_hi > 1.0) throw ModelError("model '" + name + "': class probability outside [0,1]");
        if (bound < 1.0) throw ModelError("model '" + name + "': classification requires L >= 1");
    }
}

double SyntheticModel::selection_probability(std::span<const double> x, double y) const {
    const auto z = project(x, z_coords);
    return 1.0 / (1.0 + std::exp(g_true(z)) * phi_star(y));
}

Generated generate(const SyntheticModel& model, std::size_t n, std::uint64_t seed) {
    model.validate();
    if (n == 0) throw ConfigError("sample size must be positive");
    auto rng = make_rng(seed, {0x6e6e});
    std::uniform_real_distribution<double> u(0.0, 1.0);

    std::vector<Observation> obs;
    obs.reserve(n);
    TruthRecord truth;
    truth.y.reserve(n);
    truth.pi.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Observation o;
        o.x = model.covariates.sample(rng);
        const double m = model.m_true(o.x);
        double y = 0.0;
        if (model.task == Task::regression) {
            y = m + model.noise_halfwidth * (2.0 * u(rng) - 1.0);
            y = std::clamp(y, -model.bound, model.bound);
        } else {
            y = u(rng) < m ? 1.0 : 0.0;
        }
        const double pi = model.selection_probability(o.x, y);
        if (u(rng) < pi) o.y = y;
        truth.y.push_back(y);
        truth.pi.push_back(pi);
        obs.push_back(std::move(o));
    }
    return {Dataset(model.d, model.z_coords, model.bound, std::move(obs)), std::move(truth)};
}

namespace {

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void attach_selection(SyntheticModel& m, const ModelParams& p, double y_lo, double y_hi) {
    const double slope = p.g_slope;
    const double shift = p.g_shift;
    m.g_true = [slope, shift](std::span<const double> z) { return slope * (mean_of(z) - shift); };
    m.g_max = std::max(slope * (1.0 - shift), slope * (0.0 - shift));
    const double gamma = p.gamma;
    m.phi_star = [gamma](double y) { return std::exp(gamma * y); };
    m.phi_max = std::max(std::exp(gamma * y_lo), std::exp(gamma * y_hi));
}

}  // namespace

SyntheticModel make_model(const ModelParams& p) {
    SyntheticModel m;
    m.name = p.name;
    m.d = p.d;
    m.z_coords = p.z_coords;
    m.covariates = UniformBox::unit(p.d);
    m.bound = 1.0;

    if (p.name == "nmar_sine" || p.name == "mar_sine" || p.name == "full_observation") {
        const double amp = p.amplitude;
        m.task = Task::regression;
        m.m_true = [amp](std::span<const double> x) { return amp * std::sin(2.0 * std::numbers::pi * mean_of(x)); };
        m.m_lo = -std::abs(amp);
        m.m_hi = std::abs(amp);
        m.noise_halfwidth = p.noise;
        ModelParams q = p;
        if (p.name == "mar_sine") q.gamma = 0.0;
        attach_selection(m, q, m.m_lo - p.noise, m.m_hi + p.noise);
        if (p.name == "full_observation") {
            m.g_true = [](std::span<const double>) { return -std::numeric_limits<double>::infinity(); };
            m.g_max = -std::numeric_limits<double>::infinity();
        }
    } else if (p.name == "classification_linear" || p.name == "classification_cubic" ||
               p.name == "classification_constant") {
        m.task = Task::classification;
        m.noise_halfwidth = 0.0;
        if (p.name == "classification_linear") {
            m.m_true = [](std::span<const double> x) { return mean_of(x); };
            m.m_lo = 0.0;
            m.m_hi = 1.0;
            if (p.d == 1) m.bayes_risk = 0.25;
        } else if (p.name == "classification_cubic") {
            m.m_true = [](std::span<const double> x) {
                const double c = mean_of(x) - 0.5;
                return 0.5 + 4.0 * c * c * c;
            };
            m.m_lo = 0.0;
            m.m_hi = 1.0;
            if (p.d == 1) m.bayes_risk = 0.375;
        } else {
            const double level = p.level;
            m.m_true = [level](std::span<const double>) { return level; };
            m.m_lo = level;
            m.m_hi = level;
            m.bayes_risk = std::min(level, 1.0 - level);
        }
        attach_selection(m, p, 0.0, 1.0);
    } else {
        throw ConfigError("unknown model '" + p.name + "'");
    }
    m.validate();
    return m;
}

}  // namespace nmar

#include "nmar/plugin.hpp"

#include <algorithm>
#include <cmath>

#include "nmar/errors.hpp"

namespace nmar {

namespace {

thread_local std::vector<double> scratch;

void check_h(double h) {
    if (!(h > 0.0)) throw ConfigError("bandwidth must be positive");
}

void check_k(int k) {
    if (k != 1 && k != 2) throw ConfigError("functional order k must be 1 or 2");
}

std::shared_ptr<const RowColumns> share(const Dataset& data) {
    return std::make_shared<const RowColumns>(RowColumns::from(data));
}

}  // namespace

RegressionEstimate::RegressionEstimate(PointFunction raw, double bound, EstimateMeta meta)
    : raw_(std::move(raw)), bound_(bound), meta_(std::move(meta)) {}

double RegressionEstimate::operator()(std::span<const double> x) const {
    return std::clamp(raw_(x), -bound_, bound_);
}

double combine_representation(double eta1, double eta2, double num, double den, double L) {
    const double ratio = std::clamp(safe_ratio(num, den), -L, L);
    return std::clamp(eta1 + ratio * (1.0 - eta2), -L, L);
}

double nw_estimate(const RowColumns& rows, const KernelSpec& kernel, double h, std::span<const double> x) {
    check_h(h);
    weights_at(rows, Space::x, kernel, h, x, scratch);
    return safe_ratio(simd::dot(scratch, rows.delta_y), simd::dot(scratch, rows.delta));
}

double nw_estimate(const Dataset& data, const KernelSpec& kernel, double h, std::span<const double> x) {
    return nw_estimate(RowColumns::from(data), kernel, h, x);
}

double eta_hat(const RowColumns& rows, const KernelSpec& kernel, double h, std::span<const double> x, double t,
               int k) {
    check_h(h);
    check_k(k);
    weights_at(rows, Space::x, kernel, h, x, scratch);
    double num = 0.0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows.delta[j] == 0.0 || scratch[j] == 0.0) continue;
        const double base = k == 1 ? rows.y[j] : 1.0;
        num += scratch[j] * (base * std::exp(t * rows.y[j]));
    }
    return safe_ratio(num, simd::sum(scratch));
}

double eta_hat(const Dataset& data, const KernelSpec& kernel, double h, std::span<const double> x, double t, int k) {
    return eta_hat(RowColumns::from(data), kernel, h, x, t, k);
}

PhiColumns PhiColumns::from(const RowColumns& rows, const PhiFunction& phi) {
    PhiColumns c;
    c.delta_phi.assign(rows.size(), 0.0);
    c.delta_y_phi.assign(rows.size(), 0.0);
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows.delta[j] == 0.0) continue;
        const double p = phi(rows.y[j]);
        c.delta_phi[j] = p;
        c.delta_y_phi[j] = rows.y[j] * p;
    }
    return c;
}

Functionals functionals(const RowColumns& rows, const PhiColumns& cols, const KernelSpec& kernel, double h,
                        std::span<const double> x) {
    check_h(h);
    weights_at(rows, Space::x, kernel, h, x, scratch);
    Functionals f;
    f.total = simd::sum(scratch);
    f.observed = simd::dot(scratch, rows.delta);
    f.observed_y = simd::dot(scratch, rows.delta_y);
    f.phi = simd::dot(scratch, cols.delta_phi);
    f.phi_y = simd::dot(scratch, cols.delta_y_phi);
    return f;
}

namespace {

double evaluate(const Functionals& f, double L) {
    return combine_representation(safe_ratio(f.observed_y, f.total), safe_ratio(f.observed, f.total), f.phi_y,
                                  f.phi, L);
}

}  // namespace

double m_hat_gamma(const RowColumns& rows, const KernelSpec& kernel, double h, std::span<const double> x,
                   double gamma) {
    if (!std::isfinite(gamma)) throw ConfigError("gamma must be finite");
    return m_hat_m_phi(rows, kernel, h, x, PhiFunction::exp_gamma(gamma));
}

double m_hat_gamma(const Dataset& data, const KernelSpec& kernel, double h, std::span<const double> x, double gamma) {
    return m_hat_gamma(RowColumns::from(data), kernel, h, x, gamma);
}

double psi_hat_m(const RowColumns& train, const KernelSpec& kernel, double h, std::span<const double> x,
                 const PhiFunction& phi, int k) {
    check_k(k);
    const auto f = functionals(train, PhiColumns::from(train, phi), kernel, h, x);
    return safe_ratio(k == 1 ? f.phi_y : f.phi, f.total);
}

double eta_hat_m(const RowColumns& train, const KernelSpec& kernel, double h, std::span<const double> x, int k) {
    return eta_hat(train, kernel, h, x, 0.0, k);
}

double m_hat_m_phi(const RowColumns& train, const KernelSpec& kernel, double h, std::span<const double> x,
                   const PhiFunction& phi) {
    return evaluate(functionals(train, PhiColumns::from(train, phi), kernel, h, x), train.bound);
}

double m_hat_m_phi(const Dataset& data, std::span<const std::size_t> training, const KernelSpec& kernel, double h,
                   std::span<const double> x, const PhiFunction& phi) {
    return m_hat_m_phi(RowColumns::from(data, training), kernel, h, x, phi);
}

RegressionEstimate phi_estimate(std::shared_ptr<const RowColumns> train, const KernelSpec& kernel, double h,
                                const PhiFunction& phi) {
    check_h(h);
    auto cols = std::make_shared<const PhiColumns>(PhiColumns::from(*train, phi));
    const double L = train->bound;
    EstimateMeta meta;
    meta.kind = "m_hat_m_phi";
    meta.h = h;
    meta.phi_tag = phi.tag();
    return RegressionEstimate(
        [train, cols, kernel, h, L](std::span<const double> x) {
            return evaluate(functionals(*train, *cols, kernel, h, x), L);
        },
        L, std::move(meta));
}

RegressionEstimate plugin_gamma_estimate(const Dataset& data, const KernelSpec& kernel, double h, double gamma) {
    if (!std::isfinite(gamma)) throw ConfigError("gamma must be finite");
    auto est = phi_estimate(share(data), kernel, h, PhiFunction::exp_gamma(gamma));
    est.meta().kind = "plugin_gamma";
    return est;
}

RegressionEstimate complete_case_estimate(const Dataset& data, const KernelSpec& kernel, double h) {
    check_h(h);
    auto rows = share(data);
    EstimateMeta meta;
    meta.kind = "complete_case";
    meta.h = h;
    return RegressionEstimate([rows, kernel, h](std::span<const double> x) { return nw_estimate(*rows, kernel, h, x); },
                              data.bound(), std::move(meta));
}

RegressionEstimate nw_full_estimate(const Dataset& data, const KernelSpec& kernel, double h) {
    if (!data.fully_observed()) throw ModelError("nw_full needs every response observed");
    auto est = complete_case_estimate(data, kernel, h);
    est.meta().kind = "nw_full";
    return est;
}

}  // namespace nmar

#include "nmar/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nmar/errors.hpp"

namespace nmar {

std::size_t first_argmin(std::span<const double> values) {
    if (values.empty()) throw ConfigError("argmin of an empty list");
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::isnan(values[i])) continue;
        if (!found || values[i] < best_value) {
            best = i;
            best_value = values[i];
            found = true;
        }
    }
    return best;
}

double exp_g_from_sums(double total, double missing, double phi_sum) {
    if (!(total > 0.0)) return 0.0;
    const double num = missing / total;
    const double den = phi_sum / total;
    return num / std::max(den, kDenominatorFloor);
}

double pi_from_sums(PiKind kind, double total, double observed, double phi_sum, double phi_y, double pi0) {
    if (!(total > 0.0)) return 1.0;
    if (kind == PiKind::plug_in_step1) {
        return 1.0 / (1.0 + exp_g_from_sums(total, total - observed, phi_sum) * phi_y);
    }
    const double psi = phi_sum / total;
    const double eta = observed / total;
    const double den = kind == PiKind::loo_breve ? std::max(pi0, psi) : std::max(psi, kDenominatorFloor);
    return 1.0 / (1.0 + (1.0 - eta) / den * phi_y);
}

namespace {

thread_local std::vector<double> scratch;

void check_split(const Dataset& data, const DataSplit& split) {
    if (split.training.empty()) throw ConfigError("training set is empty");
    if (split.validation.empty()) throw ConfigError("validation set is empty");
    for (auto i : split.training) {
        if (i >= data.size()) throw ConfigError("split index out of range");
    }
    for (auto i : split.validation) {
        if (i >= data.size()) throw ConfigError("split index out of range");
    }
}

bool z_is_x(const Dataset& data) {
    const auto& zc = data.z_coords();
    if (zc.size() != data.dim()) return false;
    for (std::size_t k = 0; k < zc.size(); ++k) {
        if (zc[k] != k) return false;
    }
    return true;
}

}  // namespace

double estimate_exp_g(const RowColumns& train, const KernelSpec& H, double lambda, std::span<const double> z,
                      const PhiFunction& phi) {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    weights_at(train, Space::z, H, lambda, z, scratch);
    const auto cols = PhiColumns::from(train, phi);
    const double total = simd::sum(scratch);
    const double observed = simd::dot(scratch, train.delta);
    return exp_g_from_sums(total, total - observed, simd::dot(scratch, cols.delta_phi));
}

double pi_hat(const RowColumns& train, const KernelSpec& H, double lambda, std::span<const double> z, double y,
              const PhiFunction& phi) {
    return 1.0 / (1.0 + estimate_exp_g(train, H, lambda, z, phi) * phi(y));
}

double empirical_risk(const Dataset& data, const DataSplit& split, const Smoothers& sm, const PhiFunction& phi) {
    check_split(data, split);
    const auto train = RowColumns::from(data, split.training);
    const auto cols = PhiColumns::from(train, phi);
    const double L = data.bound();
    double risk = 0.0;
    for (auto i : split.validation) {
        const auto& o = data[i];
        if (!o.y) continue;
        const auto f = functionals(train, cols, sm.K, sm.h, o.x);
        const double m = combine_representation(safe_ratio(f.observed_y, f.total), safe_ratio(f.observed, f.total),
                                                f.phi_y, f.phi, L);
        const double pi = pi_hat(train, sm.H, sm.lambda, project(o.x, data.z_coords()), *o.y, phi);
        const double r = m - *o.y;
        risk += r * r / pi;
    }
    return risk / static_cast<double>(split.validation.size());
}

namespace {

constexpr std::size_t kChunk = 256;

}  // namespace

SelectionResult select_phi(const Dataset& data, const DataSplit& split, const PhiCover& cover, const Smoothers& sm) {
    check_split(data, split);
    if (!(sm.h > 0.0) || !(sm.lambda > 0.0)) throw ConfigError("bandwidths must be positive");
    const auto train = RowColumns::from(data, split.training);
    const auto valid = RowColumns::from(data, split.validation);
    const auto vobs = valid.observed_rows();
    const double L = data.bound();

    const auto nbK = Neighborhood::build(valid, vobs, train, Space::x, sm.K, sm.h);
    const bool shared = sm.K == sm.H && sm.h == sm.lambda && z_is_x(data);
    const auto nbH = shared ? Neighborhood{} : Neighborhood::build(valid, vobs, train, Space::z, sm.H, sm.lambda);
    const Neighborhood& hood = shared ? nbK : nbH;

    const auto& obs = nbK.observed_rows();
    std::vector<double> yc(obs.size());
    for (std::size_t c = 0; c < obs.size(); ++c) yc[c] = train.y[obs[c]];

    std::vector<double> risks(cover.size(), 0.0);
    std::vector<double> tab_phi, tab_phi_y, A, B, D;
    for (std::size_t f0 = 0; f0 < cover.size(); f0 += kChunk) {
        const std::size_t w = std::min(kChunk, cover.size() - f0);
        tab_phi.assign(obs.size() * w, 0.0);
        tab_phi_y.assign(obs.size() * w, 0.0);
        for (std::size_t c = 0; c < obs.size(); ++c) {
            for (std::size_t f = 0; f < w; ++f) {
                const double p = cover[f0 + f](yc[c]);
                tab_phi[c * w + f] = p;
                tab_phi_y[c * w + f] = yc[c] * p;
            }
        }
        nbK.accumulate_all(tab_phi_y, w, A);
        nbK.accumulate_all(tab_phi, w, B);
        if (!shared) nbH.accumulate_all(tab_phi, w, D);
        const auto& den = shared ? B : D;
        for (std::size_t q = 0; q < vobs.size(); ++q) {
            const auto& sk = nbK.sums(q);
            const auto& sh = hood.sums(q);
            const double eta1 = safe_ratio(sk.observed_y, sk.total);
            const double eta2 = safe_ratio(sk.observed, sk.total);
            const double yi = valid.y[vobs[q]];
            const std::size_t base = q * w;
            for (std::size_t f = 0; f < w; ++f) {
                const double m = combine_representation(eta1, eta2, A[base + f], B[base + f], L);
                const double pi =
                    pi_from_sums(PiKind::plug_in_step1, sh.total, sh.observed, den[base + f], cover[f0 + f](yi), 0.0);
                const double r = m - yi;
                risks[f0 + f] += r * r / pi;
            }
        }
    }
    for (auto& r : risks) r /= static_cast<double>(valid.size());

    SelectionResult result;
    result.chosen_index = first_argmin(risks);
    result.chosen_phi = cover[result.chosen_index];
    result.risks = std::move(risks);
    return result;
}

RegressionEstimate fit(const Dataset& data, const DataSplit& split, const PhiCover& cover, const Smoothers& sm,
                       SelectionResult* selection) {
    auto sel = select_phi(data, split, cover, sm);
    auto train = std::make_shared<const RowColumns>(RowColumns::from(data, split.training));
    auto est = phi_estimate(train, sm.K, sm.h, sel.chosen_phi);
    auto& meta = est.meta();
    meta.kind = "select_phi";
    meta.lambda = sm.lambda;
    meta.phi_index = sel.chosen_index;
    meta.risks = sel.risks;
    if (selection) *selection = std::move(sel);
    return est;
}

SelectionProbabilityModel::SelectionProbabilityModel(PiKind kind, std::shared_ptr<const RowColumns> train,
                                                     KernelSpec H, double bandwidth, PhiFunction phi, double pi0)
    : kind_(kind), train_(std::move(train)), H_(H), bandwidth_(bandwidth), phi_(std::move(phi)), pi0_(pi0),
      cols_(PhiColumns::from(*train_, phi_)) {
    if (!(bandwidth_ > 0.0)) throw ConfigError("selection-probability bandwidth must be positive");
    if (!(pi0_ > 0.0)) throw ConfigError("pi0 must be positive");
}

double SelectionProbabilityModel::at(std::span<const double> z, double y) const {
    weights_at(*train_, Space::z, H_, bandwidth_, z, scratch);
    return pi_from_sums(kind_, simd::sum(scratch), simd::dot(scratch, train_->delta),
                        simd::dot(scratch, cols_.delta_phi), phi_(y), pi0_);
}

double SelectionProbabilityModel::at_training(std::size_t i) const {
    if (i >= train_->size() || train_->delta[i] == 0.0) throw ConfigError("training row must be observed");
    const auto z = train_->z_point(i);
    if (kind_ == PiKind::plug_in_step1) return at(z, train_->y[i]);
    weights_at(*train_, Space::z, H_, bandwidth_, z, scratch);
    scratch[i] = 0.0;
    return pi_from_sums(kind_, simd::sum(scratch), simd::dot(scratch, train_->delta),
                        simd::dot(scratch, cols_.delta_phi), phi_(train_->y[i]), pi0_);
}

}  // namespace nmar

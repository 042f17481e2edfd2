#include "nmar/ht.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nmar/errors.hpp"

namespace nmar {

namespace {

thread_local std::vector<double> scratch;

constexpr std::size_t kChunk = 256;

}  // namespace

void HTConfig::validate() const {
    if (variant != PiKind::loo_tilde && variant != PiKind::loo_breve) {
        throw ConfigError("HT variant must be tilde or breve");
    }
    if (!(pi0 > 0.0)) throw ConfigError("pi0 must be positive");
    if (!(smoothers.h > 0.0) || !(pi_bandwidth() > 0.0)) throw ConfigError("bandwidths must be positive");
}

LooFunctionals loo_functionals(const RowColumns& train, const KernelSpec& H, double h, std::size_t i,
                               const PhiFunction& phi) {
    if (train.size() < 2) throw ConfigError("leave-one-out needs at least two training rows");
    if (i >= train.size()) throw ConfigError("training row out of range");
    weights_at(train, Space::z, H, h, train.z_point(i), scratch);
    scratch[i] = 0.0;
    const auto cols = PhiColumns::from(train, phi);
    LooFunctionals f;
    f.mass = simd::sum(scratch);
    f.psi_tilde = safe_ratio(simd::dot(scratch, cols.delta_phi), f.mass);
    f.eta_tilde = safe_ratio(simd::dot(scratch, train.delta), f.mass);
    return f;
}

namespace {

double loo_pi(PiKind kind, const RowColumns& train, const KernelSpec& H, double h, std::size_t i,
              const PhiFunction& phi, double pi0) {
    const auto f = loo_functionals(train, H, h, i, phi);
    if (!(f.mass > 0.0)) return 1.0;
    const double den = kind == PiKind::loo_breve ? std::max(pi0, f.psi_tilde) : std::max(f.psi_tilde, kDenominatorFloor);
    return 1.0 / (1.0 + (1.0 - f.eta_tilde) / den * phi(train.y[i]));
}

}  // namespace

double pi_tilde(const RowColumns& train, const KernelSpec& H, double h, std::size_t i, const PhiFunction& phi) {
    return loo_pi(PiKind::loo_tilde, train, H, h, i, phi, 0.0);
}

double pi_breve(const RowColumns& train, const KernelSpec& H, double h, std::size_t i, const PhiFunction& phi,
                double pi0) {
    if (!(pi0 > 0.0)) throw ConfigError("pi0 must be positive");
    return loo_pi(PiKind::loo_breve, train, H, h, i, phi, pi0);
}

double ht_raw_bound(PiKind variant, double pi0, double L) {
    return L / (variant == PiKind::loo_breve ? pi0 : kDenominatorFloor);
}

double ht_m_hat(const RowColumns& train, const KernelSpec& K, double h, std::span<const double> x,
                const SelectionProbabilityModel& pi) {
    if (!(h > 0.0)) throw ConfigError("bandwidth must be positive");
    std::vector<double> w;
    weights_at(train, Space::x, K, h, x, w);
    double num = 0.0;
    for (std::size_t i = 0; i < train.size(); ++i) {
        if (w[i] == 0.0 || train.delta[i] == 0.0) continue;
        num += w[i] * (train.y[i] / pi.at_training(i));
    }
    const double cap = ht_raw_bound(pi.kind(), pi.pi0(), train.bound);
    return std::clamp(safe_ratio(num, simd::sum(w)), -cap, cap);
}

std::vector<double> ht_validation_pi(const Dataset& data, const DataSplit& split, const PhiFunction& phi,
                                     const HTConfig& config) {
    config.validate();
    auto train = std::make_shared<const RowColumns>(RowColumns::from(data, split.training));
    const SelectionProbabilityModel model(config.variant, train, config.smoothers.H, config.pi_bandwidth(), phi,
                                          config.pi0);
    std::vector<double> out;
    for (auto i : split.validation) {
        const auto& o = data[i];
        if (o.y) out.push_back(model.at(project(o.x, data.z_coords()), *o.y));
    }
    return out;
}

SelectionResult select_phi_ht(const Dataset& data, const DataSplit& split, const PhiCover& cover,
                              const HTConfig& config) {
    config.validate();
    if (split.training.size() < 2) throw ConfigError("leave-one-out needs at least two training rows");
    if (split.validation.empty()) throw ConfigError("validation set is empty");
    const auto& sm = config.smoothers;
    const double hH = config.pi_bandwidth();
    const auto train = RowColumns::from(data, split.training);
    const auto valid = RowColumns::from(data, split.validation);
    const auto tobs = train.observed_rows();
    const auto vobs = valid.observed_rows();
    const double L = data.bound();
    const double cap = ht_raw_bound(config.variant, config.pi0, L);

    std::vector<std::ptrdiff_t> self(tobs.begin(), tobs.end());
    const auto loo = Neighborhood::build(train, tobs, train, Space::z, sm.H, hH, self);
    const auto vk = Neighborhood::build(valid, vobs, train, Space::x, sm.K, sm.h);
    bool z_is_x = data.z_coords().size() == data.dim();
    for (std::size_t k = 0; z_is_x && k < data.dim(); ++k) z_is_x = data.z_coords()[k] == k;
    const bool shared = sm.K == sm.H && sm.h == hH && z_is_x;
    const auto vh_own = shared ? Neighborhood{} : Neighborhood::build(valid, vobs, train, Space::z, sm.H, hH);
    const Neighborhood& vh = shared ? vk : vh_own;

    // Compact observed index c refers to training row tobs[c], which is also loo query c.
    std::vector<double> yc(tobs.size());
    for (std::size_t c = 0; c < tobs.size(); ++c) yc[c] = train.y[tobs[c]];

    double min_psi = std::numeric_limits<double>::infinity();
    std::vector<double> risks(cover.size(), 0.0);
    std::vector<double> tab_phi, tab_wy, P, num, D;
    for (std::size_t f0 = 0; f0 < cover.size(); f0 += kChunk) {
        const std::size_t w = std::min(kChunk, cover.size() - f0);
        tab_phi.assign(tobs.size() * w, 0.0);
        tab_wy.assign(tobs.size() * w, 0.0);
        for (std::size_t c = 0; c < tobs.size(); ++c) {
            for (std::size_t f = 0; f < w; ++f) tab_phi[c * w + f] = cover[f0 + f](yc[c]);
        }
        loo.accumulate_all(tab_phi, w, P);
        for (std::size_t q = 0; q < tobs.size(); ++q) {
            const auto& s = loo.sums(q);
            const std::size_t base = q * w;
            for (std::size_t f = 0; f < w; ++f) {
                if (s.total > 0.0) min_psi = std::min(min_psi, P[base + f] / s.total);
                const double pi = pi_from_sums(config.variant, s.total, s.observed, P[base + f], tab_phi[base + f],
                                               config.pi0);
                tab_wy[base + f] = yc[q] / pi;
            }
        }
        vk.accumulate_all(tab_wy, w, num);
        vh.accumulate_all(tab_phi, w, D);
        for (std::size_t q = 0; q < vobs.size(); ++q) {
            const auto& sk = vk.sums(q);
            const auto& sh = vh.sums(q);
            const double yi = valid.y[vobs[q]];
            const std::size_t base = q * w;
            for (std::size_t f = 0; f < w; ++f) {
                if (sh.total > 0.0) min_psi = std::min(min_psi, D[base + f] / sh.total);
                const double m = std::clamp(safe_ratio(num[base + f], sk.total), -cap, cap);
                const double pi = pi_from_sums(config.variant, sh.total, sh.observed, D[base + f], cover[f0 + f](yi),
                                               config.pi0);
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
    if (std::isfinite(min_psi)) result.min_psi = min_psi;
    return result;
}

RegressionEstimate ht_estimate(std::shared_ptr<const RowColumns> train, const PhiFunction& phi,
                               const HTConfig& config) {
    config.validate();
    if (train->size() < 2) throw ConfigError("leave-one-out needs at least two training rows");
    const SelectionProbabilityModel model(config.variant, train, config.smoothers.H, config.pi_bandwidth(), phi,
                                          config.pi0);
    auto weighted = std::make_shared<std::vector<double>>(train->size(), 0.0);
    for (std::size_t i = 0; i < train->size(); ++i) {
        if (train->delta[i] != 0.0) (*weighted)[i] = train->y[i] / model.at_training(i);
    }
    const auto K = config.smoothers.K;
    const double h = config.smoothers.h;
    const double cap = ht_raw_bound(config.variant, config.pi0, train->bound);
    EstimateMeta meta;
    meta.kind = config.variant == PiKind::loo_breve ? "ht_breve" : "ht_tilde";
    meta.variant = config.variant == PiKind::loo_breve ? "breve" : "tilde";
    meta.h = h;
    meta.lambda = config.pi_bandwidth();
    meta.pi0 = config.pi0;
    meta.phi_tag = phi.tag();
    meta.conventions = "0/0 kernel ratio -> 0; empty leave-one-out window -> pi = 1; raw value capped at L/pi0";
    std::shared_ptr<const std::vector<double>> wy = weighted;
    return RegressionEstimate(
        [train, wy, K, h, cap](std::span<const double> x) {
            thread_local std::vector<double> w;
            weights_at(*train, Space::x, K, h, x, w);
            return std::clamp(safe_ratio(simd::dot(w, *wy), simd::sum(w)), -cap, cap);
        },
        train->bound, std::move(meta));
}

RegressionEstimate fit_ht(const Dataset& data, const DataSplit& split, const PhiCover& cover, const HTConfig& config,
                          SelectionResult* selection) {
    auto sel = select_phi_ht(data, split, cover, config);
    auto train = std::make_shared<const RowColumns>(RowColumns::from(data, split.training));
    auto est = ht_estimate(train, sel.chosen_phi, config);
    auto& meta = est.meta();
    meta.phi_index = sel.chosen_index;
    meta.risks = sel.risks;
    meta.min_psi = sel.min_psi;
    if (selection) *selection = std::move(sel);
    return est;
}

}  // namespace nmar

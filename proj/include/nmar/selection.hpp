#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "nmar/cover.hpp"
#include "nmar/data.hpp"
#include "nmar/kernel_sums.hpp"
#include "nmar/kernels.hpp"
#include "nmar/plugin.hpp"

namespace nmar {

/// Floor for the kernel denominators of the selection-probability estimates,
/// applied on the normalized scale (sums divided by the window mass).
inline constexpr double kDenominatorFloor = 1e-8;

/// Regression kernel K with bandwidth h, and auxiliary kernel H with bandwidth
/// lambda acting on the Z coordinates.
struct Smoothers {
    KernelSpec K = KernelSpec::box();
    double h = 0.1;
    KernelSpec H = KernelSpec::box();
    double lambda = 0.1;
};

struct SelectionResult {
    std::size_t chosen_index = 0;
    PhiFunction chosen_phi;
    std::vector<double> risks;
    /// Smallest psi value that entered a selection probability (HT selection only).
    std::optional<double> min_psi;
};

/// First index attaining the minimum; NaN never wins.
std::size_t first_argmin(std::span<const double> values);

/// exp{g} estimate from the window sums of one query: (missing / total) divided by
/// max-floored (phi / total); 0 for an empty window.
double exp_g_from_sums(double total, double missing, double phi_sum);

/// sum (1 - Delta) H / sum Delta phi(Y) H at z over the training rows.
double estimate_exp_g(const RowColumns& train, const KernelSpec& H, double lambda, std::span<const double> z,
                      const PhiFunction& phi);
/// 1 / (1 + estimate_exp_g * phi(y)).
double pi_hat(const RowColumns& train, const KernelSpec& H, double lambda, std::span<const double> z, double y,
              const PhiFunction& phi);

/// Average over the validation rows of Delta / pi_hat * (m_hat_m(X; phi) - Y)^2, both
/// fitted on the training rows. Row-by-row reference implementation.
double empirical_risk(const Dataset& data, const DataSplit& split, const Smoothers& sm, const PhiFunction& phi);

/// Risk of every cover member (batched over members) and the first minimizer.
SelectionResult select_phi(const Dataset& data, const DataSplit& split, const PhiCover& cover, const Smoothers& sm);

/// m_hat_m(.; phi_hat) on the training rows, with phi_hat from select_phi.
RegressionEstimate fit(const Dataset& data, const DataSplit& split, const PhiCover& cover, const Smoothers& sm,
                       SelectionResult* selection = nullptr);

enum class PiKind { plug_in_step1, loo_tilde, loo_breve };

/// Selection probability from the H-window sums of one query (total = sum H,
/// observed = sum Delta H, phi_sum = sum Delta phi(Y) H) and phi(y) at the
/// query response. Empty windows give 1.
double pi_from_sums(PiKind kind, double total, double observed, double phi_sum, double phi_y, double pi0);

/// Selection probability pi_phi(z, y) estimated from training rows.
///
/// plug_in_step1: 1 / (1 + exp_g(z) phi(y)) with floored denominator.
/// loo_tilde / loo_breve: 1 / (1 + (1 - eta) / D * phi(y)), eta and psi being the
/// H-kernel observed fraction and phi-weighted fraction, D = max(psi, floor) or
/// max(pi0, psi). At a training row the row itself is left out; an empty window
/// gives probability 1.
class SelectionProbabilityModel {
public:
    SelectionProbabilityModel(PiKind kind, std::shared_ptr<const RowColumns> train, KernelSpec H, double bandwidth,
                              PhiFunction phi, double pi0 = 1e-3);

    PiKind kind() const { return kind_; }
    double bandwidth() const { return bandwidth_; }
    double pi0() const { return pi0_; }
    const PhiFunction& phi() const { return phi_; }

    /// At a point outside the training rows.
    double at(std::span<const double> z, double y) const;
    /// At training row i, leaving it out for the loo kinds. Requires Delta_i = 1.
    double at_training(std::size_t i) const;

private:
    PiKind kind_;
    std::shared_ptr<const RowColumns> train_;
    KernelSpec H_;
    double bandwidth_;
    PhiFunction phi_;
    double pi0_;
    PhiColumns cols_;
};

}  // namespace nmar

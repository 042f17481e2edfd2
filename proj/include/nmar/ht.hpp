#pragma once

#include <span>
#include <vector>

#include "nmar/cover.hpp"
#include "nmar/data.hpp"
#include "nmar/kernel_sums.hpp"
#include "nmar/plugin.hpp"
#include "nmar/selection.hpp"

namespace nmar {

/// Horvitz-Thompson settings. The leave-one-out functionals use kernel H with the
/// regression bandwidth h unless use_lambda is set.
struct HTConfig {
    PiKind variant = PiKind::loo_breve;
    double pi0 = 1e-3;
    Smoothers smoothers;
    bool use_lambda = false;

    double pi_bandwidth() const { return use_lambda ? smoothers.lambda : smoothers.h; }
    /// Throws ConfigError unless variant is loo_tilde or loo_breve and pi0 > 0.
    void validate() const;
};

struct LooFunctionals {
    double psi_tilde = 0.0;  // sum_{j != i} Delta_j phi(Y_j) H_ij / sum_{j != i} H_ij
    double eta_tilde = 0.0;  // sum_{j != i} Delta_j H_ij / sum_{j != i} H_ij
    double mass = 0.0;       // sum_{j != i} H_ij
};

/// Leave-one-out functionals at training row i. Throws ConfigError for fewer than 2 rows.
LooFunctionals loo_functionals(const RowColumns& train, const KernelSpec& H, double h, std::size_t i,
                               const PhiFunction& phi);
/// [1 + (1 - eta) / max(psi, floor) phi(Y_i)]^{-1}; 1 on an empty window.
double pi_tilde(const RowColumns& train, const KernelSpec& H, double h, std::size_t i, const PhiFunction& phi);
/// [1 + (1 - eta) / max(pi0, psi) phi(Y_i)]^{-1}; 1 on an empty window.
double pi_breve(const RowColumns& train, const KernelSpec& H, double h, std::size_t i, const PhiFunction& phi,
                double pi0);

/// |m_hat_HT| cap: L / pi0 for the breve variant, L / floor otherwise.
double ht_raw_bound(PiKind variant, double pi0, double L);

/// sum_i Delta_i Y_i / pi_i K_i / sum_i K_i over the training rows, capped by ht_raw_bound.
double ht_m_hat(const RowColumns& train, const KernelSpec& K, double h, std::span<const double> x,
                const SelectionProbabilityModel& pi);

/// Selection probabilities at the observed validation rows (in validation order),
/// from the full training sums.
std::vector<double> ht_validation_pi(const Dataset& data, const DataSplit& split, const PhiFunction& phi,
                                     const HTConfig& config);

/// Risk of every cover member under inverse weighting by the chosen variant; first minimizer.
SelectionResult select_phi_ht(const Dataset& data, const DataSplit& split, const PhiCover& cover,
                              const HTConfig& config);

/// m_hat_HT at the selected phi, reported clamped to [-L, L]; raw() keeps the capped value.
RegressionEstimate fit_ht(const Dataset& data, const DataSplit& split, const PhiCover& cover, const HTConfig& config,
                          SelectionResult* selection = nullptr);

/// m_hat_HT on `train` with a fixed phi.
RegressionEstimate ht_estimate(std::shared_ptr<const RowColumns> train, const PhiFunction& phi,
                               const HTConfig& config);

}  // namespace nmar

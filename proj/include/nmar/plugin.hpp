#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nmar/cover.hpp"
#include "nmar/data.hpp"
#include "nmar/kernel_sums.hpp"
#include "nmar/kernels.hpp"
#include "nmar/models.hpp"

namespace nmar {

/// How an estimate was produced.
struct EstimateMeta {
    std::string kind;
    double h = 0.0;
    std::optional<double> lambda;
    std::optional<std::size_t> phi_index;
    std::string phi_tag;
    std::vector<double> risks;
    std::string variant;
    std::optional<double> pi0;
    std::optional<double> min_psi;
    /// Conventions applied where the kernel ratios are undefined.
    std::string conventions = "0/0 kernel ratio -> 0; correction ratio clamped to [-L, L]";
};

/// A fitted regression function. operator() is clamped to [-L, L]; raw() is the
/// unclamped value kept for diagnostics.
class RegressionEstimate {
public:
    RegressionEstimate(PointFunction raw, double bound, EstimateMeta meta);

    double operator()(std::span<const double> x) const;
    double raw(std::span<const double> x) const { return raw_(x); }
    double bound() const { return bound_; }
    const EstimateMeta& meta() const { return meta_; }
    EstimateMeta& meta() { return meta_; }

private:
    PointFunction raw_;
    double bound_;
    EstimateMeta meta_;
};

/// eta1 + clamp(num / den, -L, L) * (1 - eta2), with num / den := 0 when den = 0,
/// then clamped to [-L, L].
double combine_representation(double eta1, double eta2, double num, double den, double L);

/// Nadaraya-Watson average of the observed responses, sum Delta Y K / sum Delta K
/// (0 on an empty window). On fully observed rows this is the classical estimator;
/// otherwise it is the complete-case estimator.
double nw_estimate(const RowColumns& rows, const KernelSpec& kernel, double h, std::span<const double> x);
double nw_estimate(const Dataset& data, const KernelSpec& kernel, double h, std::span<const double> x);

/// sum Delta Y^{2-k} e^{tY} K / sum K, k in {1, 2}; 0 on an empty window.
double eta_hat(const RowColumns& rows, const KernelSpec& kernel, double h, std::span<const double> x, double t,
               int k);
double eta_hat(const Dataset& data, const KernelSpec& kernel, double h, std::span<const double> x, double t, int k);

/// eta_1(x,0) + [eta_1(x,g) / eta_2(x,g)] (1 - eta_2(x,0)) with the ratio and the
/// result clamped to [-L, L].
double m_hat_gamma(const RowColumns& rows, const KernelSpec& kernel, double h, std::span<const double> x,
                   double gamma);
double m_hat_gamma(const Dataset& data, const KernelSpec& kernel, double h, std::span<const double> x, double gamma);

/// sum Delta Y^{2-k} phi(Y) K / sum K over the given (training) rows.
double psi_hat_m(const RowColumns& train, const KernelSpec& kernel, double h, std::span<const double> x,
                 const PhiFunction& phi, int k);
/// sum Delta Y^{2-k} K / sum K over the given (training) rows.
double eta_hat_m(const RowColumns& train, const KernelSpec& kernel, double h, std::span<const double> x, int k);
/// eta_{m,1} + [psi_{m,1} / psi_{m,2}] (1 - eta_{m,2}), ratio and result clamped to [-L, L].
double m_hat_m_phi(const RowColumns& train, const KernelSpec& kernel, double h, std::span<const double> x,
                   const PhiFunction& phi);
double m_hat_m_phi(const Dataset& data, std::span<const std::size_t> training, const KernelSpec& kernel, double h,
                   std::span<const double> x, const PhiFunction& phi);

/// Per-row weights Delta phi(Y) and Delta Y phi(Y), precomputed once per phi.
struct PhiColumns {
    std::vector<double> delta_phi;
    std::vector<double> delta_y_phi;

    static PhiColumns from(const RowColumns& rows, const PhiFunction& phi);
};

/// Kernel sums at one query point.
struct Functionals {
    double total = 0.0;        // sum K
    double observed = 0.0;     // sum Delta K
    double observed_y = 0.0;   // sum Delta Y K
    double phi = 0.0;          // sum Delta phi(Y) K
    double phi_y = 0.0;        // sum Delta Y phi(Y) K
};

Functionals functionals(const RowColumns& rows, const PhiColumns& cols, const KernelSpec& kernel, double h,
                        std::span<const double> x);

/// m_hat_m(.; phi) fitted on `train`.
RegressionEstimate phi_estimate(std::shared_ptr<const RowColumns> train, const KernelSpec& kernel, double h,
                                const PhiFunction& phi);
/// The plug-in estimator at a supplied gamma, over all rows of `data`.
RegressionEstimate plugin_gamma_estimate(const Dataset& data, const KernelSpec& kernel, double h, double gamma);
/// sum Delta Y K / sum Delta K over all rows of `data`.
RegressionEstimate complete_case_estimate(const Dataset& data, const KernelSpec& kernel, double h);
/// Classical estimator; throws ModelError unless every response is observed.
RegressionEstimate nw_full_estimate(const Dataset& data, const KernelSpec& kernel, double h);

}  // namespace nmar

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace nmar {

enum class KernelFamily { box, triangle, truncated_gaussian };

/// Radial, compactly supported kernel K(u) = k(|u|^2) together with its
/// regularity constants: K(u) >= b whenever |u| <= r.
///
///   box(R)                 K = 1{|u| <= R},               r = R,     b = 1
///   triangle(R)            K = max(0, 1 - |u| / R),       r = R / 2, b = 1/2
///   truncated_gaussian(s)  K = exp(-|u|^2 / 2s^2) 1{|u| <= 3s}, r = s, b = exp(-1/2)
class KernelSpec {
public:
    static KernelSpec box(double radius = 1.0);
    static KernelSpec triangle(double radius = 1.0);
    static KernelSpec truncated_gaussian(double sigma = 1.0);
    /// `param` is the support radius for box/triangle and sigma for the Gaussian;
    /// a nonpositive value selects the family default.
    static KernelSpec from_name(std::string_view family, double param = 0.0);

    KernelFamily family() const { return family_; }
    std::string_view name() const;
    double param() const { return param_; }
    double r() const;
    double b() const;
    double support_radius() const;

    /// Kernel value as a function of the squared norm |u|^2. The SIMD kernels
    /// reproduce this expression operation for operation.
    double profile(double sq_norm) const {
        switch (family_) {
            case KernelFamily::box:
                return sq_norm <= param_ * param_ ? 1.0 : 0.0;
            case KernelFamily::triangle: {
                const double t = std::sqrt(sq_norm) / param_;
                return std::max(0.0, 1.0 - t);
            }
            case KernelFamily::truncated_gaussian:
                return sq_norm <= 9.0 * param_ * param_ ? std::exp(-sq_norm / (2.0 * param_ * param_)) : 0.0;
        }
        return 0.0;
    }

    double operator()(std::span<const double> u) const;

    bool operator==(const KernelSpec&) const = default;

private:
    KernelSpec(KernelFamily f, double p) : family_(f), param_(p) {}
    KernelFamily family_;
    double param_;
};

inline double eval(const KernelSpec& kernel, std::span<const double> u) { return kernel(u); }

enum class BandwidthMode { fixed, power_rule };

/// h(n) = h0 (fixed) or h0 * n^(-beta) (power rule, 0 < beta < 1/d).
struct BandwidthPolicy {
    BandwidthMode mode = BandwidthMode::power_rule;
    double h0 = 0.5;
    double beta = 0.2;

    static BandwidthPolicy fixed(double h0) { return {BandwidthMode::fixed, h0, 0.0}; }
    static BandwidthPolicy power_rule(double h0, double beta) { return {BandwidthMode::power_rule, h0, beta}; }
    /// beta = 1/(d+4).
    static BandwidthPolicy classical(std::size_t d, double h0) {
        return power_rule(h0, 1.0 / (static_cast<double>(d) + 4.0));
    }
};

/// Throws ConfigError for h0 <= 0, or for a power rule with beta <= 0 or beta * d >= 1.
double bandwidth(const BandwidthPolicy& policy, std::size_t n, std::size_t d);

}  // namespace nmar

#include "nmar/kernels.hpp"

#include <algorithm>

#include "nmar/errors.hpp"

namespace nmar {

KernelSpec KernelSpec::box(double radius) {
    if (!(radius > 0.0)) throw ConfigError("box kernel radius must be positive");
    return {KernelFamily::box, radius};
}

KernelSpec KernelSpec::triangle(double radius) {
    if (!(radius > 0.0)) throw ConfigError("triangle kernel radius must be positive");
    return {KernelFamily::triangle, radius};
}

KernelSpec KernelSpec::truncated_gaussian(double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("truncated_gaussian sigma must be positive");
    return {KernelFamily::truncated_gaussian, sigma};
}

KernelSpec KernelSpec::from_name(std::string_view family, double param) {
    const double p = param > 0.0 ? param : 1.0;
    if (family == "box") return box(p);
    if (family == "triangle") return triangle(p);
    if (family == "truncated_gaussian") return truncated_gaussian(p);
    throw ConfigError("unknown kernel family '" + std::string(family) + "'");
}

std::string_view KernelSpec::name() const {
    switch (family_) {
        case KernelFamily::box: return "box";
        case KernelFamily::triangle: return "triangle";
        case KernelFamily::truncated_gaussian: return "truncated_gaussian";
    }
    return "?";
}

double KernelSpec::r() const {
    switch (family_) {
        case KernelFamily::box: return param_;
        case KernelFamily::triangle: return 0.5 * param_;
        case KernelFamily::truncated_gaussian: return param_;
    }
    return 0.0;
}

double KernelSpec::b() const {
    switch (family_) {
        case KernelFamily::box: return 1.0;
        case KernelFamily::triangle: return 0.5;
        case KernelFamily::truncated_gaussian: return std::exp(-0.5);
    }
    return 0.0;
}

double KernelSpec::support_radius() const {
    return family_ == KernelFamily::truncated_gaussian ? 3.0 * param_ : param_;
}

double KernelSpec::operator()(std::span<const double> u) const {
    double s = 0.0;
    for (double v : u) s += v * v;
    return profile(s);
}

double bandwidth(const BandwidthPolicy& policy, std::size_t n, std::size_t d) {
    if (!(policy.h0 > 0.0)) throw ConfigError("bandwidth h0 must be positive");
    if (n == 0) throw ConfigError("bandwidth needs n >= 1");
    if (policy.mode == BandwidthMode::fixed) return policy.h0;
    if (!(policy.beta > 0.0) || policy.beta * static_cast<double>(d) >= 1.0) {
        throw ConfigError("power-rule bandwidth requires 0 < beta < 1/d so that n h^d grows");
    }
    return policy.h0 * std::pow(static_cast<double>(n), -policy.beta);
}

}  // namespace nmar

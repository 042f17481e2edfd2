#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nmar/models.hpp"

namespace nmar {

struct Atom {
    std::vector<double> x;
    double y = 0.0;
    double probability = 0.0;
};

/// Finite joint law of (X, Y) with the selection mechanism
/// P(Delta = 1 | X, Y) = 1 / (1 + exp(g(Z)) phi*(Y)); every expectation is an
/// exact enumeration over atoms and Delta.
class DiscreteJoint {
public:
    /// Throws ModelError unless probabilities are positive and sum to 1 (1e-12),
    /// and every |y| <= bound.
    DiscreteJoint(std::vector<Atom> atoms, double bound, std::vector<std::size_t> z_coords, PointFunction g_true,
                  std::function<double(double)> phi_star);

    const std::vector<Atom>& atoms() const { return atoms_; }
    double bound() const { return bound_; }
    double pi(const Atom& a) const;
    const std::function<double(double)>& phi_star() const { return phi_; }
    /// Distinct covariate locations in first-appearance order.
    std::vector<std::vector<double>> locations() const;
    double marginal(std::span<const double> x) const;

    /// E[f(atom, Delta)], summing over both values of Delta.
    double expect(const std::function<double(const Atom&, int)>& f) const;
    /// E[f(atom, Delta) | X = x]; throws ModelError when P(X = x) = 0.
    double conditional(std::span<const double> x, const std::function<double(const Atom&, int)>& f) const;

private:
    std::vector<Atom> atoms_;
    double bound_;
    std::vector<std::size_t> z_coords_;
    PointFunction g_;
    std::function<double(double)> phi_;
};

/// lhs = E[Y | X = x]; rhs = eta1 + psi1 / psi2 (1 - eta2) with
/// eta_k = E[Delta Y^{2-k} | x] and psi_k = E[Delta Y^{2-k} phi*(Y) | x].
struct Representation {
    double lhs = 0.0;
    double rhs = 0.0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    double psi1 = 0.0;
    double psi2 = 0.0;
};

Representation representation_oracle(const DiscreteJoint& joint, std::span<const double> x);

/// Population counterpart of m_hat_m(x; phi) (no clamping).
double population_m_phi(const DiscreteJoint& joint, std::span<const double> x, const std::function<double(double)>& phi);

/// E[Delta Y / pi(X, Y) | X = x].
double population_ht_mean(const DiscreteJoint& joint, std::span<const double> x);

}  // namespace nmar

#include "nmar/population.hpp"

#include <cmath>

#include "nmar/data.hpp"
#include "nmar/errors.hpp"
#include "nmar/kernel_sums.hpp"

namespace nmar {

DiscreteJoint::DiscreteJoint(std::vector<Atom> atoms, double bound, std::vector<std::size_t> z_coords,
                             PointFunction g_true, std::function<double(double)> phi_star)
    : atoms_(std::move(atoms)), bound_(bound), z_coords_(std::move(z_coords)), g_(std::move(g_true)),
      phi_(std::move(phi_star)) {
    if (atoms_.empty()) throw ModelError("discrete joint needs at least one atom");
    double total = 0.0;
    for (const auto& a : atoms_) {
        if (!(a.probability > 0.0)) throw ModelError("atom probabilities must be positive");
        if (std::abs(a.y) > bound_) throw ModelError("atom response outside [-L, L]");
        for (auto c : z_coords_) {
            if (c >= a.x.size()) throw ModelError("z coordinate out of range");
        }
        total += a.probability;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ModelError("atom probabilities must sum to 1");
    if (!g_ || !phi_) throw ModelError("discrete joint needs g and phi*");
}

double DiscreteJoint::pi(const Atom& a) const {
    return 1.0 / (1.0 + std::exp(g_(project(a.x, z_coords_))) * phi_(a.y));
}

std::vector<std::vector<double>> DiscreteJoint::locations() const {
    std::vector<std::vector<double>> out;
    for (const auto& a : atoms_) {
        bool seen = false;
        for (const auto& x : out) seen = seen || x == a.x;
        if (!seen) out.push_back(a.x);
    }
    return out;
}

double DiscreteJoint::marginal(std::span<const double> x) const {
    double p = 0.0;
    for (const auto& a : atoms_) {
        if (std::equal(a.x.begin(), a.x.end(), x.begin(), x.end())) p += a.probability;
    }
    return p;
}

double DiscreteJoint::expect(const std::function<double(const Atom&, int)>& f) const {
    double e = 0.0;
    for (const auto& a : atoms_) {
        const double p = pi(a);
        e += a.probability * (p * f(a, 1) + (1.0 - p) * f(a, 0));
    }
    return e;
}

double DiscreteJoint::conditional(std::span<const double> x, const std::function<double(const Atom&, int)>& f) const {
    const double px = marginal(x);
    if (!(px > 0.0)) throw ModelError("conditioning on a covariate value of probability 0");
    double e = 0.0;
    for (const auto& a : atoms_) {
        if (!std::equal(a.x.begin(), a.x.end(), x.begin(), x.end())) continue;
        const double p = pi(a);
        e += a.probability * (p * f(a, 1) + (1.0 - p) * f(a, 0));
    }
    return e / px;
}

namespace {

Representation represent(const DiscreteJoint& joint, std::span<const double> x,
                         const std::function<double(double)>& phi) {
    Representation r;
    r.lhs = joint.conditional(x, [](const Atom& a, int) { return a.y; });
    r.eta1 = joint.conditional(x, [](const Atom& a, int d) { return d * a.y; });
    r.eta2 = joint.conditional(x, [](const Atom&, int d) { return static_cast<double>(d); });
    r.psi1 = joint.conditional(x, [&](const Atom& a, int d) { return d * a.y * phi(a.y); });
    r.psi2 = joint.conditional(x, [&](const Atom& a, int d) { return d * phi(a.y); });
    r.rhs = r.eta1 + safe_ratio(r.psi1, r.psi2) * (1.0 - r.eta2);
    return r;
}

}  // namespace

Representation representation_oracle(const DiscreteJoint& joint, std::span<const double> x) {
    return represent(joint, x, joint.phi_star());
}

double population_m_phi(const DiscreteJoint& joint, std::span<const double> x,
                        const std::function<double(double)>& phi) {
    return represent(joint, x, phi).rhs;
}

double population_ht_mean(const DiscreteJoint& joint, std::span<const double> x) {
    return joint.conditional(x, [&](const Atom& a, int d) { return d * a.y / joint.pi(a); });
}

}  // namespace nmar

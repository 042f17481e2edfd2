#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nmar {

/// A positive function on [-L, L] used as the response factor of the selection
/// probability 1 / (1 + exp(g(z)) phi(y)).
class PhiFunction {
public:
    enum class Kind { exp_gamma, constant, tabulated };

    /// scale * exp(gamma * y); scale must be positive.
    static PhiFunction exp_gamma(double gamma, double scale = 1.0);
    static PhiFunction constant(double c);
    /// Piecewise-linear interpolation through (knots, values); constant beyond the ends.
    static PhiFunction tabulated(std::vector<double> knots, std::vector<double> values, std::string label = "table");

    double operator()(double y) const;

    Kind kind() const { return kind_; }
    /// Exponent of an exp_gamma member.
    std::optional<double> gamma() const;
    double scale() const { return scale_; }
    /// Short label for reports: the gamma value for unit-scale exponentials.
    std::string tag() const;

private:
    Kind kind_ = Kind::constant;
    double gamma_ = 0.0;
    double scale_ = 1.0;
    std::vector<double> knots_;
    std::vector<double> values_;
    std::string label_;
};

/// Grid approximation of sup_{|y| <= L} |a(y) - b(y)| on `grid` equispaced points.
double sup_distance(const PhiFunction& a, const PhiFunction& b, double L, std::size_t grid, double* argmax = nullptr);

/// Finite cover of a class F of functions [-L, L] -> (0, B]. Members keep their
/// construction order; downstream argmin tie-breaks rely on it.
class PhiCover {
public:
    /// Checks every member on a 10^4-point grid: finite, > 0 and <= B.
    PhiCover(std::vector<PhiFunction> members, double epsilon, double L, double B, std::string class_spec);

    const std::vector<PhiFunction>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    const PhiFunction& operator[](std::size_t i) const { return members_[i]; }
    double epsilon() const { return epsilon_; }
    double L() const { return L_; }
    double B() const { return B_; }
    const std::string& class_spec() const { return class_spec_; }

private:
    std::vector<PhiFunction> members_;
    double epsilon_;
    double L_;
    double B_;
    std::string class_spec_;
};

/// 2 floor(M L e^{ML} / epsilon) + 3.
std::size_t covering_number_bound(double M, double L, double epsilon);

/// Cover of {exp(gamma y) : |gamma| <= M} on |y| <= L: the grid
/// {2 i eps / (L e^{ML}) : |i| <= floor(M L e^{ML} / eps)} together with -M and M,
/// clamped into [-M, M], deduplicated and sorted ascending.
PhiCover build_exp_cover(double M, double L, double epsilon);

/// Family phi(theta, y) over a parameter box, with per-coordinate Lipschitz
/// constants sup_y |d phi / d theta_k|.
struct ParametricFamily {
    std::function<double(std::span<const double>, double)> phi;
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<double> lipschitz;
    std::string name = "parametric";
};

/// Uniform parameter grid fine enough that every family member is within
/// epsilon of a grid member; members are tabulated on `knots` points of [-L, L].
/// Tabulation adds interpolation error, so check the result with validate_cover.
PhiCover build_grid_cover(const ParametricFamily& family, double L, double B, double epsilon,
                          std::size_t knots = 2049);

/// Reads a tabulated cover from CSV `y,phi1,...,phiN`.
PhiCover load_table_cover(const std::filesystem::path& path, double epsilon, double L, double B);

struct CoverValidation {
    bool ok = true;
    double worst_distance = 0.0;
    std::size_t worst_sample = 0;
    std::size_t nearest_member = 0;
    double worst_y = 0.0;
    std::vector<double> distances;
};

/// For each sampled class member, the grid sup-distance to its nearest cover
/// member; ok iff every distance <= tolerance_factor * cover.epsilon().
/// Throws ConfigError when y_grid_size < 100.
CoverValidation validate_cover(const PhiCover& cover, std::span<const PhiFunction> class_sample,
                               std::size_t y_grid_size, double tolerance_factor = 1.0);

enum class EpsilonMode { fixed, n_power };

/// fixed: `epsilon`; n_power: n^{-1/2}.
double cover_epsilon(EpsilonMode mode, double epsilon, std::size_t n);

}  // namespace nmar

#include "nmar/cover.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "nmar/csv.hpp"
#include "nmar/errors.hpp"

namespace nmar {

PhiFunction PhiFunction::exp_gamma(double gamma, double scale) {
    if (!std::isfinite(gamma)) throw ConfigError("phi exponent must be finite");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("phi scale must be positive");
    PhiFunction f;
    f.kind_ = Kind::exp_gamma;
    f.gamma_ = gamma;
    f.scale_ = scale;
    return f;
}

PhiFunction PhiFunction::constant(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("constant phi must be positive");
    PhiFunction f;
    f.kind_ = Kind::constant;
    f.scale_ = c;
    return f;
}

PhiFunction PhiFunction::tabulated(std::vector<double> knots, std::vector<double> values, std::string label) {
    if (knots.size() < 2 || knots.size() != values.size()) throw ConfigError("tabulated phi needs matching knots/values");
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (i > 0 && !(knots[i] > knots[i - 1])) throw ConfigError("tabulated phi knots must increase strictly");
        if (!(values[i] > 0.0) || !std::isfinite(values[i])) throw ConfigError("tabulated phi values must be positive");
    }
    PhiFunction f;
    f.kind_ = Kind::tabulated;
    f.knots_ = std::move(knots);
    f.values_ = std::move(values);
    f.label_ = std::move(label);
    return f;
}

double PhiFunction::operator()(double y) const {
    switch (kind_) {
        case Kind::exp_gamma:
            return scale_ == 1.0 ? std::exp(gamma_ * y) : scale_ * std::exp(gamma_ * y);
        case Kind::constant:
            return scale_;
        case Kind::tabulated: {
            if (y <= knots_.front()) return values_.front();
            if (y >= knots_.back()) return values_.back();
            const auto it = std::upper_bound(knots_.begin(), knots_.end(), y);
            const auto hi = static_cast<std::size_t>(it - knots_.begin());
            const auto lo = hi - 1;
            const double t = (y - knots_[lo]) / (knots_[hi] - knots_[lo]);
            return values_[lo] + t * (values_[hi] - values_[lo]);
        }
    }
    return 0.0;
}

std::optional<double> PhiFunction::gamma() const {
    if (kind_ == Kind::exp_gamma) return gamma_;
    return std::nullopt;
}

std::string PhiFunction::tag() const {
    switch (kind_) {
        case Kind::exp_gamma:
            if (scale_ == 1.0) return format_double(gamma_);
            return format_double(scale_) + "*exp(" + format_double(gamma_) + "y)";
        case Kind::constant:
            return "const(" + format_double(scale_) + ")";
        case Kind::tabulated:
            return label_;
    }
    return "?";
}

namespace {

std::vector<double> uniform_grid(double L, std::size_t points) {
    std::vector<double> g(points);
    if (points == 1) {
        g[0] = 0.0;
        return g;
    }
    for (std::size_t i = 0; i < points; ++i) {
        g[i] = -L + 2.0 * L * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return g;
}

std::vector<double> tabulate(const PhiFunction& f, std::span<const double> grid) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
    return v;
}

}  // namespace

double sup_distance(const PhiFunction& a, const PhiFunction& b, double L, std::size_t grid, double* argmax) {
    const auto g = uniform_grid(L, grid);
    double best = 0.0;
    double at = g.empty() ? 0.0 : g[0];
    for (double y : g) {
        const double diff = std::abs(a(y) - b(y));
        if (diff > best) {
            best = diff;
            at = y;
        }
    }
    if (argmax) *argmax = at;
    return best;
}

PhiCover::PhiCover(std::vector<PhiFunction> members, double epsilon, double L, double B, std::string class_spec)
    : members_(std::move(members)), epsilon_(epsilon), L_(L), B_(B), class_spec_(std::move(class_spec)) {
    if (members_.empty()) throw ConfigError("cover must have at least one member");
    if (!(epsilon_ > 0.0)) throw ConfigError("cover epsilon must be positive");
    if (!(L_ > 0.0) || !(B_ > 0.0)) throw ConfigError("cover needs positive L and B");
    const auto grid = uniform_grid(L_, 10000);
    const double limit = B_ * (1.0 + 1e-12);
    for (std::size_t i = 0; i < members_.size(); ++i) {
        for (double y : grid) {
            const double v = members_[i](y);
            if (!(v > 0.0) || !(v <= limit)) {
                throw ConfigError("cover member " + std::to_string(i) + " (" + members_[i].tag() +
                                  ") leaves (0, B] at y=" + format_double(y));
            }
        }
    }
}

std::size_t covering_number_bound(double M, double L, double epsilon) {
    if (!(M > 0.0) || !(L > 0.0) || !(epsilon > 0.0)) throw ConfigError("cover parameters must be positive");
    const double k = std::floor(M * L * std::exp(M * L) / epsilon);
    if (!(k < 1e8)) throw ConfigError("cover would exceed 2e8 members");
    return 2 * static_cast<std::size_t>(k) + 3;
}

PhiCover build_exp_cover(double M, double L, double epsilon) {
    const std::size_t bound = covering_number_bound(M, L, epsilon);
    const auto k = static_cast<long long>((bound - 3) / 2);
    const double spacing = 2.0 * epsilon / (L * std::exp(M * L));

    std::vector<double> gammas;
    gammas.reserve(bound);
    for (long long i = -k; i <= k; ++i) gammas.push_back(std::clamp(static_cast<double>(i) * spacing, -M, M));
    gammas.push_back(-M);
    gammas.push_back(M);
    std::sort(gammas.begin(), gammas.end());
    gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());

    std::vector<PhiFunction> members;
    members.reserve(gammas.size());
    for (double g : gammas) members.push_back(PhiFunction::exp_gamma(g));
    return PhiCover(std::move(members), epsilon, L, std::exp(M * L),
                    "exp(gamma y), |gamma| <= " + format_double(M) + ", |y| <= " + format_double(L));
}

PhiCover build_grid_cover(const ParametricFamily& family, double L, double B, double epsilon, std::size_t knots) {
    const std::size_t dims = family.lo.size();
    if (dims == 0 || family.hi.size() != dims || family.lipschitz.size() != dims) {
        throw ConfigError("parametric family box and Lipschitz constants must share one nonzero dimension");
    }
    if (!(epsilon > 0.0) || knots < 2) throw ConfigError("grid cover needs epsilon > 0 and >= 2 knots");

    // Nearest grid point lies within s_k / 2 per coordinate; spend epsilon / dims on each.
    std::vector<std::vector<double>> axes(dims);
    for (std::size_t k = 0; k < dims; ++k) {
        const double width = family.hi[k] - family.lo[k];
        if (!(width >= 0.0)) throw ConfigError("parametric box must have lo <= hi");
        std::size_t count = 1;
        if (width > 0.0 && family.lipschitz[k] > 0.0) {
            const double step = 2.0 * epsilon / (static_cast<double>(dims) * family.lipschitz[k]);
            count = static_cast<std::size_t>(std::ceil(width / step)) + 1;
        }
        axes[k].resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            axes[k][i] = count == 1 ? 0.5 * (family.lo[k] + family.hi[k])
                                    : family.lo[k] + width * static_cast<double>(i) / static_cast<double>(count - 1);
        }
    }

    const auto ygrid = uniform_grid(L, knots);
    std::vector<PhiFunction> members;
    std::vector<std::size_t> idx(dims, 0);
    std::vector<double> theta(dims);
    while (true) {
        std::string label = family.name + "(";
        for (std::size_t k = 0; k < dims; ++k) {
            theta[k] = axes[k][idx[k]];
            label += (k ? ";" : "") + format_double(theta[k]);
        }
        label += ")";
        std::vector<double> values(knots);
        for (std::size_t i = 0; i < knots; ++i) values[i] = family.phi(theta, ygrid[i]);
        members.push_back(PhiFunction::tabulated(ygrid, std::move(values), label));

        std::size_t k = 0;
        while (k < dims && ++idx[k] == axes[k].size()) idx[k++] = 0;
        if (k == dims) break;
    }
    return PhiCover(std::move(members), epsilon, L, B, family.name + " parameter grid");
}

PhiCover load_table_cover(const std::filesystem::path& path, double epsilon, double L, double B) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open cover table '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError("row 0: empty cover table");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header;
    for (auto f : split_fields(line)) header.emplace_back(f);
    if (header.size() < 2 || header[0] != "y") throw ParseError("row 0: cover table header must be y,phi1,...");
    const std::size_t count = header.size() - 1;
    std::vector<double> knots;
    std::vector<std::vector<double>> values(count);
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != count + 1) throw ParseError("row " + std::to_string(row) + ": wrong field count");
        knots.push_back(parse_double(fields[0], row));
        for (std::size_t c = 0; c < count; ++c) values[c].push_back(parse_double(fields[c + 1], row));
    }
    std::vector<PhiFunction> members;
    for (std::size_t c = 0; c < count; ++c) {
        members.push_back(PhiFunction::tabulated(knots, values[c], header[c + 1]));
    }
    return PhiCover(std::move(members), epsilon, L, B, "table " + path.filename().string());
}

CoverValidation validate_cover(const PhiCover& cover, std::span<const PhiFunction> class_sample,
                               std::size_t y_grid_size, double tolerance_factor) {
    if (y_grid_size < 100) throw ConfigError("cover validation needs a y grid of at least 100 points");
    const auto grid = uniform_grid(cover.L(), y_grid_size);
    std::vector<std::vector<double>> table;
    table.reserve(cover.size());
    for (const auto& m : cover.members()) table.push_back(tabulate(m, grid));

    // Sorted exponents let an exp sample start from its nearest-gamma member, which
    // makes the early exit below effective.
    std::vector<double> member_gamma;
    bool all_exp = true;
    for (const auto& m : cover.members()) {
        if (!m.gamma() || m.scale() != 1.0) {
            all_exp = false;
            break;
        }
        member_gamma.push_back(*m.gamma());
    }
    all_exp = all_exp && std::is_sorted(member_gamma.begin(), member_gamma.end());

    CoverValidation report;
    report.distances.reserve(class_sample.size());
    const double limit = tolerance_factor * cover.epsilon();
    std::size_t hint = 0;
    for (std::size_t s = 0; s < class_sample.size(); ++s) {
        const auto values = tabulate(class_sample[s], grid);
        if (all_exp && class_sample[s].gamma() && class_sample[s].scale() == 1.0) {
            const double g = *class_sample[s].gamma();
            auto it = std::lower_bound(member_gamma.begin(), member_gamma.end(), g);
            hint = static_cast<std::size_t>(it - member_gamma.begin());
            if (hint == member_gamma.size()) --hint;
            if (hint > 0 && std::abs(member_gamma[hint - 1] - g) < std::abs(member_gamma[hint] - g)) --hint;
        }
        auto distance_to = [&](std::size_t m, double cutoff, std::size_t* at) {
            double best = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double diff = std::abs(values[i] - table[m][i]);
                if (diff > best) {
                    best = diff;
                    if (at) *at = i;
                    if (best > cutoff) break;
                }
            }
            return best;
        };
        std::size_t best_at = 0;
        std::size_t best_member = hint;
        double best = distance_to(hint, std::numeric_limits<double>::infinity(), &best_at);
        for (std::size_t m = 0; m < table.size(); ++m) {
            if (m == hint) continue;
            std::size_t at = 0;
            const double dist = distance_to(m, best, &at);
            if (dist < best) {
                best = dist;
                best_member = m;
                best_at = at;
            }
        }
        hint = best_member;
        report.distances.push_back(best);
        if (best > report.worst_distance || s == 0) {
            report.worst_distance = best;
            report.worst_sample = s;
            report.nearest_member = best_member;
            report.worst_y = grid[best_at];
        }
        if (best > limit) report.ok = false;
    }
    return report;
}

double cover_epsilon(EpsilonMode mode, double epsilon, std::size_t n) {
    if (mode == EpsilonMode::n_power) return 1.0 / std::sqrt(static_cast<double>(n));
    if (!(epsilon > 0.0)) throw ConfigError("cover epsilon must be positive");
    return epsilon;
}

}  // namespace nmar

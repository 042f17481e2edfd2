#include "nmar/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nmar/errors.hpp"
#include "nmar/rng.hpp"

namespace nmar {

Dataset::Dataset(std::size_t d, std::vector<std::size_t> z_coords, double bound,
                 std::vector<Observation> observations)
    : d_(d), z_coords_(std::move(z_coords)), bound_(bound), observations_(std::move(observations)) {
    if (d_ == 0) throw ConfigError("dataset dimension must be positive");
    if (!(bound_ > 0.0) || !std::isfinite(bound_)) throw ConfigError("response bound L must be positive and finite");
    if (z_coords_.empty()) throw ConfigError("z_coords must be nonempty");
    for (auto c : z_coords_) {
        if (c >= d_) throw ConfigError("z coordinate " + std::to_string(c + 1) + " exceeds dimension");
    }
    for (std::size_t i = 0; i < observations_.size(); ++i) {
        const auto& o = observations_[i];
        if (o.x.size() != d_) throw ConfigError("observation " + std::to_string(i) + " has wrong dimension");
        for (double v : o.x) {
            if (!std::isfinite(v)) throw ConfigError("observation " + std::to_string(i) + " has non-finite covariate");
        }
        if (o.y && !(std::abs(*o.y) <= bound_)) {
            throw ConfigError("observation " + std::to_string(i) + " response exceeds bound L");
        }
    }
}

std::size_t Dataset::observed_count() const {
    return static_cast<std::size_t>(
        std::count_if(observations_.begin(), observations_.end(), [](const Observation& o) { return o.y.has_value(); }));
}

DataSplit split(const Dataset& data, double alpha, std::uint64_t seed) {
    const std::size_t n = data.size();
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("split alpha must lie in (0,1)");
    const auto m = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n)));
    if (m < 1 || m + 1 > n) {
        throw ConfigError("split alpha leaves an empty training or validation set (n=" + std::to_string(n) + ")");
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    auto rng = make_rng(seed, {0x5b117});
    std::shuffle(perm.begin(), perm.end(), rng);

    DataSplit s;
    s.alpha = alpha;
    s.training.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m));
    s.validation.assign(perm.begin() + static_cast<std::ptrdiff_t>(m), perm.end());
    std::sort(s.training.begin(), s.training.end());
    std::sort(s.validation.begin(), s.validation.end());
    return s;
}

std::vector<double> project(std::span<const double> x, std::span<const std::size_t> coords) {
    std::vector<double> z(coords.size());
    for (std::size_t k = 0; k < coords.size(); ++k) z[k] = x[coords[k]];
    return z;
}

}  // namespace nmar

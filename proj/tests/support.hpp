#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "nmar/data.hpp"

namespace nmar::testing {

inline Dataset make_data(const std::vector<std::vector<double>>& xs, const std::vector<std::optional<double>>& ys,
                         double L = 10.0, std::vector<std::size_t> z = {0}) {
    std::vector<Observation> obs;
    for (std::size_t i = 0; i < xs.size(); ++i) obs.push_back({xs[i], ys[i]});
    return Dataset(xs.empty() ? 1 : xs[0].size(), std::move(z), L, std::move(obs));
}

/// 1-d helper: rows (x, y), with y = nullopt for a missing response.
inline Dataset line_data(const std::vector<double>& xs, const std::vector<std::optional<double>>& ys,
                         double L = 10.0) {
    std::vector<std::vector<double>> pts;
    for (double x : xs) pts.push_back({x});
    return make_data(pts, ys, L);
}

/// Random dataset on [0,1]^d with responses in [-1,1]; each response is missing with
/// probability `missing`.
inline Dataset random_data(std::mt19937_64& rng, std::size_t n, std::size_t d, double missing,
                           std::vector<std::size_t> z = {}) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Observation> obs;
    for (std::size_t i = 0; i < n; ++i) {
        Observation o;
        for (std::size_t k = 0; k < d; ++k) o.x.push_back(u(rng));
        const double y = 2.0 * u(rng) - 1.0;
        if (u(rng) >= missing) o.y = y;
        obs.push_back(std::move(o));
    }
    if (z.empty()) {
        for (std::size_t k = 0; k < d; ++k) z.push_back(k);
    }
    return Dataset(d, std::move(z), 1.0, std::move(obs));
}

inline double box(double u) { return std::abs(u) <= 1.0 ? 1.0 : 0.0; }

}  // namespace nmar::testing

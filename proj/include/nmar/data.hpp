#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace nmar {

/// One record (X, Y, Delta). The response is present iff it was observed,
/// so Delta is derived from `y` rather than stored separately.
struct Observation {
    std::vector<double> x;
    std::optional<double> y;

    int delta() const { return y.has_value() ? 1 : 0; }
    bool operator==(const Observation&) const = default;
};

/// Immutable sample with covariate dimension d, the coordinates forming Z
/// (0-based), and the response bound L.
class Dataset {
public:
    Dataset(std::size_t d, std::vector<std::size_t> z_coords, double bound,
            std::vector<Observation> observations);

    std::size_t size() const { return observations_.size(); }
    std::size_t dim() const { return d_; }
    const std::vector<std::size_t>& z_coords() const { return z_coords_; }
    double bound() const { return bound_; }
    const Observation& operator[](std::size_t i) const { return observations_[i]; }
    const std::vector<Observation>& observations() const { return observations_; }
    std::size_t observed_count() const;
    bool fully_observed() const { return observed_count() == size(); }

    bool operator==(const Dataset&) const = default;

private:
    std::size_t d_;
    std::vector<std::size_t> z_coords_;
    double bound_;
    std::vector<Observation> observations_;
};

/// Partition of {0..n-1} into a training index set and a validation index set.
/// Both sets are sorted ascending.
struct DataSplit {
    std::vector<std::size_t> training;
    std::vector<std::size_t> validation;
    double alpha = 0.5;
};

/// Uniformly random split with |training| = floor(alpha * n); deterministic in `seed`.
/// Throws ConfigError unless 1 <= floor(alpha * n) <= n - 1.
DataSplit split(const Dataset& data, double alpha, std::uint64_t seed);

/// Extracts the Z coordinates of a covariate vector.
std::vector<double> project(std::span<const double> x, std::span<const std::size_t> coords);

}  // namespace nmar

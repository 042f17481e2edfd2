#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nmar/data.hpp"
#include "nmar/kernels.hpp"
#include "nmar/simd.hpp"

namespace nmar {

/// Structure-of-arrays copy of a subset of dataset rows. Missing responses are
/// stored as 0 and masked by `delta`, so no estimator can read a hidden value.
struct RowColumns {
    simd::Columns x;
    simd::Columns z;
    std::vector<double> y;
    std::vector<double> delta;
    std::vector<double> delta_y;
    std::vector<std::size_t> source;
    double bound = 1.0;

    static RowColumns from(const Dataset& data, std::span<const std::size_t> rows);
    static RowColumns from(const Dataset& data);

    std::size_t size() const { return y.size(); }
    std::size_t dim() const { return x.size(); }
    std::size_t z_dim() const { return z.size(); }
    std::vector<double> point(std::size_t i) const;
    std::vector<double> z_point(std::size_t i) const;
    std::vector<std::size_t> observed_rows() const;
};

/// Which coordinates of a block a kernel operates on.
enum class Space { x, z };

/// Raw kernel sums of one query over a reference block.
struct WindowSums {
    double total = 0.0;       // sum_j K_j
    double observed = 0.0;    // sum_j Delta_j K_j
    double observed_y = 0.0;  // sum_j Delta_j Y_j K_j
};

/// Kernel weights of every row of `block` at query `q` (in the given space).
void weights_at(const RowColumns& block, Space space, const KernelSpec& kernel, double bw, std::span<const double> q,
                std::vector<double>& out);

/// Kernel neighborhoods of a set of query points over the observed rows of a
/// reference block. Per-query window sums cover all reference rows, observed or not.
///
/// Storage is compressed rows of the strictly positive weights; for a box kernel on a
/// single coordinate every window is a contiguous run of the coordinate-sorted
/// observed rows, and only the run bounds are kept (membership uses the same
/// floating-point test as the dense weights).
///
/// When `self` is given, query q excludes reference row self[q] (pass -1 for none),
/// which yields leave-one-out sums.
class Neighborhood {
public:
    static Neighborhood build(const RowColumns& queries, std::span<const std::size_t> query_rows,
                              const RowColumns& reference, Space space, const KernelSpec& kernel, double bw,
                              std::span<const std::ptrdiff_t> self = {});

    std::size_t size() const { return sums_.size(); }
    const WindowSums& sums(std::size_t q) const { return sums_[q]; }
    /// Reference row of each compact observed index.
    const std::vector<std::size_t>& observed_rows() const { return observed_rows_; }
    std::size_t nonzeros() const;
    bool intervals() const { return intervals_; }

    /// out[q * width + f] = sum_j w_qj * table[j * width + f] for every query, j over
    /// the compact observed index. `out` is resized.
    void accumulate_all(std::span<const double> table, std::size_t width, std::vector<double>& out) const;

private:
    bool intervals_ = false;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::uint32_t> index_;
    std::vector<double> weight_;
    std::vector<std::uint32_t> order_;
    std::vector<std::uint32_t> lo_;
    std::vector<std::uint32_t> hi_;
    std::vector<std::ptrdiff_t> self_;
    std::vector<WindowSums> sums_;
    std::vector<std::size_t> observed_rows_;
};

/// a / b, with the 0/0 (and x/0) convention returning 0.
inline double safe_ratio(double a, double b) { return b != 0.0 ? a / b : 0.0; }

}  // namespace nmar

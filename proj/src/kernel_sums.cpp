#include "nmar/kernel_sums.hpp"

#include <algorithm>

#include "nmar/errors.hpp"

namespace nmar {

RowColumns RowColumns::from(const Dataset& data, std::span<const std::size_t> rows) {
    RowColumns b;
    const std::size_t d = data.dim();
    const auto& zc = data.z_coords();
    b.bound = data.bound();
    b.x.assign(d, std::vector<double>(rows.size()));
    b.z.assign(zc.size(), std::vector<double>(rows.size()));
    b.y.resize(rows.size());
    b.delta.resize(rows.size());
    b.delta_y.resize(rows.size());
    b.source.assign(rows.begin(), rows.end());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& o = data[rows[i]];
        for (std::size_t k = 0; k < d; ++k) b.x[k][i] = o.x[k];
        for (std::size_t k = 0; k < zc.size(); ++k) b.z[k][i] = o.x[zc[k]];
        if (o.y) {
            b.y[i] = *o.y;
            b.delta[i] = 1.0;
            b.delta_y[i] = *o.y;
        }
    }
    return b;
}

RowColumns RowColumns::from(const Dataset& data) {
    std::vector<std::size_t> all(data.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return from(data, all);
}

std::vector<double> RowColumns::point(std::size_t i) const {
    std::vector<double> p(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) p[k] = x[k][i];
    return p;
}

std::vector<double> RowColumns::z_point(std::size_t i) const {
    std::vector<double> p(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) p[k] = z[k][i];
    return p;
}

std::vector<std::size_t> RowColumns::observed_rows() const {
    std::vector<std::size_t> r;
    for (std::size_t i = 0; i < size(); ++i) {
        if (delta[i] != 0.0) r.push_back(i);
    }
    return r;
}

void weights_at(const RowColumns& block, Space space, const KernelSpec& kernel, double bw, std::span<const double> q,
                std::vector<double>& out) {
    out.resize(block.size());
    const auto& cols = space == Space::x ? block.x : block.z;
    if (q.size() != cols.size()) throw ConfigError("query dimension does not match the data");
    simd::kernel_weights(kernel, bw, q, cols, out);
}

Neighborhood Neighborhood::build(const RowColumns& queries, std::span<const std::size_t> query_rows,
                                 const RowColumns& reference, Space space, const KernelSpec& kernel, double bw,
                                 std::span<const std::ptrdiff_t> self) {
    Neighborhood nb;
    nb.observed_rows_ = reference.observed_rows();
    nb.sums_.reserve(query_rows.size());

    const auto& qcols = space == Space::x ? queries.x : queries.z;
    const auto& rcols = space == Space::x ? reference.x : reference.z;
    nb.intervals_ = kernel.family() == KernelFamily::box && rcols.size() == 1;

    // Compact position of each reference row (-1 when unobserved).
    std::vector<std::ptrdiff_t> compact(reference.size(), -1);
    for (std::size_t c = 0; c < nb.observed_rows_.size(); ++c) compact[nb.observed_rows_[c]] = static_cast<std::ptrdiff_t>(c);

    std::vector<double> sorted;
    if (nb.intervals_) {
        nb.order_.resize(nb.observed_rows_.size());
        for (std::size_t c = 0; c < nb.order_.size(); ++c) nb.order_[c] = static_cast<std::uint32_t>(c);
        const auto& v = rcols[0];
        std::stable_sort(nb.order_.begin(), nb.order_.end(), [&](std::uint32_t a, std::uint32_t b) {
            return v[nb.observed_rows_[a]] < v[nb.observed_rows_[b]];
        });
        sorted.resize(nb.order_.size());
        for (std::size_t k = 0; k < sorted.size(); ++k) sorted[k] = v[nb.observed_rows_[nb.order_[k]]];
        nb.lo_.reserve(query_rows.size());
        nb.hi_.reserve(query_rows.size());
        nb.self_.reserve(query_rows.size());
    } else {
        nb.offsets_.reserve(query_rows.size() + 1);
    }

    std::vector<double> q(qcols.size());
    std::vector<double> w;
    double unit[1];
    for (std::size_t qi = 0; qi < query_rows.size(); ++qi) {
        const std::size_t row = query_rows[qi];
        for (std::size_t k = 0; k < q.size(); ++k) q[k] = qcols[k][row];
        weights_at(reference, space, kernel, bw, q, w);
        const std::ptrdiff_t excluded = self.empty() ? -1 : self[qi];
        if (excluded >= 0) w[static_cast<std::size_t>(excluded)] = 0.0;

        WindowSums s;
        s.total = simd::sum(w);
        s.observed = simd::dot(w, reference.delta);
        s.observed_y = simd::dot(w, reference.delta_y);
        nb.sums_.push_back(s);

        if (nb.intervals_) {
            // Same arithmetic as the dense weights, so membership matches exactly.
            auto inside = [&](double value) {
                const simd::Columns point{{value}};
                simd::kernel_weights(kernel, bw, q, point, unit);
                return unit[0] > 0.0;
            };
            const auto mid = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), q[0]) - sorted.begin());
            std::size_t seed = sorted.size();
            if (mid < sorted.size() && inside(sorted[mid])) {
                seed = mid;
            } else if (mid > 0 && inside(sorted[mid - 1])) {
                seed = mid - 1;
            }
            std::size_t lo = mid, hi = mid;
            if (seed < sorted.size()) {
                std::size_t a = 0, b = seed;  // first inside in [a, b]
                while (a < b) {
                    const std::size_t m = a + (b - a) / 2;
                    if (inside(sorted[m])) b = m; else a = m + 1;
                }
                lo = a;
                a = seed + 1;
                b = sorted.size();  // first outside in [a, b]
                while (a < b) {
                    const std::size_t m = a + (b - a) / 2;
                    if (inside(sorted[m])) a = m + 1; else b = m;
                }
                hi = a;
            }
            nb.lo_.push_back(static_cast<std::uint32_t>(lo));
            nb.hi_.push_back(static_cast<std::uint32_t>(hi));
            nb.self_.push_back(excluded >= 0 ? compact[static_cast<std::size_t>(excluded)] : -1);
        } else {
            for (std::size_t c = 0; c < nb.observed_rows_.size(); ++c) {
                const double wj = w[nb.observed_rows_[c]];
                if (wj > 0.0) {
                    nb.index_.push_back(static_cast<std::uint32_t>(c));
                    nb.weight_.push_back(wj);
                }
            }
            nb.offsets_.push_back(nb.index_.size());
        }
    }
    return nb;
}

std::size_t Neighborhood::nonzeros() const {
    if (!intervals_) return index_.size();
    std::size_t n = 0;
    for (std::size_t q = 0; q < lo_.size(); ++q) n += hi_[q] - lo_[q] - (self_[q] >= 0 ? 1 : 0);
    return n;
}

void Neighborhood::accumulate_all(std::span<const double> table, std::size_t width, std::vector<double>& out) const {
    out.assign(size() * width, 0.0);
    if (intervals_) {
        std::vector<double> prefix((order_.size() + 1) * width, 0.0);
        for (std::size_t k = 0; k < order_.size(); ++k) {
            const double* src = table.data() + static_cast<std::size_t>(order_[k]) * width;
            const double* prev = prefix.data() + k * width;
            double* dst = prefix.data() + (k + 1) * width;
            for (std::size_t f = 0; f < width; ++f) dst[f] = prev[f] + src[f];
        }
        for (std::size_t q = 0; q < size(); ++q) {
            double* o = out.data() + q * width;
            if (lo_[q] == hi_[q]) continue;
            const double* a = prefix.data() + static_cast<std::size_t>(lo_[q]) * width;
            const double* b = prefix.data() + static_cast<std::size_t>(hi_[q]) * width;
            for (std::size_t f = 0; f < width; ++f) o[f] = b[f] - a[f];
            if (self_[q] >= 0) {
                const double* own = table.data() + static_cast<std::size_t>(self_[q]) * width;
                for (std::size_t f = 0; f < width; ++f) o[f] -= own[f];
            }
        }
        return;
    }
    for (std::size_t q = 0; q < size(); ++q) {
        std::span<double> o(out.data() + q * width, width);
        for (std::size_t t = offsets_[q]; t < offsets_[q + 1]; ++t) {
            simd::axpy(weight_[t], table.subspan(static_cast<std::size_t>(index_[t]) * width, width), o);
        }
    }
}

}  // namespace nmar

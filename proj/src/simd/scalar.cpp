#include "nmar/simd.hpp"

namespace nmar::simd::scalar {

void kernel_weights(const KernelSpec& kernel, double h, std::span<const double> x, const Columns& points,
                    std::span<double> out) {
    const std::size_t d = x.size();
    for (std::size_t j = 0; j < out.size(); ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double u = (x[k] - points[k][j]) / h;
            s += u * u;
        }
        out[j] = kernel.profile(s);
    }
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double sum(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v;
    return s;
}

}  // namespace nmar::simd::scalar

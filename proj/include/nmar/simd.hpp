#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "nmar/kernels.hpp"

/// Inner loops shared by every estimator. Each primitive has a scalar reference
/// and an AVX2 variant; the active one is chosen at first use from the CPU
/// features (override with NMAR_SIMD=scalar|avx2 or set_backend()).
///
/// kernel_weights and axpy produce bit-identical results in both variants;
/// dot and sum agree up to summation order.
namespace nmar::simd {

enum class Backend { scalar, avx2 };

/// Column-major point block: columns[k][j] is coordinate k of point j.
using Columns = std::vector<std::vector<double>>;

bool supported(Backend backend);
Backend active_backend();
/// Throws ConfigError if the CPU lacks the requested instruction set.
void set_backend(Backend backend);
std::string_view backend_name(Backend backend);

/// out[j] = K((x - X_j) / h) for every point X_j in `points`; out.size() points are read.
void kernel_weights(const KernelSpec& kernel, double h, std::span<const double> x, const Columns& points,
                    std::span<double> out);
/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);

namespace scalar {
void kernel_weights(const KernelSpec& kernel, double h, std::span<const double> x, const Columns& points,
                    std::span<double> out);
void axpy(double a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
}  // namespace scalar

namespace avx2 {
void kernel_weights(const KernelSpec& kernel, double h, std::span<const double> x, const Columns& points,
                    std::span<double> out);
void axpy(double a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
}  // namespace avx2

}  // namespace nmar::simd

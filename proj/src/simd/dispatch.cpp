#include <atomic>
#include <cstdlib>
#include <string>

#include "nmar/errors.hpp"
#include "nmar/simd.hpp"

namespace nmar::simd {

namespace {

Backend detect() {
    if (const char* env = std::getenv("NMAR_SIMD")) {
        const std::string v(env);
        if (v == "scalar") return Backend::scalar;
        if (v == "avx2" && supported(Backend::avx2)) return Backend::avx2;
    }
    return supported(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
    static std::atomic<Backend> backend{detect()};
    return backend;
}

}  // namespace

bool supported(Backend backend) {
    switch (backend) {
        case Backend::scalar: return true;
        case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
    if (!supported(backend)) throw ConfigError("SIMD backend '" + std::string(backend_name(backend)) + "' not supported");
    current().store(backend, std::memory_order_relaxed);
}

std::string_view backend_name(Backend backend) {
    return backend == Backend::avx2 ? "avx2" : "scalar";
}

void kernel_weights(const KernelSpec& kernel, double h, std::span<const double> x, const Columns& points,
                    std::span<double> out) {
    if (active_backend() == Backend::avx2) return avx2::kernel_weights(kernel, h, x, points, out);
    scalar::kernel_weights(kernel, h, x, points, out);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    if (active_backend() == Backend::avx2) return avx2::axpy(a, x, y);
    scalar::axpy(a, x, y);
}

double dot(std::span<const double> a, std::span<const double> b) {
    return active_backend() == Backend::avx2 ? avx2::dot(a, b) : scalar::dot(a, b);
}

double sum(std::span<const double> a) {
    return active_backend() == Backend::avx2 ? avx2::sum(a) : scalar::sum(a);
}

}  // namespace nmar::simd

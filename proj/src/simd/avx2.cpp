#include "nmar/simd.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define NMAR_HAVE_X86 1
#else
#define NMAR_HAVE_X86 0
#endif

namespace nmar::simd::avx2 {

#if NMAR_HAVE_X86

// Functions carry the target attribute instead of compiling the file with -mavx2,
// so that no AVX2 code can leak into shared inline functions.

__attribute__((target("avx2"))) void kernel_weights(const KernelSpec& kernel, double h, std::span<const double> x,
                                                    const Columns& points, std::span<double> out) {
    const std::size_t n = out.size();
    const std::size_t d = x.size();
    const double p = kernel.param();
    const __m256d vh = _mm256_set1_pd(h);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d radius_sq = _mm256_set1_pd(p * p);
    const __m256d radius = _mm256_set1_pd(p);
    const KernelFamily family = kernel.family();

    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d s = zero;
        for (std::size_t k = 0; k < d; ++k) {
            const __m256d u = _mm256_div_pd(_mm256_sub_pd(_mm256_set1_pd(x[k]), _mm256_loadu_pd(points[k].data() + j)), vh);
            s = _mm256_add_pd(s, _mm256_mul_pd(u, u));
        }
        switch (family) {
            case KernelFamily::box:
                _mm256_storeu_pd(out.data() + j, _mm256_and_pd(_mm256_cmp_pd(s, radius_sq, _CMP_LE_OQ), one));
                break;
            case KernelFamily::triangle: {
                const __m256d t = _mm256_div_pd(_mm256_sqrt_pd(s), radius);
                _mm256_storeu_pd(out.data() + j, _mm256_max_pd(zero, _mm256_sub_pd(one, t)));
                break;
            }
            case KernelFamily::truncated_gaussian: {
                alignas(32) double lanes[4];
                _mm256_store_pd(lanes, s);
                for (int l = 0; l < 4; ++l) out[j + l] = kernel.profile(lanes[l]);
                break;
            }
        }
    }
    for (; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double u = (x[k] - points[k][j]) / h;
            s += u * u;
        }
        out[j] = kernel.profile(s);
    }
}

__attribute__((target("avx2"))) void axpy(double a, std::span<const double> x, std::span<double> y) {
    const std::size_t n = y.size();
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d y0 = _mm256_add_pd(_mm256_loadu_pd(y.data() + i), _mm256_mul_pd(va, _mm256_loadu_pd(x.data() + i)));
        const __m256d y1 =
            _mm256_add_pd(_mm256_loadu_pd(y.data() + i + 4), _mm256_mul_pd(va, _mm256_loadu_pd(x.data() + i + 4)));
        _mm256_storeu_pd(y.data() + i, y0);
        _mm256_storeu_pd(y.data() + i + 4, y1);
    }
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y.data() + i,
                         _mm256_add_pd(_mm256_loadu_pd(y.data() + i), _mm256_mul_pd(va, _mm256_loadu_pd(x.data() + i))));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2"))) double dot(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i + 4), _mm256_loadu_pd(b.data() + i + 4)));
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc0);
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

__attribute__((target("avx2"))) double sum(std::span<const double> a) {
    const std::size_t n = a.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a.data() + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a.data() + i + 4));
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc0);
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) s += a[i];
    return s;
}

#else

void kernel_weights(const KernelSpec& kernel, double h, std::span<const double> x, const Columns& points,
                    std::span<double> out) {
    scalar::kernel_weights(kernel, h, x, points, out);
}
void axpy(double a, std::span<const double> x, std::span<double> y) { scalar::axpy(a, x, y); }
double dot(std::span<const double> a, std::span<const double> b) { return scalar::dot(a, b); }
double sum(std::span<const double> a) { return scalar::sum(a); }

#endif

}  // namespace nmar::simd::avx2

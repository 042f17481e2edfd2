#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "nmar/errors.hpp"
#include "nmar/kernels.hpp"
#include "nmar/simd.hpp"

using namespace nmar;

namespace {

std::vector<KernelSpec> families() {
    return {KernelSpec::box(), KernelSpec::triangle(), KernelSpec::truncated_gaussian(),
            KernelSpec::box(0.7), KernelSpec::triangle(2.0), KernelSpec::truncated_gaussian(0.4)};
}

double at_norm(const KernelSpec& k, double r, std::size_t d = 1) {
    std::vector<double> u(d, 0.0);
    u[0] = r;
    return k(u);
}

// Independent closed forms of the shipped families.
double closed_form(const KernelSpec& k, double norm) {
    const double p = k.param();
    switch (k.family()) {
        case KernelFamily::box: return norm <= p ? 1.0 : 0.0;
        case KernelFamily::triangle: return norm < p ? 1.0 - norm / p : 0.0;
        case KernelFamily::truncated_gaussian: return norm <= 3.0 * p ? std::exp(-0.5 * (norm / p) * (norm / p)) : 0.0;
    }
    return -1.0;
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST(Kernel, Examples) {
    EXPECT_EQ(at_norm(KernelSpec::box(), 0.0), 1.0);
    EXPECT_EQ(at_norm(KernelSpec::box(), 1.5), 0.0);
    EXPECT_EQ(at_norm(KernelSpec::box(), 1.0), 1.0);
    EXPECT_DOUBLE_EQ(at_norm(KernelSpec::triangle(), 0.25), 0.75);
    EXPECT_DOUBLE_EQ(eval(KernelSpec::truncated_gaussian(), std::vector<double>{0.6, 0.8}), std::exp(-0.5));
}

TEST(Kernel, RegularityConstants) {
    EXPECT_EQ(KernelSpec::box().r(), 1.0);
    EXPECT_EQ(KernelSpec::box().b(), 1.0);
    EXPECT_EQ(KernelSpec::triangle().r(), 0.5);
    EXPECT_EQ(KernelSpec::triangle().b(), 0.5);
    EXPECT_EQ(KernelSpec::truncated_gaussian(2.0).r(), 2.0);
    EXPECT_DOUBLE_EQ(KernelSpec::truncated_gaussian().b(), std::exp(-0.5));
}

TEST(Kernel, LowerBoundOnRegularityBallAndZeroOutside) {
    for (const auto& k : families()) {
        for (int i = 0; i <= 1000; ++i) {
            const double r = k.r() * i / 1000.0;
            EXPECT_GE(at_norm(k, r), k.b()) << k.name() << " at " << r;
            EXPECT_GE(at_norm(k, r, 3), k.b());
        }
        for (int i = 1; i <= 1000; ++i) {
            const double r = k.support_radius() * (1.0 + 2.0 * i / 1000.0);
            EXPECT_EQ(at_norm(k, r), 0.0) << k.name() << " at " << r;
        }
    }
}

TEST(Kernel, MatchesClosedFormAndIsSymmetric) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (const auto& k : families()) {
        for (int t = 0; t < 500; ++t) {
            std::vector<double> u{nd(rng), nd(rng)};
            std::vector<double> neg{-u[0], -u[1]};
            const double norm = std::hypot(u[0], u[1]);
            EXPECT_NEAR(k(u), closed_form(k, norm), 1e-14);
            EXPECT_EQ(k(u), k(neg));
            EXPECT_GE(k(u), 0.0);
        }
    }
}

TEST(Kernel, FromName) {
    EXPECT_EQ(KernelSpec::from_name("box"), KernelSpec::box());
    EXPECT_EQ(KernelSpec::from_name("triangle", 2.0), KernelSpec::triangle(2.0));
    EXPECT_EQ(KernelSpec::from_name("truncated_gaussian"), KernelSpec::truncated_gaussian());
    EXPECT_THROW(KernelSpec::from_name("epanechnikov"), ConfigError);
    EXPECT_THROW(KernelSpec::box(-1.0), ConfigError);
}

TEST(Bandwidth, Examples) {
    for (std::size_t n : {1u, 10u, 1000u}) EXPECT_EQ(bandwidth(BandwidthPolicy::fixed(0.3), n, 1), 0.3);
    EXPECT_NEAR(bandwidth(BandwidthPolicy::power_rule(1.0, 0.2), 32, 1), 0.5, 1e-15);
    EXPECT_THROW(bandwidth(BandwidthPolicy::power_rule(1.0, 1.0), 32, 1), ConfigError);
    EXPECT_THROW(bandwidth(BandwidthPolicy::power_rule(1.0, 0.3), 32, 4), ConfigError);
    EXPECT_THROW(bandwidth(BandwidthPolicy::fixed(0.0), 32, 1), ConfigError);
    EXPECT_NEAR(BandwidthPolicy::classical(1, 1.0).beta, 0.2, 1e-15);
}

TEST(Bandwidth, PowerRuleMonotonicity) {
    for (std::size_t d : {1u, 2u, 3u}) {
        const auto pol = BandwidthPolicy::classical(d, 0.8);
        double prev_h = INFINITY, prev_mass = 0.0;
        for (std::size_t n = 1; n < 100000; n = n * 3 + 1) {
            const double h = bandwidth(pol, n, d);
            const double mass = static_cast<double>(n) * std::pow(h, static_cast<double>(d));
            EXPECT_LE(h, prev_h);
            EXPECT_GE(mass, prev_mass);
            prev_h = h;
            prev_mass = mass;
        }
    }
}

class SimdEquivalence : public ::testing::Test {
protected:
    void SetUp() override {
        if (!simd::supported(simd::Backend::avx2)) GTEST_SKIP() << "AVX2 not available";
    }
};

TEST_F(SimdEquivalence, KernelWeightsBitIdentical) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const auto& k : families()) {
        for (std::size_t d : {1u, 2u, 3u}) {
            for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 33u, 257u}) {
                simd::Columns pts(d, std::vector<double>(n));
                for (auto& c : pts) for (auto& v : c) v = u(rng);
                // A few points exactly on the support boundary.
                if (n > 2) pts[0][1] = k.support_radius() * 0.5;
                std::vector<double> x(d, 0.0);
                std::vector<double> a(n), b(n);
                simd::scalar::kernel_weights(k, 0.5, x, pts, a);
                simd::avx2::kernel_weights(k, 0.5, x, pts, b);
                for (std::size_t j = 0; j < n; ++j) {
                    EXPECT_TRUE(bit_equal(a[j], b[j])) << k.name() << " d=" << d << " j=" << j;
                    if (n > 2 && j == 1) continue;  // boundary point: rounding decides membership
                    double sq = 0.0;
                    for (std::size_t c = 0; c < d; ++c) sq += (pts[c][j] / 0.5) * (pts[c][j] / 0.5);
                    EXPECT_NEAR(a[j], closed_form(k, std::sqrt(sq)), 1e-12);
                }
            }
        }
    }
}

TEST_F(SimdEquivalence, AxpyBitIdenticalDotSumClose) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 8u, 15u, 64u, 1001u}) {
        std::vector<double> x(n), y(n);
        for (auto& v : x) v = u(rng);
        for (auto& v : y) v = u(rng);
        auto y1 = y, y2 = y;
        simd::scalar::axpy(0.37, x, y1);
        simd::avx2::axpy(0.37, x, y2);
        for (std::size_t j = 0; j < n; ++j) {
            EXPECT_TRUE(bit_equal(y1[j], y2[j]));
            EXPECT_EQ(y1[j], y[j] + 0.37 * x[j]);
        }
        double ref_dot = 0.0, ref_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            ref_dot += x[j] * y[j];
            ref_sum += x[j];
        }
        EXPECT_NEAR(simd::scalar::dot(x, y), ref_dot, 1e-12);
        EXPECT_NEAR(simd::avx2::dot(x, y), ref_dot, 1e-12);
        EXPECT_NEAR(simd::scalar::sum(x), ref_sum, 1e-12);
        EXPECT_NEAR(simd::avx2::sum(x), ref_sum, 1e-12);
    }
}

TEST_F(SimdEquivalence, BackendSwitch) {
    const auto before = simd::active_backend();
    simd::set_backend(simd::Backend::scalar);
    EXPECT_EQ(simd::active_backend(), simd::Backend::scalar);
    simd::set_backend(simd::Backend::avx2);
    EXPECT_EQ(simd::active_backend(), simd::Backend::avx2);
    simd::set_backend(before);
}

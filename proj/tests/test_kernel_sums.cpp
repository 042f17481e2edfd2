#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nmar/kernel_sums.hpp"
#include "support.hpp"

using namespace nmar;
using nmar::testing::random_data;

namespace {

struct Case {
    KernelSpec kernel;
    std::size_t d;
    bool intervals;
};

// Direct double loop: sum over observed reference rows j != self of K_qj * table[j].
std::vector<double> brute(const RowColumns& queries, std::span<const std::size_t> rows, const RowColumns& ref,
                          const KernelSpec& k, double bw, std::span<const std::ptrdiff_t> self,
                          const std::vector<double>& table, std::size_t width, std::vector<WindowSums>& sums) {
    const auto obs = ref.observed_rows();
    std::vector<double> out(rows.size() * width, 0.0);
    sums.assign(rows.size(), {});
    for (std::size_t q = 0; q < rows.size(); ++q) {
        for (std::size_t j = 0; j < ref.size(); ++j) {
            if (!self.empty() && self[q] == static_cast<std::ptrdiff_t>(j)) continue;
            std::vector<double> u(ref.dim());
            for (std::size_t c = 0; c < ref.dim(); ++c) u[c] = (queries.x[c][rows[q]] - ref.x[c][j]) / bw;
            const double w = k(u);
            sums[q].total += w;
            sums[q].observed += w * ref.delta[j];
            sums[q].observed_y += w * ref.delta_y[j];
        }
        for (std::size_t c = 0; c < obs.size(); ++c) {
            const std::size_t j = obs[c];
            if (!self.empty() && self[q] == static_cast<std::ptrdiff_t>(j)) continue;
            std::vector<double> u(ref.dim());
            for (std::size_t t = 0; t < ref.dim(); ++t) u[t] = (queries.x[t][rows[q]] - ref.x[t][j]) / bw;
            const double w = k(u);
            for (std::size_t f = 0; f < width; ++f) out[q * width + f] += w * table[c * width + f];
        }
    }
    return out;
}

}  // namespace

TEST(Neighborhood, MatchesDirectSums) {
    const std::vector<Case> cases{{KernelSpec::box(), 1, true},
                                  {KernelSpec::box(), 2, false},
                                  {KernelSpec::triangle(), 1, false},
                                  {KernelSpec::truncated_gaussian(0.5), 2, false}};
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const auto& c : cases) {
        for (int rep = 0; rep < 5; ++rep) {
            const auto data = random_data(rng, 150, c.d, 0.35);
            const auto ref = RowColumns::from(data);
            std::vector<std::size_t> rows;
            std::vector<std::ptrdiff_t> self;
            for (std::size_t i = 0; i < ref.size(); i += 2) {
                rows.push_back(i);
                self.push_back(rep % 2 == 0 ? static_cast<std::ptrdiff_t>(i) : -1);
            }
            if (rep % 2 == 1) self.clear();
            const double bw = 0.15;
            const auto nb = Neighborhood::build(ref, rows, ref, Space::x, c.kernel, bw, self);
            EXPECT_EQ(nb.intervals(), c.intervals);
            ASSERT_EQ(nb.size(), rows.size());

            const std::size_t width = 3;
            std::vector<double> table(nb.observed_rows().size() * width);
            for (auto& v : table) v = u(rng);
            std::vector<double> got;
            nb.accumulate_all(table, width, got);
            std::vector<WindowSums> sums;
            const auto want = brute(ref, rows, ref, c.kernel, bw, self, table, width, sums);
            ASSERT_EQ(got.size(), want.size());
            for (std::size_t t = 0; t < got.size(); ++t) EXPECT_NEAR(got[t], want[t], 1e-12);
            for (std::size_t q = 0; q < rows.size(); ++q) {
                EXPECT_NEAR(nb.sums(q).total, sums[q].total, 1e-12);
                EXPECT_NEAR(nb.sums(q).observed, sums[q].observed, 1e-12);
                EXPECT_NEAR(nb.sums(q).observed_y, sums[q].observed_y, 1e-12);
            }
        }
    }
}

TEST(Neighborhood, EmptyWindowsAndNoObservedRows) {
    std::mt19937_64 rng(4);
    const auto data = random_data(rng, 40, 1, 1.0);  // nothing observed
    const auto ref = RowColumns::from(data);
    std::vector<std::size_t> rows{0, 1, 2};
    const auto nb = Neighborhood::build(ref, rows, ref, Space::x, KernelSpec::box(), 0.2);
    EXPECT_TRUE(nb.observed_rows().empty());
    std::vector<double> out;
    nb.accumulate_all({}, 2, out);
    EXPECT_EQ(out, std::vector<double>(6, 0.0));
    EXPECT_GT(nb.sums(0).total, 0.0);
    EXPECT_EQ(nb.sums(0).observed, 0.0);
    EXPECT_EQ(nb.nonzeros(), 0u);
}

TEST(RowColumns, MasksMissingResponses) {
    const auto d = nmar::testing::line_data({0.1, 0.2}, {0.5, std::nullopt}, 1.0);
    const auto rc = RowColumns::from(d);
    EXPECT_EQ(rc.y[1], 0.0);
    EXPECT_EQ(rc.delta[1], 0.0);
    EXPECT_EQ(rc.delta_y[0], 0.5);
    EXPECT_EQ(rc.observed_rows(), std::vector<std::size_t>{0});
    EXPECT_EQ(safe_ratio(0.0, 0.0), 0.0);
    EXPECT_EQ(safe_ratio(1.0, 0.0), 0.0);
}

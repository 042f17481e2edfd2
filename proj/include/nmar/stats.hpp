#pragma once

#include <span>
#include <vector>

namespace nmar {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares of y on x; throws ConfigError for fewer than 2 points
/// or constant x. r_squared is 1 when y is constant.
LineFit ols(std::span<const double> x, std::span<const double> y);

/// Median (mean of the middle pair for even sizes); NaN for an empty input.
double median(std::vector<double> values);
/// Third minus first quartile, linear interpolation between order statistics.
double iqr(std::vector<double> values);

}  // namespace nmar

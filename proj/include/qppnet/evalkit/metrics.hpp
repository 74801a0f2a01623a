#pragma once

#include <span>
#include <utility>
#include <vector>

namespace qppnet::evalkit {

// Predictions below this many seconds are raised to it before any ratio is
// formed. Raw predictions are kept everywhere else.
inline constexpr double kRatioFloorSeconds = 1e-6;

// mean(|actual - predicted| / actual). Throws MetricError when an actual
// latency is <= 0, UsageError on size mismatch or empty input.
double relative_error(std::span<const double> actual, std::span<const double> predicted);

// mean(|actual - predicted|), in the units of the inputs.
double mean_absolute_error(std::span<const double> actual, std::span<const double> predicted);

// max(actual / predicted, predicted / actual) with predicted clamped below
// at kRatioFloorSeconds. Throws MetricError when actual <= 0.
double r_factor(double actual, double predicted);

std::vector<double> r_factors(std::span<const double> actual, std::span<const double> predicted);

// Shares of R <= 1.5, 1.5 < R < 2.0 and R >= 2.0.
struct FactorBuckets {
  double within_1_5 = 0.0;
  double between_1_5_and_2 = 0.0;
  double beyond_2 = 0.0;
};

FactorBuckets factor_buckets(std::span<const double> r_values);

// Point (k / n, R_(k)) for the k-th smallest R, k = 1..n.
std::vector<std::pair<double, double>> cdf_points(std::span<const double> r_values);

// Smallest R whose CDF fraction reaches q (0 < q <= 1).
double cdf_quantile(std::span<const std::pair<double, double>> cdf, double q);

}  // namespace qppnet::evalkit

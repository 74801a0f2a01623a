#include "qppnet/evalkit/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "qppnet/error.hpp"

namespace qppnet::evalkit {

namespace {

void check_pairs(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) {
    throw UsageError(fmt::format("{} actual values but {} predictions", actual.size(),
                                 predicted.size()));
  }
  if (actual.empty()) throw UsageError("metrics need at least one prediction");
}

}  // namespace

double relative_error(std::span<const double> actual, std::span<const double> predicted) {
  check_pairs(actual, predicted);
  double total = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (!(actual[i] > 0.0)) {
      throw MetricError(fmt::format("actual latency {} at index {} is not positive", actual[i], i));
    }
    total += std::abs(actual[i] - predicted[i]) / actual[i];
  }
  return total / static_cast<double>(actual.size());
}

double mean_absolute_error(std::span<const double> actual, std::span<const double> predicted) {
  check_pairs(actual, predicted);
  double total = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) total += std::abs(actual[i] - predicted[i]);
  return total / static_cast<double>(actual.size());
}

double r_factor(double actual, double predicted) {
  if (!(actual > 0.0)) throw MetricError(fmt::format("actual latency {} is not positive", actual));
  const double p = std::max(predicted, kRatioFloorSeconds);
  return std::max(actual / p, p / actual);
}

std::vector<double> r_factors(std::span<const double> actual, std::span<const double> predicted) {
  check_pairs(actual, predicted);
  std::vector<double> out;
  out.reserve(actual.size());
  for (std::size_t i = 0; i < actual.size(); ++i) out.push_back(r_factor(actual[i], predicted[i]));
  return out;
}

FactorBuckets factor_buckets(std::span<const double> r_values) {
  if (r_values.empty()) throw UsageError("factor_buckets needs at least one value");
  std::size_t low = 0, mid = 0, high = 0;
  for (double r : r_values) {
    if (r <= 1.5) {
      ++low;
    } else if (r < 2.0) {
      ++mid;
    } else {
      ++high;
    }
  }
  const double n = static_cast<double>(r_values.size());
  return {static_cast<double>(low) / n, static_cast<double>(mid) / n,
          static_cast<double>(high) / n};
}

std::vector<std::pair<double, double>> cdf_points(std::span<const double> r_values) {
  if (r_values.empty()) throw UsageError("cdf_points needs at least one value");
  std::vector<double> sorted(r_values.begin(), r_values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<std::pair<double, double>> out;
  out.reserve(sorted.size());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    out.emplace_back(static_cast<double>(k + 1) / n, sorted[k]);
  }
  return out;
}

double cdf_quantile(std::span<const std::pair<double, double>> cdf, double q) {
  if (cdf.empty()) throw UsageError("empty cdf");
  if (!(q > 0.0 && q <= 1.0)) throw UsageError("quantile must be in (0, 1]");
  for (const auto& [fraction, r] : cdf) {
    // Tolerate k/n rounding when q is exactly a grid point.
    if (fraction >= q - 1e-12) return r;
  }
  return cdf.back().second;
}

}  // namespace qppnet::evalkit

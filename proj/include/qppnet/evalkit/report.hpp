#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qppnet/evalkit/metrics.hpp"
#include "qppnet/ingest/plan.hpp"

namespace qppnet::evalkit {

// Query-level (root) accuracy of one predictor on one set of plans.
struct EvalReport {
  std::size_t query_count = 0;
  double relative_error = 0.0;
  double mean_absolute_error = 0.0;
  std::vector<double> r_values;
  FactorBuckets buckets;
  std::vector<std::pair<double, double>> cdf;
  // Empty when the plans carry no template tags.
  std::map<std::string, double> per_template_mae;
  // Predictions raised to kRatioFloorSeconds for the ratio metrics.
  std::size_t clamped_predictions = 0;
};

// predicted[i] belongs to plans[i]; actual values are the root latencies.
// Throws MetricError when a root latency is missing or not positive.
EvalReport evaluate_predictions(std::span<const ingest::PlanTree> plans,
                                std::span<const double> predicted);

nlohmann::json to_json(const EvalReport& report);

// "fraction,r" rows of the R(q) CDF.
std::string cdf_csv(const EvalReport& report);
// "template,queries,mae_seconds" rows.
std::string per_template_csv(const EvalReport& report,
                             std::span<const ingest::PlanTree> plans);

}  // namespace qppnet::evalkit

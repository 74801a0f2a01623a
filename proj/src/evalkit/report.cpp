#include "qppnet/evalkit/report.hpp"

#include <cmath>

#include <fmt/format.h>

#include "qppnet/error.hpp"

namespace qppnet::evalkit {

EvalReport evaluate_predictions(std::span<const ingest::PlanTree> plans,
                                std::span<const double> predicted) {
  if (plans.size() != predicted.size()) {
    throw UsageError(fmt::format("{} plans but {} predictions", plans.size(), predicted.size()));
  }
  std::vector<double> actual;
  actual.reserve(plans.size());
  for (const auto& t : plans) {
    if (!t.root.latency) throw MetricError(fmt::format("plan '{}' has no root latency", t.id));
    actual.push_back(*t.root.latency);
  }

  EvalReport r;
  r.query_count = plans.size();
  r.relative_error = relative_error(actual, predicted);
  r.mean_absolute_error = mean_absolute_error(actual, predicted);
  r.r_values = r_factors(actual, predicted);
  r.buckets = factor_buckets(r.r_values);
  r.cdf = cdf_points(r.r_values);
  for (double p : predicted) {
    if (p < kRatioFloorSeconds) ++r.clamped_predictions;
  }

  std::map<std::string, std::pair<double, std::size_t>> by_template;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    if (plans[i].template_name.empty()) continue;
    auto& [sum, count] = by_template[plans[i].template_name];
    sum += std::abs(actual[i] - predicted[i]);
    ++count;
  }
  for (const auto& [name, acc] : by_template) {
    r.per_template_mae[name] = acc.first / static_cast<double>(acc.second);
  }
  return r;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json cdf = nlohmann::json::array();
  for (const auto& [f, r] : report.cdf) cdf.push_back({f, r});
  return {{"query_count", report.query_count},
          {"relative_error", report.relative_error},
          {"mean_absolute_error", report.mean_absolute_error},
          {"buckets",
           {{"r_le_1.5", report.buckets.within_1_5},
            {"1.5_lt_r_lt_2.0", report.buckets.between_1_5_and_2},
            {"r_ge_2.0", report.buckets.beyond_2}}},
          {"r_values", report.r_values},
          {"cdf", cdf},
          {"per_template_mae", report.per_template_mae},
          {"clamped_predictions", report.clamped_predictions}};
}

std::string cdf_csv(const EvalReport& report) {
  std::string out = "fraction,r\n";
  for (const auto& [f, r] : report.cdf) out += fmt::format("{},{}\n", f, r);
  return out;
}

std::string per_template_csv(const EvalReport& report, std::span<const ingest::PlanTree> plans) {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : plans) {
    if (!t.template_name.empty()) ++counts[t.template_name];
  }
  std::string out = "template,queries,mae_seconds\n";
  for (const auto& [name, mae] : report.per_template_mae) {
    out += fmt::format("{},{},{}\n", name, counts[name], mae);
  }
  return out;
}

}  // namespace qppnet::evalkit

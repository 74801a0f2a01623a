#pragma once

#include <array>
#include <span>
#include <string>

#include "json.hpp"
#include "qppnet/ingest/plan.hpp"

namespace qppnet::evalkit {

// Calibrated optimizer cost model: latency as a linear function of the root
// node's optimizer estimates,
//
//   latency = intercept + c0 * total-cost + c1 * plan-rows + c2 * plan-width
//
// fitted by ordinary least squares. Missing estimates count as zero.
class CalibratedCostModel {
 public:
  enum class Form { full, cost_only, intercept_only };

  static constexpr std::array<const char*, 3> kFeatures = {"total-cost", "plan-rows",
                                                           "plan-width"};

  // Fits on root latencies. When the design matrix is rank deficient the
  // fit falls back to latency = c0 * total-cost, and to the mean latency
  // when every total cost is zero. Throws FitError when the corpus is empty
  // or a root lacks a latency.
  static CalibratedCostModel fit(std::span<const ingest::PlanTree> corpus);

  double predict(const ingest::PlanTree& tree) const;

  bool fitted() const { return fitted_; }
  Form form() const { return form_; }
  double intercept() const { return intercept_; }
  const std::array<double, 3>& coefficients() const { return coef_; }

  // Root features in kFeatures order.
  static std::array<double, 3> features(const ingest::PlanTree& tree);

  nlohmann::json to_json() const;

 private:
  bool fitted_ = false;
  Form form_ = Form::full;
  double intercept_ = 0.0;
  std::array<double, 3> coef_{};
};

}  // namespace qppnet::evalkit

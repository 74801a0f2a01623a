#include "qppnet/evalkit/baseline.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "qppnet/error.hpp"

namespace qppnet::evalkit {

std::array<double, 3> CalibratedCostModel::features(const ingest::PlanTree& tree) {
  std::array<double, 3> f{};
  for (std::size_t i = 0; i < kFeatures.size(); ++i) {
    f[i] = tree.root.numeric(kFeatures[i]).value_or(0.0);
  }
  return f;
}

CalibratedCostModel CalibratedCostModel::fit(std::span<const ingest::PlanTree> corpus) {
  if (corpus.empty()) throw FitError("cannot calibrate a cost model on an empty corpus");
  const auto n = static_cast<Eigen::Index>(corpus.size());
  Eigen::MatrixXd x(n, 4);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& tree = corpus[static_cast<std::size_t>(i)];
    if (!tree.root.latency) {
      throw FitError(fmt::format("plan '{}' has no root latency", tree.id));
    }
    const auto f = features(tree);
    x(i, 0) = 1.0;
    for (int j = 0; j < 3; ++j) x(i, j + 1) = f[static_cast<std::size_t>(j)];
    y(i) = *tree.root.latency;
  }

  CalibratedCostModel m;
  m.fitted_ = true;

  // Scale columns so the rank test is not dominated by the cost magnitude.
  Eigen::VectorXd scale = x.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < scale.size(); ++j) {
    if (scale(j) == 0.0) scale(j) = 1.0;
  }
  const Eigen::MatrixXd xs = x * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
  qr.setThreshold(1e-10);
  if (qr.rank() == 4) {
    const Eigen::VectorXd beta = scale.cwiseInverse().asDiagonal() * qr.solve(y);
    m.form_ = Form::full;
    m.intercept_ = beta(0);
    for (int j = 0; j < 3; ++j) m.coef_[static_cast<std::size_t>(j)] = beta(j + 1);
  } else {
    const double cc = x.col(1).squaredNorm();
    if (cc > 0.0) {
      m.form_ = Form::cost_only;
      m.coef_[0] = x.col(1).dot(y) / cc;
    } else {
      m.form_ = Form::intercept_only;
      m.intercept_ = y.mean();
    }
  }
  for (double c : m.coef_) {
    if (!std::isfinite(c)) throw FitError("calibrated cost model has non-finite coefficients");
  }
  if (!std::isfinite(m.intercept_))
    throw FitError("calibrated cost model has a non-finite intercept");
  return m;
}

double CalibratedCostModel::predict(const ingest::PlanTree& tree) const {
  if (!fitted_) throw FitError("calibrated cost model is not fitted");
  const auto f = features(tree);
  double y = intercept_;
  for (std::size_t j = 0; j < f.size(); ++j) y += coef_[j] * f[j];
  return y;
}

nlohmann::json CalibratedCostModel::to_json() const {
  const char* form = form_ == Form::full        ? "full"
                     : form_ == Form::cost_only ? "cost-only"
                                                : "intercept-only";
  nlohmann::json coef = nlohmann::json::object();
  for (std::size_t j = 0; j < kFeatures.size(); ++j) coef[kFeatures[j]] = coef_[j];
  return {{"form", form}, {"intercept", intercept_}, {"coefficients", coef}};
}

}  // namespace qppnet::evalkit

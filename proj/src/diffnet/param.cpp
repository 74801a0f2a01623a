#include "qppnet/diffnet/param.hpp"

#include <cmath>

namespace qppnet::diffnet {

namespace {

Tensor zeros_like(const Tensor& t) {
  return t.rank() == 1 ? Tensor::zeros(t.cols()) : Tensor::zeros(t.rows(), t.cols());
}

}  // namespace

Param::Param(std::string id, Tensor value)
    : id_(std::move(id)),
      value_(std::move(value)),
      grad_(zeros_like(value_)),
      momentum_(zeros_like(value_)) {}

void Param::assign(Tensor value) {
  const bool reshape = !value.same_shape(value_);
  value_ = std::move(value);
  if (reshape) {
    grad_ = zeros_like(value_);
    momentum_ = zeros_like(value_);
  }
}

void init_uniform_fan_in(Tensor& t, std::size_t fan_in, SplitMix64& rng) {
  const double bound = fan_in == 0 ? 0.0 : std::sqrt(1.0 / static_cast<double>(fan_in));
  for (double& v : t.data()) v = (2.0 * rng.uniform() - 1.0) * bound;
}

}  // namespace qppnet::diffnet

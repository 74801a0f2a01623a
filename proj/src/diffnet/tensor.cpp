#include "qppnet/diffnet/tensor.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "qppnet/error.hpp"

namespace qppnet::diffnet {

namespace {

void require_finite(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw DimensionError(fmt::format("tensor entry {} is not finite", i));
    }
  }
}

}  // namespace

Tensor::Tensor(std::vector<double> values)
    : data_(std::move(values)), rows_(1), cols_(data_.size()), rank_(1) {
  require_finite(data_);
}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> values)
    : data_(std::move(values)), rows_(rows), cols_(cols), rank_(2) {
  if (rows * cols != data_.size()) {
    throw DimensionError(fmt::format("tensor dims {}x{} do not match {} values", rows,
                                     cols, data_.size()));
  }
  require_finite(data_);
}

Tensor Tensor::zeros(std::size_t length) {
  Tensor t;
  t.data_.assign(length, 0.0);
  t.rows_ = 1;
  t.cols_ = length;
  t.rank_ = 1;
  return t;
}

Tensor Tensor::zeros(std::size_t rows, std::size_t cols) {
  Tensor t;
  t.data_.assign(rows * cols, 0.0);
  t.rows_ = rows;
  t.cols_ = cols;
  t.rank_ = 2;
  return t;
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

}  // namespace qppnet::diffnet

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qppnet::diffnet {

// Dense row-major array of doubles with rank 1 (n) or rank 2 (rows x cols).
// A rank-1 tensor of length n reports rows() == 1 and cols() == n so that
// graph code can treat every value as a (batch x width) matrix.
class Tensor {
 public:
  Tensor() = default;

  // Rank-1 tensor; throws DimensionError on NaN/Inf entries.
  explicit Tensor(std::vector<double> values);
  // Rank-2 tensor; throws DimensionError when rows*cols != values.size()
  // or on NaN/Inf entries.
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Tensor zeros(std::size_t length);
  static Tensor zeros(std::size_t rows, std::size_t cols);

  int rank() const { return rank_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  bool same_shape(const Tensor& other) const {
    return rank_ == other.rank_ && rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const;
  void fill(double v);

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<double> data_;
  std::size_t rows_ = 1;
  std::size_t cols_ = 0;
  int rank_ = 1;
};

}  // namespace qppnet::diffnet

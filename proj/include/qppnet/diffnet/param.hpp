#pragma once

#include <cstdint>
#include <string>

#include "qppnet/diffnet/tensor.hpp"
#include "qppnet/random.hpp"

namespace qppnet::diffnet {

// A trainable tensor together with its gradient and momentum buffer.
// grad and momentum always have the shape of value.
class Param {
 public:
  Param() = default;
  Param(std::string id, Tensor value);

  const std::string& id() const { return id_; }
  const Tensor& value() const { return value_; }
  Tensor& value() { return value_; }
  const Tensor& grad() const { return grad_; }
  Tensor& grad() { return grad_; }
  const Tensor& momentum() const { return momentum_; }
  Tensor& momentum() { return momentum_; }

  // Replaces the value, resetting grad and momentum when the shape changes.
  void assign(Tensor value);
  void zero_grad() { grad_.fill(0.0); }

 private:
  std::string id_;
  Tensor value_;
  Tensor grad_;
  Tensor momentum_;
};

// Uniform in [-sqrt(1/fan_in), +sqrt(1/fan_in)].
void init_uniform_fan_in(Tensor& t, std::size_t fan_in, SplitMix64& rng);

}  // namespace qppnet::diffnet

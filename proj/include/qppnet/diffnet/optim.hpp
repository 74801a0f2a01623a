#pragma once

#include <functional>
#include <span>

#include "qppnet/diffnet/param.hpp"

namespace qppnet::diffnet {

// SGD with classical momentum:
//   buf <- momentum * buf + grad
//   value <- value - lr * buf
// Gradients are zeroed afterwards. All gradients are checked before any
// parameter moves; a non-finite gradient throws TrainingError naming the
// parameter id.
void sgd_step(std::span<Param* const> params, double lr, double momentum);

// Central differences (f(w+h) - f(w-h)) / 2h for every coordinate of p.
// p is perturbed in place and restored bit-exactly.
Tensor finite_difference_grad(const std::function<double()>& f, Param& p, double h);

}  // namespace qppnet::diffnet

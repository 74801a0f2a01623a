#include "qppnet/diffnet/optim.hpp"

#include <fmt/format.h>

#include "qppnet/error.hpp"

namespace qppnet::diffnet {

void sgd_step(std::span<Param* const> params, double lr, double momentum) {
  for (const Param* p : params) {
    if (!p->grad().all_finite()) {
      throw TrainingError(fmt::format("non-finite gradient in parameter '{}'", p->id()));
    }
  }
  for (Param* p : params) {
    auto value = p->value().data();
    auto buf = p->momentum().data();
    auto grad = p->grad().data();
    for (std::size_t i = 0; i < value.size(); ++i) {
      buf[i] = momentum * buf[i] + grad[i];
      value[i] -= lr * buf[i];
    }
    p->zero_grad();
  }
}

Tensor finite_difference_grad(const std::function<double()>& f, Param& p, double h) {
  if (!(h > 0.0)) throw UsageError("finite difference step must be positive");
  Tensor out = p.value().rank() == 1 ? Tensor::zeros(p.value().cols())
                                     : Tensor::zeros(p.value().rows(), p.value().cols());
  auto w = p.value().data();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double saved = w[i];
    w[i] = saved + h;
    const double up = f();
    w[i] = saved - h;
    const double down = f();
    w[i] = saved;
    out[i] = (up - down) / (2.0 * h);
  }
  return out;
}

}  // namespace qppnet::diffnet

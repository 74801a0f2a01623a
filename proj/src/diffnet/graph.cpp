#include "qppnet/diffnet/graph.hpp"

#include <fmt/format.h>

#include "qppnet/error.hpp"

namespace qppnet::diffnet {

namespace {

Tensor as_batch(Tensor t) {
  if (t.rank() == 2) return t;
  Tensor out = Tensor::zeros(1, t.cols());
  std::copy(t.data().begin(), t.data().end(), out.data().begin());
  return out;
}

}  // namespace

NodeRef Graph::push(Node node) {
  nodes_.push_back(std::move(node));
  return NodeRef{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Graph::Node& Graph::node(NodeRef n) const {
  if (n.index >= nodes_.size()) {
    throw UsageError(fmt::format("node {} does not belong to this graph", n.index));
  }
  return nodes_[n.index];
}

NodeRef Graph::input(Tensor value) {
  Node n;
  n.op = Op::input;
  n.value = as_batch(std::move(value));
  return push(std::move(n));
}

NodeRef Graph::param(const Param& p) {
  if (auto it = bound_.find(&p); it != bound_.end()) return it->second;
  Node n;
  n.op = Op::param;
  n.param = &p;
  const NodeRef ref = push(std::move(n));
  bound_.emplace(&p, ref);
  return ref;
}

const Tensor& Graph::value(NodeRef n) const {
  const Node& nd = node(n);
  return nd.op == Op::param ? nd.param->value() : nd.value;
}

double Graph::scalar(NodeRef n) const {
  const Tensor& v = value(n);
  if (v.size() != 1) {
    throw UsageError(fmt::format("node {} holds {} values, not a scalar", n.index, v.size()));
  }
  return v[0];
}

const Tensor& Graph::adjoint(NodeRef n) const { return node(n).adjoint; }

NodeRef Graph::affine(NodeRef weight, NodeRef bias, NodeRef x) {
  const Tensor& w = value(weight);
  const Tensor& b = value(bias);
  const Tensor& in = value(x);
  if (w.rank() != 2 || b.size() != w.rows() || in.cols() != w.cols()) {
    throw DimensionError(fmt::format("affine: W {}x{}, b {}, x {}x{} do not conform",
                                     w.rows(), w.cols(), b.size(), in.rows(), in.cols()));
  }
  const std::size_t batch = in.rows();
  const std::size_t m = w.rows();
  const std::size_t n = w.cols();
  Tensor out = Tensor::zeros(batch, m);
  const double* wd = w.data().data();
  const double* bd = b.data().data();
  for (std::size_t r = 0; r < batch; ++r) {
    const double* xr = in.data().data() + r * n;
    double* orow = out.data().data() + r * m;
    for (std::size_t i = 0; i < m; ++i) {
      const double* wi = wd + i * n;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += wi[j] * xr[j];
      orow[i] = acc + bd[i];
    }
  }
  Node nd;
  nd.op = Op::affine;
  nd.inputs = {weight, bias, x};
  nd.value = std::move(out);
  return push(std::move(nd));
}

NodeRef Graph::affine(const Param& weight, const Param& bias, NodeRef x) {
  return affine(param(weight), param(bias), x);
}

NodeRef Graph::relu(NodeRef x) {
  Tensor out = as_batch(value(x));
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  Node nd;
  nd.op = Op::relu;
  nd.inputs = {x};
  nd.value = std::move(out);
  return push(std::move(nd));
}

NodeRef Graph::concat(std::span<const NodeRef> xs) {
  if (xs.empty()) throw UsageError("concat needs at least one input");
  const std::size_t batch = value(xs.front()).rows();
  std::size_t width = 0;
  for (NodeRef x : xs) {
    const Tensor& v = value(x);
    if (v.rows() != batch) {
      throw DimensionError(
          fmt::format("concat: batch sizes {} and {} differ", batch, v.rows()));
    }
    width += v.cols();
  }
  Tensor out = Tensor::zeros(batch, width);
  for (std::size_t r = 0; r < batch; ++r) {
    double* dst = out.data().data() + r * width;
    for (NodeRef x : xs) {
      const auto src = value(x).row(r);
      dst = std::copy(src.begin(), src.end(), dst);
    }
  }
  Node nd;
  nd.op = Op::concat;
  nd.inputs.assign(xs.begin(), xs.end());
  nd.value = std::move(out);
  return push(std::move(nd));
}

NodeRef Graph::slice(NodeRef x, std::size_t offset, std::size_t length) {
  const Tensor& in = value(x);
  if (offset + length > in.cols()) {
    throw DimensionError(fmt::format("slice [{}, {}) exceeds width {}", offset,
                                     offset + length, in.cols()));
  }
  Tensor out = Tensor::zeros(in.rows(), length);
  for (std::size_t r = 0; r < in.rows(); ++r) {
    const auto src = in.row(r).subspan(offset, length);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  Node nd;
  nd.op = Op::slice;
  nd.inputs = {x};
  nd.offset = offset;
  nd.value = std::move(out);
  return push(std::move(nd));
}

NodeRef Graph::sub(NodeRef a, NodeRef b) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  if (va.rows() != vb.rows() || va.cols() != vb.cols()) {
    throw DimensionError(fmt::format("sub: {}x{} vs {}x{}", va.rows(), va.cols(), vb.rows(),
                                     vb.cols()));
  }
  Tensor out = Tensor::zeros(va.rows(), va.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = va[i] - vb[i];
  Node nd;
  nd.op = Op::sub;
  nd.inputs = {a, b};
  nd.value = std::move(out);
  return push(std::move(nd));
}

NodeRef Graph::square(NodeRef x) {
  Tensor out = as_batch(value(x));
  for (double& v : out.data()) v = v * v;
  Node nd;
  nd.op = Op::square;
  nd.inputs = {x};
  nd.value = std::move(out);
  return push(std::move(nd));
}

NodeRef Graph::scale(NodeRef x, double factor) {
  Tensor out = as_batch(value(x));
  for (double& v : out.data()) v *= factor;
  Node nd;
  nd.op = Op::scale;
  nd.inputs = {x};
  nd.factor = factor;
  nd.value = std::move(out);
  return push(std::move(nd));
}

NodeRef Graph::sum(std::span<const NodeRef> xs) {
  if (xs.empty()) throw UsageError("sum needs at least one input");
  double total = 0.0;
  for (NodeRef x : xs) {
    for (double v : value(x).data()) total += v;
  }
  Node nd;
  nd.op = Op::sum;
  nd.inputs.assign(xs.begin(), xs.end());
  nd.value = Tensor::zeros(1, 1);
  nd.value[0] = total;
  return push(std::move(nd));
}

Tensor& Graph::ensure_adjoint(NodeRef n) {
  Node& nd = nodes_[n.index];
  if (nd.adjoint.empty()) {
    const Tensor& v = value(n);
    nd.adjoint = v.rank() == 1 ? Tensor::zeros(v.cols()) : Tensor::zeros(v.rows(), v.cols());
  }
  return nd.adjoint;
}

void Graph::backward(NodeRef root) {
  if (value(root).size() != 1) {
    throw UsageError(
        fmt::format("backward root must be scalar, got {} values", value(root).size()));
  }
  // Which nodes depend on a parameter; gradients never flow into pure inputs.
  std::vector<char> needs(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    Node& nd = nodes_[i];
    nd.adjoint = Tensor();
    if (nd.op == Op::param) {
      needs[i] = 1;
      continue;
    }
    for (NodeRef in : nd.inputs) {
      if (needs[in.index]) {
        needs[i] = 1;
        break;
      }
    }
  }
  ensure_adjoint(root)[0] = 1.0;

  for (std::size_t idx = root.index + 1; idx-- > 0;) {
    if (!needs[idx] || nodes_[idx].adjoint.empty()) continue;
    const Node& nd = nodes_[idx];
    const Tensor& dout = nd.adjoint;
    switch (nd.op) {
      case Op::input:
      case Op::param:
        break;
      case Op::affine: {
        const NodeRef wr = nd.inputs[0], br = nd.inputs[1], xr = nd.inputs[2];
        const Tensor& w = value(wr);
        const Tensor& x = value(xr);
        const std::size_t batch = x.rows(), m = w.rows(), n = w.cols();
        if (needs[xr.index]) {
          Tensor& dx = ensure_adjoint(xr);
          for (std::size_t r = 0; r < batch; ++r) {
            const double* dor = dout.data().data() + r * m;
            double* dxr = dx.data().data() + r * n;
            for (std::size_t i = 0; i < m; ++i) {
              const double g = dor[i];
              if (g == 0.0) continue;
              const double* wi = w.data().data() + i * n;
              for (std::size_t j = 0; j < n; ++j) dxr[j] += wi[j] * g;
            }
          }
        }
        if (needs[wr.index]) {
          Tensor& dw = ensure_adjoint(wr);
          for (std::size_t r = 0; r < batch; ++r) {
            const double* dor = dout.data().data() + r * m;
            const double* xrow = x.data().data() + r * n;
            for (std::size_t i = 0; i < m; ++i) {
              const double g = dor[i];
              if (g == 0.0) continue;
              double* dwi = dw.data().data() + i * n;
              for (std::size_t j = 0; j < n; ++j) dwi[j] += g * xrow[j];
            }
          }
        }
        if (needs[br.index]) {
          Tensor& db = ensure_adjoint(br);
          for (std::size_t r = 0; r < batch; ++r) {
            for (std::size_t i = 0; i < m; ++i) db[i] += dout.at(r, i);
          }
        }
        break;
      }
      case Op::relu: {
        const NodeRef xr = nd.inputs[0];
        const Tensor& x = value(xr);
        Tensor& dx = ensure_adjoint(xr);
        for (std::size_t i = 0; i < dout.size(); ++i) {
          if (x[i] > 0.0) dx[i] += dout[i];
        }
        break;
      }
      case Op::concat: {
        std::size_t col = 0;
        const std::size_t width = dout.cols();
        for (NodeRef in : nd.inputs) {
          const std::size_t w = value(in).cols();
          if (needs[in.index]) {
            Tensor& dx = ensure_adjoint(in);
            for (std::size_t r = 0; r < dout.rows(); ++r) {
              const double* src = dout.data().data() + r * width + col;
              double* dst = dx.data().data() + r * w;
              for (std::size_t j = 0; j < w; ++j) dst[j] += src[j];
            }
          }
          col += w;
        }
        break;
      }
      case Op::slice: {
        const NodeRef xr = nd.inputs[0];
        Tensor& dx = ensure_adjoint(xr);
        for (std::size_t r = 0; r < dout.rows(); ++r) {
          const auto src = dout.row(r);
          auto dst = dx.row(r).subspan(nd.offset, src.size());
          for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
        }
        break;
      }
      case Op::sub: {
        if (needs[nd.inputs[0].index]) {
          Tensor& da = ensure_adjoint(nd.inputs[0]);
          for (std::size_t i = 0; i < dout.size(); ++i) da[i] += dout[i];
        }
        if (needs[nd.inputs[1].index]) {
          Tensor& db = ensure_adjoint(nd.inputs[1]);
          for (std::size_t i = 0; i < dout.size(); ++i) db[i] -= dout[i];
        }
        break;
      }
      case Op::square: {
        const NodeRef xr = nd.inputs[0];
        const Tensor& x = value(xr);
        Tensor& dx = ensure_adjoint(xr);
        for (std::size_t i = 0; i < dout.size(); ++i) dx[i] += 2.0 * x[i] * dout[i];
        break;
      }
      case Op::scale: {
        Tensor& dx = ensure_adjoint(nd.inputs[0]);
        for (std::size_t i = 0; i < dout.size(); ++i) dx[i] += nd.factor * dout[i];
        break;
      }
      case Op::sum: {
        const double g = dout[0];
        for (NodeRef in : nd.inputs) {
          if (!needs[in.index]) continue;
          Tensor& dx = ensure_adjoint(in);
          for (double& v : dx.data()) v += g;
        }
        break;
      }
    }
  }
}

const Tensor* Graph::gradient(const Param& p) const {
  auto it = bound_.find(&p);
  if (it == bound_.end()) return nullptr;
  return &nodes_[it->second.index].adjoint;
}

void Graph::accumulate_grad(Param& p) const {
  const Tensor* g = gradient(p);
  if (g == nullptr || g->empty()) return;
  auto dst = p.grad().data();
  const auto src = g->data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace qppnet::diffnet

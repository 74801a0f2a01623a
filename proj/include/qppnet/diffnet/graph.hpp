#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "qppnet/diffnet/param.hpp"
#include "qppnet/diffnet/tensor.hpp"

namespace qppnet::diffnet {

// Handle to a node of a Graph. Only meaningful for the graph that made it.
struct NodeRef {
  std::uint32_t index = 0;
  friend bool operator==(NodeRef, NodeRef) = default;
};

enum class Op : std::uint8_t {
  input,
  param,
  affine,
  relu,
  concat,
  slice,
  sub,
  square,
  scale,
  sum,
};

// Define-by-run reverse-mode differentiation over a DAG.
//
// Every node value is a (batch x width) matrix. Rank-1 inputs become 1 x n.
// Affine nodes apply the same weights to every batch row independently, and
// each row is computed with the same operation order regardless of batch
// size, so evaluating a batch of one gives bit-identical rows.
//
// Nodes are appended in creation order, which is a topological order; the
// graph is acyclic by construction.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) = default;
  Graph& operator=(Graph&&) = default;

  NodeRef input(Tensor value);
  // Binds a parameter. Repeated calls with the same Param return the same
  // node so adjoints from every use accumulate in one place.
  NodeRef param(const Param& p);

  // W (m x n) . x (batch x n) + b (m)  ->  batch x m
  NodeRef affine(NodeRef weight, NodeRef bias, NodeRef x);
  NodeRef affine(const Param& weight, const Param& bias, NodeRef x);
  NodeRef relu(NodeRef x);
  // Column-wise concatenation; all inputs need the same batch size.
  NodeRef concat(std::span<const NodeRef> xs);
  NodeRef slice(NodeRef x, std::size_t offset, std::size_t length);
  NodeRef sub(NodeRef a, NodeRef b);
  NodeRef square(NodeRef x);
  NodeRef scale(NodeRef x, double factor);
  // Sum of every element of every input, as a 1 x 1 scalar.
  NodeRef sum(std::span<const NodeRef> xs);
  NodeRef sum(NodeRef x) { return sum(std::span<const NodeRef>(&x, 1)); }

  const Tensor& value(NodeRef n) const;
  double scalar(NodeRef n) const;
  // Adjoint after backward(); zero-sized when the node was unreachable.
  const Tensor& adjoint(NodeRef n) const;

  // Reverse sweep from a scalar root. Throws UsageError when the root holds
  // more than one element.
  void backward(NodeRef root);

  // d(root)/d(p) from the last backward(), or nullptr when p is not bound.
  const Tensor* gradient(const Param& p) const;
  // Adds the gradient of the last backward() into p.grad() (no-op when p is
  // not bound), so several graphs can accumulate into one parameter.
  void accumulate_grad(Param& p) const;

  std::size_t size() const { return nodes_.size(); }
  Op op(NodeRef n) const { return nodes_[n.index].op; }

 private:
  struct Node {
    Op op = Op::input;
    std::vector<NodeRef> inputs;
    Tensor value;
    Tensor adjoint;
    const Param* param = nullptr;
    double factor = 0.0;
    std::size_t offset = 0;
  };

  NodeRef push(Node node);
  const Node& node(NodeRef n) const;
  Tensor& ensure_adjoint(NodeRef n);

  std::vector<Node> nodes_;
  std::unordered_map<const Param*, NodeRef> bound_;
};

}  // namespace qppnet::diffnet

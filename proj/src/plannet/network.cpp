#include "qppnet/plannet/network.hpp"

#include <fmt/format.h>

#include "qppnet/error.hpp"
#include "qppnet/ingest/signature.hpp"

namespace qppnet::plannet {

using diffnet::NodeRef;
using diffnet::Tensor;
using ingest::PlanNode;
using ingest::PlanTree;

namespace {

class Builder {
 public:
  Builder(diffnet::Graph& g, const QppModel& model, std::span<const PlanTree* const> trees,
          ForwardCounter* counter)
      : g_(g), model_(model), trees_(trees), counter_(counter) {}

  PlanForward run() {
    std::vector<const PlanNode*> roots;
    for (const PlanTree* t : trees_) roots.push_back(&t->root);
    out_.outputs.assign(trees_.front()->root.size(), NodeRef{});
    visit(roots, "0");
    return std::move(out_);
  }

 private:
  NodeRef visit(const std::vector<const PlanNode*>& nodes, const std::string& path) {
    const std::size_t position = next_++;
    const PlanNode& first = *nodes.front();
    if (!model_.encoder().has_kind(first.kind)) {
      throw InferenceError(fmt::format("plan '{}' node {}: no neural unit for kind '{}'",
                                       trees_.front()->id, path, first.kind));
    }
    const NeuralUnit& unit = model_.unit(first.kind);
    if (first.children.size() > unit.max_arity()) {
      throw InferenceError(fmt::format("plan '{}' node {}: '{}' has {} children, at most {}",
                                       trees_.front()->id, path, first.kind,
                                       first.children.size(), unit.max_arity()));
    }

    // Input: F(node) then each child's full output, absent children zero.
    std::vector<NodeRef> parts;
    parts.reserve(1 + unit.max_arity());
    const std::size_t batch = nodes.size();
    Tensor features = Tensor::zeros(batch, unit.feature_width());
    for (std::size_t r = 0; r < batch; ++r) {
      try {
        model_.encoder().encode_into(*nodes[r], features.row(r));
      } catch (const EncodingError& e) {
        throw InferenceError(
            fmt::format("plan '{}' node {}: {}", trees_[r]->id, path, e.what()));
      }
    }
    parts.push_back(g_.input(std::move(features)));

    std::vector<const PlanNode*> child_nodes(batch);
    for (std::size_t c = 0; c < first.children.size(); ++c) {
      for (std::size_t r = 0; r < batch; ++r) child_nodes[r] = &nodes[r]->children[c];
      parts.push_back(visit(child_nodes, fmt::format("{}.{}", path, c)));
    }
    for (std::size_t c = first.children.size(); c < unit.max_arity(); ++c) {
      parts.push_back(g_.input(Tensor::zeros(batch, unit.output_width())));
    }

    const NodeRef out = unit.forward(g_, g_.concat(parts));
    if (counter_ != nullptr) counter_->unit_evaluations += batch;
    out_.outputs[position] = out;
    return out;
  }

  diffnet::Graph& g_;
  const QppModel& model_;
  std::span<const PlanTree* const> trees_;
  ForwardCounter* counter_;
  PlanForward out_;
  std::size_t next_ = 0;
};

}  // namespace

PlanForward build_plan_forward(diffnet::Graph& g, const QppModel& model,
                               std::span<const PlanTree* const> trees, ForwardCounter* counter) {
  if (trees.empty()) throw UsageError("build_plan_forward needs at least one tree");
  if (trees.size() > 1) {
    const auto sig = ingest::structure_signature(*trees.front());
    for (const PlanTree* t : trees.subspan(1)) {
      if (ingest::structure_signature(*t) != sig) {
        throw UsageError(fmt::format("plans '{}' and '{}' differ in structure",
                                     trees.front()->id, t->id));
      }
    }
  }
  return Builder(g, model, trees, counter).run();
}

PlanForward build_plan_forward(diffnet::Graph& g, const QppModel& model, const PlanTree& tree,
                               ForwardCounter* counter) {
  const PlanTree* one = &tree;
  return build_plan_forward(g, model, std::span<const PlanTree* const>(&one, 1), counter);
}

std::vector<UnitOutput> evaluate_plan(const QppModel& model, const PlanTree& tree) {
  diffnet::Graph g;
  const PlanForward fwd = build_plan_forward(g, model, tree);
  std::vector<UnitOutput> out;
  out.reserve(fwd.outputs.size());
  for (NodeRef n : fwd.outputs) {
    const auto row = g.value(n).row(0);
    out.push_back({row[0], std::vector<double>(row.begin() + 1, row.end())});
  }
  return out;
}

double predict_latency(const QppModel& model, const PlanTree& tree) {
  diffnet::Graph g;
  const PlanForward fwd = build_plan_forward(g, model, tree);
  return g.value(fwd.outputs.front())[0];
}

std::vector<double> predict_latencies(const QppModel& model, std::span<const PlanTree> trees) {
  std::vector<const PlanTree*> ptrs;
  ptrs.reserve(trees.size());
  for (const auto& t : trees) ptrs.push_back(&t);
  std::vector<double> out(trees.size(), 0.0);
  for (const auto& [sig, members] : ingest::group_by_signature(ptrs)) {
    std::vector<const PlanTree*> group;
    for (std::size_t i : members) group.push_back(ptrs[i]);
    diffnet::Graph g;
    const PlanForward fwd = build_plan_forward(g, model, group);
    const Tensor& root = g.value(fwd.outputs.front());
    for (std::size_t r = 0; r < members.size(); ++r) out[members[r]] = root.at(r, 0);
  }
  return out;
}

}  // namespace qppnet::plannet

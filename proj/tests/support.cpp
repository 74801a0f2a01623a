#include "support.hpp"

#include <algorithm>
#include <cmath>

#include "qppnet/diffnet/graph.hpp"
#include "qppnet/ingest/encoder.hpp"
#include "qppnet/ingest/schema.hpp"
#include "qppnet/ingest/synth.hpp"
#include "qppnet/plannet/network.hpp"

namespace qppnet::testing {

using diffnet::Graph;
using diffnet::NodeRef;
using diffnet::Tensor;

std::vector<ingest::PlanTree> random_trees(std::uint64_t seed, std::size_t count,
                                           std::size_t min_nodes, std::size_t max_nodes) {
  std::vector<ingest::PlanTree> out;
  for (std::uint64_t round = 0; out.size() < count; ++round) {
    ingest::SynthConfig cfg;
    cfg.plan_count = 4 * count + 16;
    cfg.template_count = 0;
    cfg.seed = seed * 7919 + round;
    for (auto& t : ingest::synth_generate(cfg).plans) {
      const auto n = t.root.size();
      if (n < min_nodes || n > max_nodes) continue;
      out.push_back(std::move(t));
      if (out.size() == count) break;
    }
  }
  return out;
}

plannet::QppModel small_model(std::span<const ingest::PlanTree> corpus, std::size_t layers,
                              std::size_t width, std::size_t d, std::uint64_t seed) {
  const auto encoder = ingest::fit_encoder(corpus, ingest::Schema::postgres_default());
  plannet::Hyperparams hp;
  hp.hidden_layers = layers;
  hp.hidden_width = width;
  hp.data_width = d;
  hp.seed = seed;
  return plannet::init_model(encoder, hp);
}

NaiveLoss naive_tree_loss(const plannet::QppModel& model, const ingest::PlanTree& tree) {
  NaiveLoss loss;
  for (const ingest::PlanNode* node : ingest::preorder(tree.root)) {
    ingest::PlanTree sub{tree.id, tree.template_name, *node};
    plannet::ForwardCounter counter;
    Graph g;
    const auto fwd = plannet::build_plan_forward(g, model, sub, &counter);
    const double err = g.value(fwd.outputs[0]).at(0, 0) - *node->latency;
    loss.sse += err * err;
    loss.unit_evaluations += counter.unit_evaluations;
  }
  return loss;
}

namespace {

// Builds sum of squared errors for one tree inside g; returns the loss node.
NodeRef add_tree_sse(Graph& g, const plannet::QppModel& model, const ingest::PlanTree& tree) {
  const auto fwd = plannet::build_plan_forward(g, model, tree);
  const auto nodes = ingest::preorder(tree.root);
  std::vector<NodeRef> terms;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeRef pred = g.slice(fwd.outputs[i], 0, 1);
    const NodeRef actual = g.input(Tensor({*nodes[i]->latency}));
    terms.push_back(g.square(g.sub(pred, actual)));
  }
  return g.sum(terms);
}

std::vector<Tensor> zero_like(const std::vector<const diffnet::Param*>& params) {
  std::vector<Tensor> out;
  for (const auto* p : params) {
    out.push_back(Tensor::zeros(p->value().rows(), p->value().cols()));
    if (p->value().rank() == 1) out.back() = Tensor::zeros(p->value().size());
  }
  return out;
}

}  // namespace

std::vector<Tensor> flat_mse_gradient(const plannet::QppModel& model,
                                      std::span<const ingest::PlanTree* const> batch) {
  const auto params = model.parameters();
  auto acc = zero_like(params);
  std::size_t operators = 0;
  for (const auto* tree : batch) {
    Graph g;
    g.backward(add_tree_sse(g, model, *tree));
    for (std::size_t k = 0; k < params.size(); ++k) {
      if (const Tensor* grad = g.gradient(*params[k])) {
        for (std::size_t i = 0; i < grad->size(); ++i) acc[k][i] += (*grad)[i];
      }
    }
    operators += tree->root.size();
  }
  for (auto& t : acc) {
    for (double& v : t.data()) v /= static_cast<double>(operators);
  }
  return acc;
}

std::vector<Tensor> replicated_sse_gradient(const plannet::QppModel& model,
                                            const ingest::PlanTree& tree, std::size_t copies) {
  const auto params = model.parameters();
  auto acc = zero_like(params);
  Graph g;
  std::vector<NodeRef> losses;
  for (std::size_t c = 0; c < copies; ++c) losses.push_back(add_tree_sse(g, model, tree));
  g.backward(g.sum(losses));
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (const Tensor* grad = g.gradient(*params[k])) acc[k] = *grad;
  }
  return acc;
}

double relative_distance(std::span<const Tensor> a, std::span<const Tensor> b) {
  double diff = 0.0, norm = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    for (std::size_t i = 0; i < b[k].size(); ++i) {
      diff += (a[k][i] - b[k][i]) * (a[k][i] - b[k][i]);
      norm += b[k][i] * b[k][i];
    }
  }
  if (norm == 0.0) return diff == 0.0 ? 0.0 : INFINITY;
  return std::sqrt(diff / norm);
}

double max_relative_error(const Tensor& a, const Tensor& b, double floor) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace qppnet::testing

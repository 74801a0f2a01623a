#include "qppnet/trainer/trainer.hpp"

#include <chrono>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "qppnet/diffnet/graph.hpp"
#include "qppnet/diffnet/optim.hpp"
#include "qppnet/error.hpp"
#include "qppnet/evalkit/metrics.hpp"
#include "qppnet/plannet/network.hpp"
#include "qppnet/random.hpp"

namespace qppnet::trainer {

using diffnet::Graph;
using diffnet::NodeRef;
using diffnet::Tensor;
using ingest::PlanNode;
using ingest::PlanTree;

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw UsageError("learning rate must be positive");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw UsageError("momentum must be in [0, 1)");
  if (batch_size == 0) throw UsageError("batch size must be at least 1");
}

double LossAccumulator::mse() const {
  if (count == 0) throw UsageError("loss accumulator is empty");
  return sse / static_cast<double>(count);
}

double LossAccumulator::rmse() const { return std::sqrt(mse()); }

namespace {

struct LossGraph {
  Graph graph;
  plannet::PlanForward forward;
  NodeRef sse;
  std::size_t operators = 0;
};

// Squared latency error of every node of every tree in one batched network.
// Trees must share a structure.
void build_loss(LossGraph& lg, const plannet::QppModel& model,
                std::span<const PlanTree* const> trees, plannet::ForwardCounter* counter) {
  lg.forward = plannet::build_plan_forward(lg.graph, model, trees, counter);
  const std::size_t batch = trees.size();
  const std::size_t positions = lg.forward.outputs.size();

  std::vector<std::vector<const PlanNode*>> nodes;
  nodes.reserve(batch);
  for (const PlanTree* t : trees) nodes.push_back(ingest::preorder(t->root));

  std::vector<NodeRef> terms;
  terms.reserve(positions);
  for (std::size_t p = 0; p < positions; ++p) {
    Tensor target = Tensor::zeros(batch, 1);
    for (std::size_t r = 0; r < batch; ++r) {
      const PlanNode& node = *nodes[r][p];
      if (!node.latency) {
        throw TrainingError(fmt::format("plan '{}' node {}: missing observed latency",
                                        trees[r]->id, ingest::preorder_paths(trees[r]->root)[p]));
      }
      target[r] = *node.latency;
    }
    const NodeRef predicted = lg.graph.slice(lg.forward.outputs[p], 0, 1);
    const NodeRef diff = lg.graph.sub(predicted, lg.graph.input(std::move(target)));
    terms.push_back(lg.graph.square(diff));
  }
  lg.sse = lg.graph.sum(terms);
  lg.operators = positions * batch;
}

}  // namespace

CachedLoss tree_loss_cached(const plannet::QppModel& model, const PlanTree& tree) {
  const PlanTree* one = &tree;
  LossGraph lg;
  plannet::ForwardCounter counter;
  build_loss(lg, model, std::span<const PlanTree* const>(&one, 1), &counter);
  CachedLoss out;
  out.sse = lg.graph.scalar(lg.sse);
  out.operator_count = lg.operators;
  out.unit_evaluations = counter.unit_evaluations;
  for (NodeRef n : lg.forward.outputs) {
    const auto row = lg.graph.value(n).row(0);
    out.outputs.push_back({row[0], std::vector<double>(row.begin() + 1, row.end())});
  }
  return out;
}

double full_loss(const plannet::QppModel& model, std::span<const PlanTree> corpus) {
  if (corpus.empty()) throw UsageError("full_loss needs a nonempty corpus");
  LossAccumulator acc;
  for (const auto& tree : corpus) {
    const CachedLoss l = tree_loss_cached(model, tree);
    acc.add(l.sse, l.operator_count);
  }
  return acc.rmse();
}

std::vector<StructureGroup> partition_batch(std::span<const PlanTree* const> batch,
                                            GroupWeighting weighting) {
  std::vector<StructureGroup> groups;
  for (auto& [sig, members] : ingest::group_by_signature(batch)) {
    StructureGroup g;
    g.signature = sig;
    for (std::size_t i : members) g.trees.push_back(batch[i]);
    g.plan_count = g.trees.size();
    g.operator_count = g.plan_count * g.trees.front()->root.size();
    g.weight = static_cast<double>(weighting == GroupWeighting::operator_count ? g.operator_count
                                                                               : g.plan_count);
    groups.push_back(std::move(g));
  }
  return groups;
}

GradientEstimate grouped_gradient(const plannet::QppModel& model,
                                  std::span<const PlanTree* const> batch,
                                  GroupWeighting weighting) {
  if (batch.empty()) throw UsageError("grouped_gradient needs a nonempty batch");
  GradientEstimate est;
  est.groups = partition_batch(batch, weighting);
  const auto params = model.parameters();
  for (const auto* p : params) {
    const Tensor& v = p->value();
    est.grads.push_back(v.rank() == 1 ? Tensor::zeros(v.cols())
                                      : Tensor::zeros(v.rows(), v.cols()));
  }

  double total_weight = 0.0;
  for (const auto& group : est.groups) {
    LossGraph lg;
    build_loss(lg, model, group.trees, nullptr);
    est.loss.add(lg.graph.scalar(lg.sse), lg.operators);
    // Gradient of the group's mean squared operator error.
    const NodeRef mse = lg.graph.scale(lg.sse, 1.0 / static_cast<double>(lg.operators));
    lg.graph.backward(mse);
    for (std::size_t i = 0; i < params.size(); ++i) {
      const Tensor* g = lg.graph.gradient(*params[i]);
      if (g == nullptr || g->empty()) continue;
      auto dst = est.grads[i].data();
      const auto src = g->data();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += group.weight * src[k];
    }
    total_weight += group.weight;
  }
  est.normalization = 1.0 / total_weight;
  for (auto& g : est.grads) {
    for (double& v : g.data()) v *= est.normalization;
  }
  return est;
}

std::vector<EpochStats> train(plannet::QppModel& model, std::span<const PlanTree> train_set,
                              std::span<const PlanTree> test_set, const TrainConfig& config,
                              const EpochCallback& on_epoch) {
  config.validate();
  std::vector<EpochStats> stats;
  if (config.epochs == 0) return stats;
  if (train_set.empty()) throw UsageError("training set is empty");
  for (const auto& t : train_set) {
    if (!t.root.fully_labeled()) {
      throw TrainingError(fmt::format("plan '{}' has nodes without observed latency", t.id));
    }
  }

  std::vector<double> test_actual;
  for (const auto& t : test_set) test_actual.push_back(t.root.latency.value_or(0.0));

  SplitMix64 rng(config.seed);
  std::vector<const PlanTree*> order;
  for (const auto& t : train_set) order.push_back(&t);
  const auto params = model.parameters();
  const auto start = std::chrono::steady_clock::now();

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle(order.begin(), order.end(), rng);
    LossAccumulator epoch_loss;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const auto batch = std::span<const PlanTree* const>(order).subspan(begin, end - begin);
      GradientEstimate est = grouped_gradient(model, batch, config.weighting);
      if (!std::isfinite(est.loss.sse)) {
        throw TrainingError(
            fmt::format("training diverged in epoch {}: loss is not finite", epoch));
      }
      epoch_loss.add(est.loss.sse, est.loss.count);
      for (std::size_t i = 0; i < params.size(); ++i) params[i]->grad() = std::move(est.grads[i]);
      try {
        diffnet::sgd_step(params, config.learning_rate, config.momentum);
      } catch (const TrainingError& e) {
        throw TrainingError(fmt::format("training diverged in epoch {}: {}", epoch, e.what()));
      }
    }

    EpochStats s;
    s.epoch = epoch;
    s.train_rmse = epoch_loss.rmse();
    if (!test_set.empty()) {
      const auto predicted = plannet::predict_latencies(model, test_set);
      s.test_mae = evalkit::mean_absolute_error(test_actual, predicted);
    }
    s.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_epoch) on_epoch(s);
    stats.push_back(s);
  }
  return stats;
}

Split holdout_split(std::span<const PlanTree> corpus, const HoldoutConfig& config) {
  Split split;
  const std::size_t n = corpus.size();
  SplitMix64 rng(config.seed);
  switch (config.mode) {
    case HoldoutConfig::Mode::none: {
      for (std::size_t i = 0; i < n; ++i) split.train.push_back(i);
      return split;
    }
    case HoldoutConfig::Mode::random: {
      if (!(config.fraction >= 0.0 && config.fraction <= 1.0)) {
        throw UsageError("holdout fraction must be in [0, 1]");
      }
      std::vector<std::size_t> idx(n);
      for (std::size_t i = 0; i < n; ++i) idx[i] = i;
      shuffle(idx.begin(), idx.end(), rng);
      const auto n_test =
          static_cast<std::size_t>(std::llround(config.fraction * static_cast<double>(n)));
      std::vector<char> is_test(n, 0);
      for (std::size_t i = 0; i < n_test; ++i) is_test[idx[i]] = 1;
      for (std::size_t i = 0; i < n; ++i) (is_test[i] ? split.test : split.train).push_back(i);
      return split;
    }
    case HoldoutConfig::Mode::by_template: {
      std::set<std::string> names;
      for (const auto& t : corpus) {
        if (t.template_name.empty()) {
          throw UsageError(fmt::format("plan '{}' has no template tag", t.id));
        }
        names.insert(t.template_name);
      }
      std::vector<std::string> templates(names.begin(), names.end());
      std::size_t count = config.template_count;
      if (count == 0) {
        count = static_cast<std::size_t>(
            std::llround(config.fraction * static_cast<double>(templates.size())));
      }
      if (count > templates.size()) {
        throw UsageError(fmt::format("cannot hold out {} templates, corpus has {}", count,
                                     templates.size()));
      }
      shuffle(templates.begin(), templates.end(), rng);
      const std::set<std::string> held(templates.begin(),
                                       templates.begin() + static_cast<std::ptrdiff_t>(count));
      for (std::size_t i = 0; i < n; ++i) {
        (held.contains(corpus[i].template_name) ? split.test : split.train).push_back(i);
      }
      return split;
    }
  }
  return split;
}

std::vector<PlanTree> select(std::span<const PlanTree> corpus,
                             std::span<const std::size_t> indices) {
  std::vector<PlanTree> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(corpus[i]);
  return out;
}

}  // namespace qppnet::trainer

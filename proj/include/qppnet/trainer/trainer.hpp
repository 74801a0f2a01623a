#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qppnet/diffnet/tensor.hpp"
#include "qppnet/ingest/plan.hpp"
#include "qppnet/ingest/signature.hpp"
#include "qppnet/plannet/model.hpp"

namespace qppnet::trainer {

// How structure groups are weighted when their gradients are combined.
//   operator_count  w_i = operators in group i. The combination equals the
//                   gradient of the whole-batch mean squared operator error.
//   plan_count      w_i = plans in group i (|c_i|); every plan counts the
//                   same regardless of its size.
enum class GroupWeighting { operator_count, plan_count };

struct TrainConfig {
  double learning_rate = 0.001;
  double momentum = 0.9;
  std::size_t epochs = 200;
  // Plans per large batch.
  std::size_t batch_size = 256;
  std::uint64_t seed = 0;
  GroupWeighting weighting = GroupWeighting::operator_count;

  // Throws UsageError unless lr > 0, 0 <= momentum < 1, batch_size >= 1.
  void validate() const;
};

// Sum of squared operator errors and how many operators contributed.
struct LossAccumulator {
  double sse = 0.0;
  std::size_t count = 0;

  void add(double squared_error_sum, std::size_t operators) {
    sse += squared_error_sum;
    count += operators;
  }
  double mse() const;
  double rmse() const;
};

struct CachedLoss {
  double sse = 0.0;
  std::size_t operator_count = 0;
  // Unit outputs in preorder.
  std::vector<plannet::UnitOutput> outputs;
  // Unit applications performed; equals the node count.
  std::size_t unit_evaluations = 0;
};

// Squared latency error summed over every operator of the tree, evaluating
// each node's unit exactly once and reusing child outputs for the parents.
// Throws TrainingError naming the first node without a latency.
CachedLoss tree_loss_cached(const plannet::QppModel& model, const ingest::PlanTree& tree);

// Root-mean-squared error over all operators of the corpus.
// Throws UsageError on an empty corpus.
double full_loss(const plannet::QppModel& model, std::span<const ingest::PlanTree> corpus);

struct StructureGroup {
  ingest::StructureSignature signature;
  std::vector<const ingest::PlanTree*> trees;
  std::size_t plan_count = 0;
  std::size_t operator_count = 0;
  double weight = 0.0;
};

// Partition into structure-identical groups, ordered by signature.
std::vector<StructureGroup> partition_batch(std::span<const ingest::PlanTree* const> batch,
                                            GroupWeighting weighting);

struct GradientEstimate {
  // Aligned with QppModel::parameters().
  std::vector<diffnet::Tensor> grads;
  // 1 / sum of group weights.
  double normalization = 0.0;
  std::vector<StructureGroup> groups;
  LossAccumulator loss;
};

// Computes, per structure group, the gradient of the group's mean squared
// operator error on one batched network, then combines
//
//   grad = normalization * sum_i w_i * grad_i,   normalization = 1 / sum_i w_i
//
// Groups are reduced in signature order. Throws UsageError on an empty batch
// and TrainingError for unlabeled nodes.
GradientEstimate grouped_gradient(const plannet::QppModel& model,
                                  std::span<const ingest::PlanTree* const> batch,
                                  GroupWeighting weighting = GroupWeighting::operator_count);

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_rmse = 0.0;
  // Mean absolute root-latency error on the held-out plans, if any.
  std::optional<double> test_mae;
  double wall_seconds = 0.0;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Epoch loop: seeded shuffle, large batches, grouped gradient, SGD step.
// train_rmse accumulates the batch losses seen during the epoch (before each
// step). Throws TrainingError (with the epoch number) on a non-finite loss
// or gradient. Zero epochs leave the model untouched.
std::vector<EpochStats> train(plannet::QppModel& model, std::span<const ingest::PlanTree> train_set,
                              std::span<const ingest::PlanTree> test_set, const TrainConfig& config,
                              const EpochCallback& on_epoch = {});

struct HoldoutConfig {
  enum class Mode { none, random, by_template };
  Mode mode = Mode::random;
  // random: share of plans held out. by_template: share of templates held
  // out when template_count is 0.
  double fraction = 0.1;
  std::size_t template_count = 0;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seed-deterministic split; index lists are ascending. by_template moves
// every instance of the chosen templates to the test side and throws
// UsageError when plans lack template tags or fewer templates exist than
// requested.
Split holdout_split(std::span<const ingest::PlanTree> corpus, const HoldoutConfig& config);

std::vector<ingest::PlanTree> select(std::span<const ingest::PlanTree> corpus,
                                     std::span<const std::size_t> indices);

}  // namespace qppnet::trainer

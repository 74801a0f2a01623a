#pragma once

// Reference implementations used by the tests. They deliberately take the
// slow, obvious route (one graph per tree, recompute per subtree) so they can
// check the optimized library paths.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qppnet/diffnet/tensor.hpp"
#include "qppnet/ingest/plan.hpp"
#include "qppnet/plannet/model.hpp"

namespace qppnet::testing {

// Labeled synthetic plans with freshly drawn shapes, keeping only trees
// with node counts in [min_nodes, max_nodes].
std::vector<ingest::PlanTree> random_trees(std::uint64_t seed, std::size_t count,
                                           std::size_t min_nodes, std::size_t max_nodes);

plannet::QppModel small_model(std::span<const ingest::PlanTree> corpus, std::size_t layers,
                              std::size_t width, std::size_t d, std::uint64_t seed);

struct NaiveLoss {
  double sse = 0.0;
  std::size_t unit_evaluations = 0;
};

// Every node's prediction is recomputed from scratch on its own subtree.
NaiveLoss naive_tree_loss(const plannet::QppModel& model, const ingest::PlanTree& tree);

// Gradient of sum(err^2) / operators over the whole batch, one graph per
// tree, accumulated in plain loops.
std::vector<diffnet::Tensor> flat_mse_gradient(const plannet::QppModel& model,
                                               std::span<const ingest::PlanTree* const> batch);

// Gradient of the summed squared error of `copies` copies of a tree built
// as independent subnetworks of a single graph.
std::vector<diffnet::Tensor> replicated_sse_gradient(const plannet::QppModel& model,
                                                     const ingest::PlanTree& tree,
                                                     std::size_t copies);

// ||a - b|| / ||b|| over all tensors (0 when both are zero).
double relative_distance(std::span<const diffnet::Tensor> a, std::span<const diffnet::Tensor> b);

// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor)
double max_relative_error(const diffnet::Tensor& a, const diffnet::Tensor& b, double floor);

}  // namespace qppnet::testing

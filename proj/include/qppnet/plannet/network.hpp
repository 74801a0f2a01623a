#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qppnet/diffnet/graph.hpp"
#include "qppnet/ingest/plan.hpp"
#include "qppnet/plannet/model.hpp"

namespace qppnet::plannet {

// Counts unit applications, one per (node, plan) pair.
struct ForwardCounter {
  std::size_t unit_evaluations = 0;
};

// Graph nodes of a plan-structured network, one per plan position in
// preorder. Each node holds a (batch x (d + 1)) output, row r belonging to
// the r-th tree of the batch.
struct PlanForward {
  std::vector<diffnet::NodeRef> outputs;
};

// Builds the network isomorphic to the trees' common structure and
// evaluates it bottom-up, every position exactly once. All trees must share
// one structure signature; they are evaluated as one batch.
//
// Throws InferenceError (naming the node path) for kinds the model lacks.
PlanForward build_plan_forward(diffnet::Graph& g, const QppModel& model,
                               std::span<const ingest::PlanTree* const> trees,
                               ForwardCounter* counter = nullptr);

PlanForward build_plan_forward(diffnet::Graph& g, const QppModel& model,
                               const ingest::PlanTree& tree, ForwardCounter* counter = nullptr);

// Unit outputs for every node, in preorder.
std::vector<UnitOutput> evaluate_plan(const QppModel& model, const ingest::PlanTree& tree);

// Latency of the root unit, in seconds. Not clamped; may be negative.
double predict_latency(const QppModel& model, const ingest::PlanTree& tree);

// Root latencies for many plans, evaluated in structure-identical batches.
// Bit-identical to calling predict_latency on each plan.
std::vector<double> predict_latencies(const QppModel& model,
                                      std::span<const ingest::PlanTree> trees);

}  // namespace qppnet::plannet

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qppnet::ingest {

// Raw attribute value as read from a plan document, before encoding.
using AttrValue = std::variant<double, bool, std::string, std::vector<double>>;
using AttrMap = std::map<std::string, AttrValue>;

// One operator instance of a query execution plan.
//
// latency is the observed wall time of this operator *including* its whole
// subtree, in seconds (EXPLAIN ANALYZE "Actual Total Time" semantics), so the
// root latency equals the query latency.
struct PlanNode {
  std::string kind;
  AttrMap attrs;
  std::vector<PlanNode> children;
  std::optional<double> latency;

  // Number of nodes in this subtree.
  std::size_t size() const;
  std::size_t depth() const;
  bool fully_labeled() const;
  const AttrValue* attr(const std::string& name) const;
  std::optional<double> numeric(const std::string& name) const;

  friend bool operator==(const PlanNode&, const PlanNode&) = default;
};

struct PlanTree {
  std::string id;
  // Query template the plan was instantiated from; empty when unknown.
  std::string template_name;
  PlanNode root;

  friend bool operator==(const PlanTree&, const PlanTree&) = default;
};

// Nodes in preorder (node, then children left to right). Index 0 is the root.
std::vector<const PlanNode*> preorder(const PlanNode& root);
std::vector<PlanNode*> preorder(PlanNode& root);

// Preorder path of node i as "0", "0.1", "0.1.0", ...
std::vector<std::string> preorder_paths(const PlanNode& root);

}  // namespace qppnet::ingest

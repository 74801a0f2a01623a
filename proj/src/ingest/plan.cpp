#include "qppnet/ingest/plan.hpp"

#include <algorithm>

namespace qppnet::ingest {

std::size_t PlanNode::size() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

std::size_t PlanNode::depth() const {
  std::size_t d = 0;
  for (const auto& c : children) d = std::max(d, c.depth());
  return d + 1;
}

bool PlanNode::fully_labeled() const {
  if (!latency) return false;
  return std::all_of(children.begin(), children.end(),
                     [](const PlanNode& c) { return c.fully_labeled(); });
}

const AttrValue* PlanNode::attr(const std::string& name) const {
  auto it = attrs.find(name);
  return it == attrs.end() ? nullptr : &it->second;
}

std::optional<double> PlanNode::numeric(const std::string& name) const {
  const AttrValue* v = attr(name);
  if (v == nullptr) return std::nullopt;
  if (const double* d = std::get_if<double>(v)) return *d;
  return std::nullopt;
}

namespace {

template <typename Node, typename Out>
void collect(Node& node, Out& out) {
  out.push_back(&node);
  for (auto& c : node.children) collect(c, out);
}

void collect_paths(const PlanNode& node, const std::string& path,
                   std::vector<std::string>& out) {
  out.push_back(path);
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    collect_paths(node.children[i], path + "." + std::to_string(i), out);
  }
}

}  // namespace

std::vector<const PlanNode*> preorder(const PlanNode& root) {
  std::vector<const PlanNode*> out;
  collect(root, out);
  return out;
}

std::vector<PlanNode*> preorder(PlanNode& root) {
  std::vector<PlanNode*> out;
  collect(root, out);
  return out;
}

std::vector<std::string> preorder_paths(const PlanNode& root) {
  std::vector<std::string> out;
  collect_paths(root, "0", out);
  return out;
}

}  // namespace qppnet::ingest

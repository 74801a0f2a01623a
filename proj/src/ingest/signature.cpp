#include "qppnet/ingest/signature.hpp"

namespace qppnet::ingest {

namespace {

void append(const PlanNode& node, std::string& out) {
  out += node.kind;
  if (node.children.empty()) return;
  out.push_back('(');
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    if (i) out.push_back(',');
    append(node.children[i], out);
  }
  out.push_back(')');
}

}  // namespace

StructureSignature structure_signature(const PlanNode& root) {
  StructureSignature sig;
  append(root, sig.text);
  return sig;
}

std::map<StructureSignature, std::vector<std::size_t>> group_by_signature(
    std::span<const PlanTree* const> trees) {
  std::map<StructureSignature, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    groups[structure_signature(*trees[i])].push_back(i);
  }
  return groups;
}

}  // namespace qppnet::ingest

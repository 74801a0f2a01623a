#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "qppnet/ingest/plan.hpp"

namespace qppnet::ingest {

// Canonical text of a plan's shape and operator kinds, e.g.
// "hash-join(seq-scan,sort(seq-scan))". Attribute values do not
// participate, so two trees share a signature iff they have the same shape
// and the same kind at every position.
struct StructureSignature {
  std::string text;

  friend auto operator<=>(const StructureSignature&, const StructureSignature&) = default;
};

StructureSignature structure_signature(const PlanNode& root);
inline StructureSignature structure_signature(const PlanTree& tree) {
  return structure_signature(tree.root);
}

// Indices into `trees` grouped by signature; groups ordered by signature,
// members by index.
std::map<StructureSignature, std::vector<std::size_t>> group_by_signature(
    std::span<const PlanTree* const> trees);

}  // namespace qppnet::ingest

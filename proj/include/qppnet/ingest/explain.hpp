#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qppnet/ingest/plan.hpp"
#include "qppnet/ingest/schema.hpp"

namespace qppnet::ingest {

struct ExplainOptions {
  // Reject node types the schema does not know instead of mapping them to
  // the schema's fallback kind.
  bool strict = false;
};

// Parses one PostgreSQL EXPLAIN (FORMAT JSON) document: either the usual
// top-level array of statements `[{"Plan": {...}, ...}]` (first statement
// is used) or a bare `{"Plan": {...}}` object.
//
// Attributes are extracted for the node's kind from each AttributeSpec's
// source key; absent keys stay absent. When "Actual Total Time" is present
// the node latency is Actual Total Time x Actual Loops, converted from
// milliseconds to seconds.
//
// Throws ParseError whose message starts with the JSON path of the problem.
PlanTree parse_explain_json(std::string_view text, const Schema& schema,
                            const ExplainOptions& options = {});

// One tree per statement. Accepts a single JSON document (every element of
// a top-level array becomes a tree) or newline-delimited documents.
std::vector<PlanTree> parse_explain_documents(std::string_view text, const Schema& schema,
                                              const ExplainOptions& options = {});

}  // namespace qppnet::ingest

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qppnet/ingest/plan.hpp"

namespace qppnet::ingest {

inline constexpr int kCorpusFormatVersion = 1;

// Native corpus: newline-delimited JSON. Line 1 is a header record
//
//   {"format":"qppnet-corpus","version":1,"count":N,"labeled":true,
//    "provenance":{...}}
//
// followed by one record per plan
//
//   {"id":"q17","template":"t3","plan":NODE}
//   NODE = {"kind":"hash-join","attrs":{"plan-rows":1200.0,...},
//           "latency":0.25,"children":[NODE,...]}
//
// Attribute values are JSON numbers, booleans, strings, or arrays of
// numbers. "latency" is omitted for unlabeled nodes. Doubles are written in
// shortest round-trip form, so a write/read cycle is bit-exact.
struct Corpus {
  std::vector<PlanTree> plans;
  // Free-form origin data (tool version, seed, input hashes, ...).
  nlohmann::json provenance = nlohmann::json::object();

  // True when every node of every plan carries a latency.
  bool labeled() const;
};

nlohmann::json node_to_json(const PlanNode& node);
PlanNode node_from_json(const nlohmann::json& j, const std::string& path = "plan");

std::string write_corpus(const Corpus& corpus);
Corpus read_corpus(std::string_view text);

void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);

// Whole-file helpers shared by the artifact writers.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace qppnet::ingest

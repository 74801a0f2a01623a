#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "qppnet/ingest/corpus.hpp"
#include "qppnet/ingest/schema.hpp"

namespace qppnet::ingest {

// Latency coefficients of one operator kind (seconds).
struct KindCoefficients {
  double per_row = 0.0;      // a (leaves) or b (internal), per output row
  double constant = 0.0;     // c
  double interaction = 0.0;  // joins only, per sqrt(left_rows * right_rows)
};

struct Range {
  double min = 0.0;
  double max = 0.0;
};

// Ground-truth workload for desk-scale experiments.
//
// Each plan is an instance of a template (fixed shape, kinds, relations and
// categorical attributes); instances vary selectivities and therefore row
// counts. With noise sigma = 0 every node's inclusive latency is
//
//   leaf:      per_row * rows + constant
//   internal:  sum(children latencies) + per_row * rows_out + constant
//              [+ interaction * sqrt(rows_left * rows_right) for joins]
//
// and each node's value is then multiplied by exp(sigma * z), z ~ N(0, 1).
// Row counts:
//   leaf       relation_rows * U(leaf_selectivity)
//   join       U(join_selectivity) * sqrt(rows_left * rows_right)
//   aggregate  rows_in * U(aggregate_fraction)
//   otherwise  rows_in
// "total-cost" follows a deliberately different (optimizer-like) formula, so
// a linear calibration of the root cost cannot recover the latency exactly.
struct SynthConfig {
  std::size_t plan_count = 2000;
  // Distinct plan shapes; 0 draws a fresh shape for every plan.
  std::size_t template_count = 60;
  std::size_t relation_count = 8;
  // Relative weights of leaf and internal operator kinds.
  std::map<std::string, double> leaf_mix = {{"seq-scan", 2.0}, {"index-scan", 1.0}};
  std::map<std::string, double> internal_mix = {{"hash-join", 2.0},
                                                {"merge-join", 1.0},
                                                {"nested-loop-join", 1.0},
                                                {"sort", 1.0},
                                                {"aggregate", 1.0}};
  std::size_t min_depth = 1;
  std::size_t max_depth = 4;
  // Arity bounds for internal operators.
  std::size_t min_fanout = 1;
  std::size_t max_fanout = 2;
  std::map<std::string, KindCoefficients> coefficients = default_coefficients();
  // Base relation sizes, drawn log-uniformly per relation.
  Range relation_rows{5.0e4, 1.0e6};
  Range leaf_selectivity{0.2, 1.0};
  Range join_selectivity{0.2, 1.0};
  Range aggregate_fraction{0.001, 0.05};
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;

  static std::map<std::string, KindCoefficients> default_coefficients();
  // Throws UsageError on empty ranges, negative sigma, or mixes naming
  // kinds of the wrong arity.
  void validate(const Schema& schema) const;
  nlohmann::json to_json() const;
};

// Deterministic in the config (including the seed).
Corpus synth_generate(const SynthConfig& config, const Schema& schema = Schema::postgres_default());

}  // namespace qppnet::ingest

#include "qppnet/ingest/synth.hpp"

#include <cmath>

#include <fmt/format.h>

#include "qppnet/error.hpp"
#include "qppnet/random.hpp"

namespace qppnet::ingest {

std::map<std::string, KindCoefficients> SynthConfig::default_coefficients() {
  return {
      {"seq-scan", {1.0e-6, 0.02, 0.0}},
      {"index-scan", {2.5e-6, 0.005, 0.0}},
      {"hash-join", {4.0e-7, 0.01, 1.5e-6}},
      {"merge-join", {3.0e-7, 0.01, 2.5e-6}},
      {"nested-loop-join", {2.0e-7, 0.005, 5.0e-6}},
      {"sort", {1.2e-6, 0.005, 0.0}},
      {"aggregate", {8.0e-7, 0.002, 0.0}},
  };
}

namespace {

bool is_join(const std::string& kind) { return kind.ends_with("-join"); }

void check_range(const Range& r, const char* name, bool positive) {
  if (!(r.min <= r.max) || !std::isfinite(r.min) || !std::isfinite(r.max) ||
      (positive && !(r.min > 0.0))) {
    throw UsageError(fmt::format("synth: invalid range {} [{}, {}]", name, r.min, r.max));
  }
}

struct TemplateNode {
  std::string kind;
  std::size_t relation = 0;
  double width = 0.0;
  std::string join_type;
  std::string sort_method;
  std::string strategy;
  std::vector<TemplateNode> children;
};

struct Weighted {
  std::vector<std::string> kinds;
  std::vector<double> cumulative;

  const std::string& pick(SplitMix64& rng) const {
    const double u = rng.uniform() * cumulative.back();
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      if (u < cumulative[i]) return kinds[i];
    }
    return kinds.back();
  }
};

Weighted weighted(const std::map<std::string, double>& mix, const Schema& schema, bool leaf,
                  const SynthConfig& cfg) {
  Weighted w;
  double total = 0.0;
  for (const auto& [kind, weight] : mix) {
    if (weight <= 0.0) continue;
    const OperatorKind& k = schema.at(kind);
    if (leaf != k.is_leaf()) continue;
    if (!leaf && (k.max_arity < cfg.min_fanout || k.max_arity > cfg.max_fanout)) continue;
    total += weight;
    w.kinds.push_back(kind);
    w.cumulative.push_back(total);
  }
  return w;
}

class Generator {
 public:
  Generator(const SynthConfig& cfg, const Schema& schema)
      : cfg_(cfg),
        schema_(schema),
        rng_(cfg.seed),
        leaves_(weighted(cfg.leaf_mix, schema, true, cfg)),
        internals_(weighted(cfg.internal_mix, schema, false, cfg)) {
    const double lo = std::log(cfg.relation_rows.min);
    const double hi = std::log(cfg.relation_rows.max);
    for (std::size_t r = 0; r < cfg.relation_count; ++r) {
      relation_rows_.push_back(std::exp(rng_.uniform(lo, hi)));
    }
  }

  TemplateNode make_template() {
    const auto span = cfg_.max_depth - cfg_.min_depth + 1;
    const std::size_t depth = cfg_.min_depth + rng_.below(span);
    return make_node(depth);
  }

  PlanNode instantiate(const TemplateNode& t, double& rows_out, double& cost) {
    PlanNode node;
    node.kind = t.kind;
    const KindCoefficients& coef = coefficients(t.kind);
    double latency = 0.0;

    if (t.children.empty()) {
      const double base = relation_rows_[t.relation];
      const double sel = rng_.uniform(cfg_.leaf_selectivity.min, cfg_.leaf_selectivity.max);
      rows_out = std::max(1.0, std::round(base * sel));
      latency = coef.per_row * rows_out + coef.constant;
      const std::string rel = fmt::format("rel{}", t.relation);
      node.attrs["relation-name"] = rel;
      if (t.kind == "index-scan") {
        cost = 0.4 + 0.03 * rows_out;
        node.attrs["index-name"] = rel + "_pkey";
        node.attrs["scan-direction"] = true;
      } else {
        cost = 0.01 * std::round(base) + 0.0025 * rows_out;
      }
    } else {
      std::vector<double> child_rows;
      double child_cost = 0.0;
      for (const auto& c : t.children) {
        double r = 0.0, k = 0.0;
        node.children.push_back(instantiate(c, r, k));
        latency += *node.children.back().latency;
        child_rows.push_back(r);
        child_cost += k;
      }
      const double rows_in = child_rows.front();
      if (is_join(t.kind) && child_rows.size() == 2) {
        const double cross = std::sqrt(child_rows[0] * child_rows[1]);
        const double sel = rng_.uniform(cfg_.join_selectivity.min, cfg_.join_selectivity.max);
        rows_out = std::max(1.0, std::round(sel * cross));
        latency += coef.interaction * cross;
        cost = child_cost + 0.01 * (child_rows[0] + child_rows[1]) + 0.005 * rows_out;
        node.attrs["join-type"] = t.join_type;
      } else if (t.kind == "aggregate") {
        const double frac =
            rng_.uniform(cfg_.aggregate_fraction.min, cfg_.aggregate_fraction.max);
        rows_out = std::max(1.0, std::round(rows_in * frac));
        cost = child_cost + 0.01 * rows_in;
        node.attrs["strategy"] = t.strategy;
        node.attrs["partial-mode"] = false;
      } else if (t.kind == "sort") {
        rows_out = rows_in;
        cost = child_cost + 0.002 * rows_in * std::log2(rows_in + 1.0);
        node.attrs["sort-method"] = t.sort_method;
      } else {
        rows_out = rows_in;
        cost = child_cost + 0.01 * rows_out;
      }
      latency += coef.per_row * rows_out + coef.constant;
    }

    if (cfg_.noise_sigma > 0.0) latency *= std::exp(cfg_.noise_sigma * rng_.normal());
    node.latency = latency;
    node.attrs["plan-rows"] = rows_out;
    node.attrs["plan-width"] = t.width;
    node.attrs["total-cost"] = cost;
    return node;
  }

 private:
  const KindCoefficients& coefficients(const std::string& kind) const {
    auto it = cfg_.coefficients.find(kind);
    if (it == cfg_.coefficients.end()) {
      throw UsageError(fmt::format("synth: no latency coefficients for '{}'", kind));
    }
    return it->second;
  }

  TemplateNode make_node(std::size_t depth) {
    TemplateNode t;
    t.width = static_cast<double>(8 + rng_.below(249));
    if (depth <= 1) {
      t.kind = leaves_.pick(rng_);
      t.relation = rng_.below(cfg_.relation_count);
      return t;
    }
    t.kind = internals_.pick(rng_);
    static const char* kJoinTypes[] = {"inner", "semi", "anti", "full", "left"};
    static const char* kSortMethods[] = {"quicksort", "top-n heapsort", "external merge"};
    static const char* kStrategies[] = {"plain", "sorted", "hashed"};
    t.join_type = kJoinTypes[rng_.below(5)];
    t.sort_method = kSortMethods[rng_.below(3)];
    t.strategy = kStrategies[rng_.below(3)];
    const std::size_t arity = schema_.at(t.kind).max_arity;
    for (std::size_t i = 0; i < arity; ++i) {
      // The first child carries the full remaining depth.
      const std::size_t d = i == 0 ? depth - 1 : 1 + rng_.below(depth - 1);
      t.children.push_back(make_node(d));
    }
    return t;
  }

  const SynthConfig& cfg_;
  const Schema& schema_;
  SplitMix64 rng_;
  Weighted leaves_;
  Weighted internals_;
  std::vector<double> relation_rows_;
};

}  // namespace

void SynthConfig::validate(const Schema& schema) const {
  if (min_depth < 1 || min_depth > max_depth) {
    throw UsageError(fmt::format("synth: invalid depth range [{}, {}]", min_depth, max_depth));
  }
  if (min_fanout < 1 || min_fanout > max_fanout) {
    throw UsageError(fmt::format("synth: invalid fan-out range [{}, {}]", min_fanout, max_fanout));
  }
  if (relation_count == 0) throw UsageError("synth: relation_count must be positive");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw UsageError("synth: noise sigma must be finite and >= 0");
  }
  check_range(relation_rows, "relation_rows", true);
  check_range(leaf_selectivity, "leaf_selectivity", true);
  check_range(join_selectivity, "join_selectivity", true);
  check_range(aggregate_fraction, "aggregate_fraction", true);
  for (const auto* mix : {&leaf_mix, &internal_mix}) {
    for (const auto& [kind, weight] : *mix) {
      if (schema.find(kind) == nullptr) {
        throw UsageError(fmt::format("synth: kind '{}' is not in the schema", kind));
      }
      if (!(weight >= 0.0)) throw UsageError(fmt::format("synth: negative weight for '{}'", kind));
      if (weight > 0.0 && !coefficients.contains(kind)) {
        throw UsageError(fmt::format("synth: no latency coefficients for '{}'", kind));
      }
    }
  }
  if (weighted(leaf_mix, schema, true, *this).kinds.empty()) {
    throw UsageError("synth: leaf mix has no leaf operator kinds");
  }
  if (max_depth > 1 && weighted(internal_mix, schema, false, *this).kinds.empty()) {
    throw UsageError("synth: internal mix has no kinds within the fan-out range");
  }
}

nlohmann::json SynthConfig::to_json() const {
  nlohmann::json coef = nlohmann::json::object();
  for (const auto& [kind, c] : coefficients) {
    coef[kind] = {{"per_row", c.per_row}, {"constant", c.constant}, {"interaction", c.interaction}};
  }
  auto range = [](const Range& r) { return nlohmann::json::array({r.min, r.max}); };
  return {{"plan_count", plan_count},
          {"template_count", template_count},
          {"relation_count", relation_count},
          {"leaf_mix", leaf_mix},
          {"internal_mix", internal_mix},
          {"depth", {min_depth, max_depth}},
          {"fanout", {min_fanout, max_fanout}},
          {"coefficients", coef},
          {"relation_rows", range(relation_rows)},
          {"leaf_selectivity", range(leaf_selectivity)},
          {"join_selectivity", range(join_selectivity)},
          {"aggregate_fraction", range(aggregate_fraction)},
          {"noise_sigma", noise_sigma},
          {"seed", seed}};
}

Corpus synth_generate(const SynthConfig& config, const Schema& schema) {
  config.validate(schema);
  Generator gen(config, schema);
  std::vector<TemplateNode> templates;
  for (std::size_t i = 0; i < config.template_count; ++i) templates.push_back(gen.make_template());

  Corpus corpus;
  corpus.provenance = {{"generator", "synth"}, {"config", config.to_json()}};
  for (std::size_t i = 0; i < config.plan_count; ++i) {
    PlanTree tree;
    tree.id = fmt::format("q{}", i);
    double rows = 0.0, cost = 0.0;
    if (templates.empty()) {
      const TemplateNode t = gen.make_template();
      tree.template_name = fmt::format("t{}", i);
      tree.root = gen.instantiate(t, rows, cost);
    } else {
      const std::size_t k = i % templates.size();
      tree.template_name = fmt::format("t{}", k);
      tree.root = gen.instantiate(templates[k], rows, cost);
    }
    corpus.plans.push_back(std::move(tree));
  }
  return corpus;
}

}  // namespace qppnet::ingest

#include <cmath>
#include <functional>
#include <set>
#include <string>

#include "doctest.h"
#include "qppnet/error.hpp"
#include "qppnet/hash.hpp"
#include "qppnet/ingest/corpus.hpp"
#include "qppnet/ingest/encoder.hpp"
#include "qppnet/ingest/explain.hpp"
#include "qppnet/ingest/signature.hpp"
#include "qppnet/ingest/synth.hpp"
#include "qppnet/random.hpp"

using namespace qppnet;
using namespace qppnet::ingest;

namespace {

PlanNode node(std::string kind, AttrMap attrs = {}, std::vector<PlanNode> children = {},
              std::optional<double> latency = std::nullopt) {
  PlanNode n;
  n.kind = std::move(kind);
  n.attrs = std::move(attrs);
  n.children = std::move(children);
  n.latency = latency;
  return n;
}

PlanTree tree(std::string id, PlanNode root, std::string tmpl = "") {
  return PlanTree{std::move(id), std::move(tmpl), std::move(root)};
}

const AttributeEncoding& attr(const FeatureEncoder& enc, const std::string& kind,
                              const std::string& name) {
  for (const auto& a : enc.kind(kind).attributes) {
    if (a.spec.name == name) return a;
  }
  throw std::runtime_error("no attribute " + name);
}

std::vector<double> slots(const FeatureEncoder& enc, const PlanNode& n, const std::string& name) {
  const auto& a = attr(enc, n.kind, name);
  const auto v = enc.encode(n);
  return {v.begin() + static_cast<std::ptrdiff_t>(a.offset),
          v.begin() + static_cast<std::ptrdiff_t>(a.offset + a.width)};
}

const Schema& pg() {
  static const Schema s = Schema::postgres_default();
  return s;
}

}  // namespace

TEST_SUITE("ingest") {

// --- plan -----------------------------------------------------------------

TEST_CASE("preorder, paths, size and depth") {
  const PlanNode root =
      node("hash-join", {}, {node("seq-scan"), node("sort", {}, {node("seq-scan")})});
  CHECK(root.size() == 4);
  CHECK(root.depth() == 3);
  const auto order = preorder(root);
  REQUIRE(order.size() == 4);
  CHECK(order[0]->kind == "hash-join");
  CHECK(order[1]->kind == "seq-scan");
  CHECK(order[2]->kind == "sort");
  CHECK(preorder_paths(root) == std::vector<std::string>{"0", "0.0", "0.1", "0.1.0"});
}

// --- schema -----------------------------------------------------------------

TEST_CASE("canonical kind names") {
  CHECK(canonical_kind_name("Hash Join") == "hash-join");
  CHECK(canonical_kind_name("Index Only Scan") == "index-only-scan");
  CHECK(canonical_kind_name("WindowAgg") == "window-agg");
  CHECK(canonical_kind_name("BitmapAnd") == "bitmap-and");
  CHECK(pg().kind_for_node_type("Nested Loop") == "nested-loop-join");
  CHECK(pg().kind_for_node_type("Seq Scan") == "seq-scan");
  CHECK_FALSE(pg().kind_for_node_type("Custom Scan").has_value());
}

TEST_CASE("schema invariants") {
  for (const auto& k : pg().kinds()) {
    if (k.name.find("scan") != std::string::npos && k.name != "bitmap-heap-scan" &&
        k.name != "subquery-scan") {
      CHECK_MESSAGE(k.is_leaf(), k.name);
    }
  }
  CHECK(pg().at("hash-join").max_arity == 2);
  CHECK_THROWS_AS(Schema(std::vector<OperatorKind>{{"a", 0, {}}, {"a", 1, {}}}), SchemaError);
  CHECK_THROWS_AS(Schema(std::vector<OperatorKind>{{"a", 0, {}}}, std::string("missing")),
                  SchemaError);
  CHECK(Schema::from_json(pg().to_json()) == pg());
}

// --- explain ---------------------------------------------------------------

TEST_CASE("single-node EXPLAIN document") {
  const auto t = parse_explain_json(
      R"([{"Plan": {"Node Type": "Seq Scan", "Plan Rows": 1000, "Total Cost": 25.0}}])", pg());
  CHECK(t.root.kind == "seq-scan");
  CHECK(t.root.children.empty());
  CHECK(t.root.numeric("plan-rows") == 1000.0);
  CHECK(t.root.numeric("total-cost") == 25.0);
  CHECK(t.root.attr("plan-width") == nullptr);
  CHECK_FALSE(t.root.latency.has_value());
}

TEST_CASE("nested join keeps child order and converts timings") {
  const auto t = parse_explain_json(R"({"Query Id": "q1", "Template": "t9", "Plan": {
      "Node Type": "Hash Join", "Join Type": "Inner", "Actual Total Time": 12.5, "Actual Loops": 1,
      "Plans": [
        {"Node Type": "Seq Scan", "Relation Name": "orders",
         "Actual Total Time": 4.0, "Actual Loops": 1},
        {"Node Type": "Hash", "Actual Total Time": 3.0, "Actual Loops": 2,
         "Plans": [{"Node Type": "Index Scan", "Relation Name": "lineitem",
                    "Scan Direction": "Forward",
                    "Actual Total Time": 1.0, "Actual Loops": 1}]}]}})",
                                    pg());
  CHECK(t.id == "q1");
  CHECK(t.template_name == "t9");
  CHECK(t.root.kind == "hash-join");
  REQUIRE(t.root.children.size() == 2);
  CHECK(t.root.children[0].kind == "seq-scan");
  CHECK(t.root.children[1].kind == "hash");
  CHECK(std::get<std::string>(*t.root.attr("join-type")) == "inner");
  CHECK(std::get<bool>(*t.root.children[1].children[0].attr("scan-direction")));
  CHECK(*t.root.latency == doctest::Approx(0.0125).epsilon(1e-15));
  CHECK(*t.root.children[1].latency == doctest::Approx(0.006).epsilon(1e-15));
  CHECK(t.root.fully_labeled());
}

TEST_CASE("EXPLAIN errors carry the JSON path") {
  auto message = [](std::string_view text, ExplainOptions o = {}) {
    try {
      parse_explain_json(text, pg(), o);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("{not json").find("malformed JSON") != std::string::npos);
  CHECK(message(R"([{"Plan": {"Node Type": "Hash Join",
                             "Plans": [{"Node Type": "Seq Scan"}, {}]}}])")
            .rfind("$[0].Plan.Plans[1]", 0) == 0);
  CHECK(message(R"([{"Plan": {"Node Type": "Seq Scan", "Plan Rows": "many"}}])")
            .find("\"Plan Rows\"") != std::string::npos);
  CHECK(message(R"([{"Plan": {"Node Type": "Mystery Op"}}])", {true}).find("unknown node type") !=
        std::string::npos);
  CHECK(message(R"([{"Plan": {"Node Type": "Seq Scan", "Plans": [{"Node Type": "Seq Scan"}]}}])")
            .find("at most 0") != std::string::npos);
}

TEST_CASE("unknown node types fall back unless strict") {
  const auto t = parse_explain_json(R"({"Plan": {"Node Type": "Mystery Op"}})", pg());
  CHECK(t.root.kind == "other");
}

TEST_CASE("multiple statements and newline-delimited documents") {
  const std::string array = R"([{"Plan": {"Node Type": "Seq Scan"}}, {"Plan": {"Node Type": "Sort",
      "Plans": [{"Node Type": "Seq Scan"}]}}])";
  CHECK(parse_explain_documents(array, pg()).size() == 2);
  const std::string lines = "{\"Plan\": {\"Node Type\": \"Seq Scan\"}}\n\n"
                            "[{\"Plan\": {\"Node Type\": \"Limit\", \"Plans\": "
                            "[{\"Node Type\": \"Seq Scan\"}]}}]\n";
  const auto trees = parse_explain_documents(lines, pg());
  REQUIRE(trees.size() == 2);
  CHECK(trees[1].root.kind == "limit");
}

// --- corpus ------------------------------------------------------------------

TEST_CASE("native corpus round trip is exact") {
  SynthConfig cfg;
  cfg.plan_count = 50;
  cfg.seed = 4;
  Corpus c = synth_generate(cfg);
  // Values that stress shortest round-trip printing.
  c.plans[0].root.attrs["plan-width"] = 0.1 + 0.2;
  c.plans[0].root.attrs["plan-rows"] = 1e-300;
  c.plans[1].root.attrs["attribute-mins"] =
      std::vector<double>{-0.0, 5e-324, 1.7976931348623157e308};
  c.plans[2].root.latency.reset();
  const std::string text = write_corpus(c);
  const Corpus back = read_corpus(text);
  CHECK(back.plans == c.plans);
  CHECK(back.provenance == c.provenance);
  CHECK(write_corpus(back) == text);
  CHECK_FALSE(back.labeled());
}

TEST_CASE("random plan trees survive the native format") {
  SplitMix64 rng(77);
  const char* kinds[] = {"seq-scan", "sort", "hash-join", "aggregate"};
  for (int trial = 0; trial < 100; ++trial) {
    std::function<PlanNode(int)> make = [&](int depth) {
      PlanNode n;
      n.kind = kinds[rng.below(4)];
      n.attrs["plan-rows"] = rng.uniform(-1e6, 1e6);
      if (rng.below(2)) {
        n.attrs["relation-name"] = std::string("r,\"") + std::to_string(rng.below(9));
      }
      if (rng.below(2)) n.attrs["partial-mode"] = rng.below(2) == 1;
      if (rng.below(3) == 0) n.latency = rng.uniform(0, 10);
      if (depth > 0) {
        for (std::uint64_t c = rng.below(3); c > 0; --c) n.children.push_back(make(depth - 1));
      }
      return n;
    };
    Corpus c;
    c.plans.push_back(tree("p" + std::to_string(trial), make(3), "t"));
    CHECK(read_corpus(write_corpus(c)).plans == c.plans);
  }
}

TEST_CASE("corpus header is validated") {
  CHECK_THROWS_AS(read_corpus(""), ParseError);
  CHECK_THROWS_AS(read_corpus(R"({"format":"other","version":1,"count":0})"), ParseError);
  CHECK_THROWS_AS(read_corpus(R"({"format":"qppnet-corpus","version":99,"count":0})"), ParseError);
  CHECK_THROWS_AS(read_corpus(R"({"format":"qppnet-corpus","version":1,"count":2})"), ParseError);
  SynthConfig cfg;
  cfg.plan_count = 0;
  const Corpus empty = synth_generate(cfg);
  CHECK(empty.plans.empty());
  CHECK(read_corpus(write_corpus(empty)).plans.empty());
}

// --- encoder -----------------------------------------------------------------

TEST_CASE("whitening example {1,2,3}") {
  std::vector<PlanTree> corpus;
  for (double v : {1.0, 2.0, 3.0}) {
    corpus.push_back(tree("q", node("seq-scan", {{"plan-rows", v}})));
  }
  const auto enc = fit_encoder(corpus, pg());
  const auto& a = attr(enc, "seq-scan", "plan-rows");
  CHECK(a.mean[0] == 2.0);
  CHECK(a.stddev[0] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
  CHECK(slots(enc, corpus[0].root, "plan-rows")[0] == doctest::Approx(-1.224744871391589));
  CHECK(slots(enc, corpus[1].root, "plan-rows")[0] == 0.0);
  CHECK(slots(enc, corpus[2].root, "plan-rows")[0] == doctest::Approx(1.224744871391589));
}

TEST_CASE("constant column keeps std 1") {
  std::vector<PlanTree> corpus;
  for (int i = 0; i < 2; ++i) corpus.push_back(tree("q", node("seq-scan", {{"plan-rows", 5.0}})));
  const auto enc = fit_encoder(corpus, pg());
  CHECK(attr(enc, "seq-scan", "plan-rows").stddev[0] == 1.0);
  CHECK(slots(enc, corpus[0].root, "plan-rows")[0] == 0.0);
}

TEST_CASE("collected vocabulary has an unknown slot") {
  const auto enc = fit_encoder(
      std::vector<PlanTree>{tree("q", node("sort", {{"sort-method", std::string("quicksort")}}))},
      pg());
  const auto& a = attr(enc, "sort", "sort-method");
  CHECK(a.vocabulary == std::vector<std::string>{"quicksort"});
  CHECK(a.width == 2);
  CHECK(slots(enc, node("sort", {{"sort-method", std::string("quicksort")}}), "sort-method") ==
        std::vector<double>{1, 0});
  CHECK(slots(enc, node("sort", {{"sort-method", std::string("external merge")}}), "sort-method") ==
        std::vector<double>{0, 1});
  CHECK(slots(enc, node("sort"), "sort-method") == std::vector<double>{0, 0});
}

TEST_CASE("join type uses the fixed vocabulary") {
  const auto enc = fit_encoder(std::vector<PlanTree>{tree("q", node("hash-join"))}, pg());
  CHECK(attr(enc, "hash-join", "join-type").vocabulary ==
        std::vector<std::string>{"semi", "inner", "anti", "full"});
  CHECK(slots(enc, node("hash-join", {{"join-type", std::string("inner")}}), "join-type") ==
        std::vector<double>{0, 1, 0, 0, 0});
  CHECK(slots(enc, node("hash-join", {{"join-type", std::string("left")}}), "join-type") ==
        std::vector<double>{0, 0, 0, 0, 1});
}

TEST_CASE("missing values encode as zero; mean encodes as zero") {
  std::vector<PlanTree> corpus = {tree("a", node("seq-scan", {{"plan-rows", 10.0}})),
                                  tree("b", node("seq-scan", {{"plan-rows", 30.0}}))};
  const auto enc = fit_encoder(corpus, pg());
  CHECK(slots(enc, node("seq-scan"), "plan-rows")[0] == 0.0);
  CHECK(slots(enc, node("seq-scan", {{"plan-rows", 20.0}}), "plan-rows")[0] == 0.0);
  for (double v : enc.encode(node("seq-scan"))) CHECK(v == 0.0);
}

TEST_CASE("numeric vectors are padded, truncated and whitened per element") {
  std::vector<PlanTree> corpus = {
      tree("a", node("seq-scan", {{"attribute-mins", std::vector<double>{1, 2}}})),
      tree("b", node("seq-scan", {{"attribute-mins", std::vector<double>{3, 4, 5, 6, 7}}}))};
  const auto enc = fit_encoder(corpus, pg());
  const auto& a = attr(enc, "seq-scan", "attribute-mins");
  CHECK(a.width == 4);
  CHECK(slots(enc, corpus[0].root, "attribute-mins") == std::vector<double>{-1, -1, 0, 0});
  CHECK(slots(enc, corpus[1].root, "attribute-mins") == std::vector<double>{1, 1, 0, 0});
}

TEST_CASE("encoded width is fixed per kind") {
  SynthConfig cfg;
  cfg.plan_count = 100;
  const auto c = synth_generate(cfg);
  const auto enc = fit_encoder(c.plans, pg());
  for (const auto& t : c.plans) {
    for (const auto* n : preorder(t.root)) CHECK(enc.encode(*n).size() == enc.width(n->kind));
  }
}

TEST_CASE("one-hot segments sum to one for present values") {
  SynthConfig cfg;
  cfg.plan_count = 100;
  const auto c = synth_generate(cfg);
  const auto enc = fit_encoder(c.plans, pg());
  for (const auto& t : c.plans) {
    for (const auto* n : preorder(t.root)) {
      const auto v = enc.encode(*n);
      for (const auto& a : enc.kind(n->kind).attributes) {
        if (a.spec.encoding != Encoding::one_hot) continue;
        double sum = 0;
        for (std::size_t i = 0; i < a.width; ++i) sum += v[a.offset + i];
        CHECK(sum == (n->attr(a.spec.name) ? 1.0 : 0.0));
      }
    }
  }
}

TEST_CASE("encoder errors") {
  const auto enc = fit_encoder(std::vector<PlanTree>{tree("q", node("seq-scan"))}, pg());
  CHECK_THROWS_AS(enc.encode(node("no-such-kind")), EncodingError);
  CHECK_THROWS_AS(enc.encode(node("seq-scan", {}, {node("seq-scan")})), EncodingError);
  CHECK_THROWS_AS(enc.encode(node("seq-scan", {{"plan-rows", std::string("x")}})), EncodingError);
  CHECK_THROWS_AS(fit_encoder(std::vector<PlanTree>{}, pg()), UsageError);
  CHECK_THROWS_AS(fit_encoder(std::vector<PlanTree>{tree("q", node("no-such-kind"))}, pg()),
                  SchemaError);
}

TEST_CASE("encoder persistence and refit determinism") {
  SynthConfig cfg;
  cfg.plan_count = 80;
  const auto c = synth_generate(cfg);
  const auto enc = fit_encoder(c.plans, pg());
  const auto back = FeatureEncoder::from_json(nlohmann::json::parse(enc.to_json().dump()));
  CHECK(back == enc);
  CHECK(back.content_hash() == enc.content_hash());
  CHECK(fit_encoder(c.plans, pg()).to_json().dump() == enc.to_json().dump());
  CHECK(enc.to_json()["format"] == "qppnet-encoder");
  CHECK(enc.to_json()["version"] == kEncoderFormatVersion);
}

// --- signature ---------------------------------------------------------------

TEST_CASE("structure signatures") {
  const PlanNode a = node("hash-join", {}, {node("seq-scan"), node("seq-scan")});
  const PlanNode b =
      node("hash-join", {}, {node("seq-scan"), node("sort", {}, {node("seq-scan")})});
  PlanNode a2 = a;
  a2.children[0].attrs["plan-rows"] = 99.0;
  CHECK(structure_signature(a) == structure_signature(a));
  CHECK(structure_signature(a) != structure_signature(b));
  CHECK(structure_signature(a) == structure_signature(a2));
  CHECK(structure_signature(b).text == "hash-join(seq-scan,sort(seq-scan))");
  // Same kinds, different shape.
  CHECK(structure_signature(node("sort", {}, {node("sort", {}, {node("seq-scan")})})) !=
        structure_signature(node("sort", {}, {node("sort"), node("seq-scan")})));
}

TEST_CASE("signature groups are structurally uniform") {
  SynthConfig cfg;
  cfg.plan_count = 300;
  cfg.template_count = 0;
  const auto c = synth_generate(cfg);
  std::vector<const PlanTree*> ptrs;
  for (const auto& t : c.plans) ptrs.push_back(&t);
  const auto groups = group_by_signature(ptrs);
  std::size_t total = 0;
  for (const auto& [sig, members] : groups) {
    total += members.size();
    const auto first = preorder(ptrs[members[0]]->root);
    for (std::size_t m : members) {
      const auto nodes = preorder(ptrs[m]->root);
      REQUIRE(nodes.size() == first.size());
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        CHECK(nodes[i]->kind == first[i]->kind);
        CHECK(nodes[i]->children.size() == first[i]->children.size());
      }
    }
  }
  CHECK(total == c.plans.size());
}

// --- synth -------------------------------------------------------------------

TEST_CASE("noise-free single scan latency") {
  SynthConfig cfg;
  cfg.plan_count = 1;
  cfg.noise_sigma = 0;
  cfg.min_depth = cfg.max_depth = 1;
  cfg.leaf_mix = {{"seq-scan", 1.0}};
  cfg.relation_rows = {100, 100};
  cfg.leaf_selectivity = {1, 1};
  cfg.coefficients["seq-scan"] = {0.001, 0.01, 0};
  const auto c = synth_generate(cfg);
  REQUIRE(c.plans.size() == 1);
  CHECK(c.plans[0].root.numeric("plan-rows") == 100.0);
  CHECK(*c.plans[0].root.latency == doctest::Approx(0.11).epsilon(1e-12));
}

TEST_CASE("synth is seed deterministic") {
  SynthConfig cfg;
  cfg.plan_count = 200;
  cfg.seed = 17;
  CHECK(write_corpus(synth_generate(cfg)) == write_corpus(synth_generate(cfg)));
  SynthConfig other = cfg;
  other.seed = 18;
  CHECK(write_corpus(synth_generate(cfg)) != write_corpus(synth_generate(other)));
}

TEST_CASE("the acceptance corpus is pinned") {
  SynthConfig cfg;
  cfg.plan_count = 2000;
  cfg.noise_sigma = 0.1;
  cfg.seed = 2024;
  Corpus c = synth_generate(cfg);
  CHECK(c.plans.size() == 2000);
  CHECK(c.labeled());
  // Regression fixture: any change to the generator shows up here. The
  // provenance block carries the tool version, so it is left out.
  c.provenance = nlohmann::json::object();
  CHECK(sha256_hex(write_corpus(c)) ==
        "e9975538df5cfe96d139f12cfc716c1be5a904ec28cacf2d9dc39495bc620afd");
}

TEST_CASE("noise-free joins cost at least their inputs") {
  SynthConfig cfg;
  cfg.plan_count = 300;
  cfg.noise_sigma = 0;
  cfg.template_count = 0;
  const auto c = synth_generate(cfg);
  std::size_t joins = 0;
  for (const auto& t : c.plans) {
    for (const auto* n : preorder(t.root)) {
      double sum = 0;
      for (const auto& ch : n->children) sum += *ch.latency;
      CHECK(*n->latency >= sum);
      if (n->children.size() == 2) ++joins;
    }
  }
  CHECK(joins > 0);
}

TEST_CASE("synth config validation") {
  SynthConfig cfg;
  cfg.noise_sigma = -1;
  CHECK_THROWS_AS(synth_generate(cfg), UsageError);
  cfg = {};
  cfg.min_depth = 3;
  cfg.max_depth = 2;
  CHECK_THROWS_AS(synth_generate(cfg), UsageError);
  cfg = {};
  cfg.leaf_mix = {{"hash-join", 1.0}};
  CHECK_THROWS_AS(synth_generate(cfg), UsageError);
}

}  // TEST_SUITE

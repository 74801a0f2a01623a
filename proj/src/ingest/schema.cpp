#include "qppnet/ingest/schema.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <fmt/format.h>

#include "qppnet/error.hpp"

namespace qppnet::ingest {

const char* to_string(Encoding e) {
  switch (e) {
    case Encoding::numeric:
      return "numeric";
    case Encoding::boolean:
      return "boolean";
    case Encoding::one_hot:
      return "one-hot";
    case Encoding::numeric_vector:
      return "numeric-vector";
  }
  return "numeric";
}

Encoding encoding_from_string(const std::string& s) {
  if (s == "numeric") return Encoding::numeric;
  if (s == "boolean") return Encoding::boolean;
  if (s == "one-hot") return Encoding::one_hot;
  if (s == "numeric-vector") return Encoding::numeric_vector;
  throw SchemaError(fmt::format("unknown attribute encoding '{}'", s));
}

std::string canonical_kind_name(const std::string& node_type) {
  std::string out;
  char prev = ' ';
  for (char c : node_type) {
    if (c == ' ' || c == '_' || c == '-') {
      if (!out.empty() && out.back() != '-') out.push_back('-');
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      if (!out.empty() && out.back() != '-' && std::islower(static_cast<unsigned char>(prev))) {
        out.push_back('-');
      }
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      out.push_back(c);
    }
    prev = c;
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out;
}

Schema::Schema(std::vector<OperatorKind> kinds, std::optional<std::string> fallback_kind,
               std::map<std::string, std::string> aliases)
    : kinds_(std::move(kinds)), fallback_(std::move(fallback_kind)), aliases_(std::move(aliases)) {
  std::sort(kinds_.begin(), kinds_.end(),
            [](const OperatorKind& a, const OperatorKind& b) { return a.name < b.name; });
  for (std::size_t i = 0; i < kinds_.size(); ++i) {
    const auto& k = kinds_[i];
    if (k.name.empty() || k.name.find_first_of("(),") != std::string::npos) {
      throw SchemaError(fmt::format("invalid kind name '{}'", k.name));
    }
    if (i > 0 && kinds_[i - 1].name == k.name) {
      throw SchemaError(fmt::format("duplicate kind '{}'", k.name));
    }
    std::set<std::string> names;
    for (const auto& a : k.attributes) {
      if (!names.insert(a.name).second) {
        throw SchemaError(fmt::format("kind '{}' declares attribute '{}' twice", k.name, a.name));
      }
      if (a.encoding == Encoding::numeric_vector && a.length == 0) {
        throw SchemaError(fmt::format("attribute '{}' of '{}' has zero length", a.name, k.name));
      }
    }
  }
  if (fallback_ && find(*fallback_) == nullptr) {
    throw SchemaError(fmt::format("fallback kind '{}' is not declared", *fallback_));
  }
}

const OperatorKind* Schema::find(const std::string& name) const {
  auto it =
      std::lower_bound(kinds_.begin(), kinds_.end(), name,
                       [](const OperatorKind& k, const std::string& n) { return k.name < n; });
  return it != kinds_.end() && it->name == name ? &*it : nullptr;
}

const OperatorKind& Schema::at(const std::string& name) const {
  const OperatorKind* k = find(name);
  if (k == nullptr) throw SchemaError(fmt::format("unknown operator kind '{}'", name));
  return *k;
}

std::optional<std::string> Schema::kind_for_node_type(const std::string& node_type) const {
  if (auto it = aliases_.find(node_type); it != aliases_.end()) {
    if (find(it->second) != nullptr) return it->second;
  }
  std::string name = canonical_kind_name(node_type);
  if (auto it = aliases_.find(name); it != aliases_.end()) name = it->second;
  if (find(name) != nullptr) return name;
  return std::nullopt;
}

Schema Schema::postgres_default(std::size_t attribute_vector_length) {
  auto numeric = [](std::string name, std::string source) {
    return AttributeSpec{std::move(name), std::move(source), Encoding::numeric, 1, {}};
  };
  auto one_hot = [](std::string name, std::string source,
                    std::vector<std::string> vocabulary = {}) {
    return AttributeSpec{std::move(name), std::move(source), Encoding::one_hot, 1,
                         std::move(vocabulary)};
  };
  auto boolean = [](std::string name, std::string source) {
    return AttributeSpec{std::move(name), std::move(source), Encoding::boolean, 1, {}};
  };
  auto vec = [&](std::string name, std::string source) {
    return AttributeSpec{std::move(name), std::move(source), Encoding::numeric_vector,
                         attribute_vector_length, {}};
  };

  const std::vector<AttributeSpec> common = {
      numeric("plan-width", "Plan Width"),     numeric("plan-rows", "Plan Rows"),
      numeric("plan-buffers", "Plan Buffers"), numeric("estimated-ios", "Estimated I/Os"),
      numeric("total-cost", "Total Cost"),
  };
  auto with = [&](std::vector<AttributeSpec> extra) {
    std::vector<AttributeSpec> attrs = common;
    attrs.insert(attrs.end(), extra.begin(), extra.end());
    return attrs;
  };

  // Closed vocabularies; anything else (e.g. "left") lands in the unknown slot.
  const std::vector<AttributeSpec> join = {
      one_hot("join-type", "Join Type", {"semi", "inner", "anti", "full"}),
      one_hot("parent-relationship", "Parent Relationship", {"inner", "outer", "subquery"})};
  const std::vector<AttributeSpec> scan = {one_hot("relation-name", "Relation Name"),
                                           vec("attribute-mins", "Attribute Mins"),
                                           vec("attribute-medians", "Attribute Medians"),
                                           vec("attribute-maxs", "Attribute Maxs")};
  std::vector<AttributeSpec> index_scan = scan;
  index_scan.push_back(one_hot("index-name", "Index Name"));
  index_scan.push_back(boolean("scan-direction", "Scan Direction"));
  const std::vector<AttributeSpec> sort = {one_hot("sort-key", "Sort Key"),
                                           one_hot("sort-method", "Sort Method")};
  const std::vector<AttributeSpec> hash = {numeric("hash-buckets", "Hash Buckets"),
                                           one_hot("hash-algorithm", "Hash Algorithm")};
  const std::vector<AttributeSpec> aggregate = {one_hot("strategy", "Strategy",
                                                        {"plain", "sorted", "hashed"}),
                                                boolean("partial-mode", "Partial Mode"),
                                                one_hot("operator", "Operator")};

  std::vector<OperatorKind> kinds = {
      {"seq-scan", 0, with(scan)},
      {"index-scan", 0, with(index_scan)},
      {"index-only-scan", 0, with(index_scan)},
      {"bitmap-index-scan", 0, with({one_hot("index-name", "Index Name")})},
      {"bitmap-heap-scan", 1, with(scan)},
      {"cte-scan", 0, with({})},
      {"function-scan", 0, with({})},
      {"values-scan", 0, with({})},
      {"subquery-scan", 1, with({})},
      {"hash-join", 2, with(join)},
      {"merge-join", 2, with(join)},
      {"nested-loop-join", 2, with(join)},
      {"sort", 1, with(sort)},
      {"incremental-sort", 1, with(sort)},
      {"hash", 1, with(hash)},
      {"aggregate", 1, with(aggregate)},
      {"group", 1, with({})},
      {"unique", 1, with({})},
      {"limit", 1, with({})},
      {"materialize", 1, with({})},
      {"memoize", 1, with({})},
      {"gather", 1, with({})},
      {"gather-merge", 1, with({})},
      {"window-agg", 1, with({})},
      {"result", 1, with({})},
      {"set-op", 1, with({})},
      {"append", 8, with({})},
      {"merge-append", 8, with({})},
      {"bitmap-and", 4, with({})},
      {"bitmap-or", 4, with({})},
      {"other", 4, with({})},
  };
  return Schema(std::move(kinds), "other", {{"nested-loop", "nested-loop-join"}});
}

nlohmann::json Schema::to_json() const {
  nlohmann::json kinds = nlohmann::json::array();
  for (const auto& k : kinds_) {
    nlohmann::json attrs = nlohmann::json::array();
    for (const auto& a : k.attributes) {
      nlohmann::json ja = {{"name", a.name},
                           {"source", a.source},
                           {"encoding", to_string(a.encoding)}};
      if (a.encoding == Encoding::numeric_vector) ja["length"] = a.length;
      if (!a.vocabulary.empty()) ja["vocabulary"] = a.vocabulary;
      attrs.push_back(std::move(ja));
    }
    kinds.push_back({{"name", k.name}, {"max_arity", k.max_arity}, {"attributes", attrs}});
  }
  nlohmann::json j = {{"kinds", kinds}, {"aliases", aliases_}};
  j["fallback_kind"] = fallback_ ? nlohmann::json(*fallback_) : nlohmann::json(nullptr);
  return j;
}

Schema Schema::from_json(const nlohmann::json& j) {
  try {
    std::vector<OperatorKind> kinds;
    for (const auto& jk : j.at("kinds")) {
      OperatorKind k;
      k.name = jk.at("name").get<std::string>();
      k.max_arity = jk.at("max_arity").get<std::size_t>();
      for (const auto& ja : jk.at("attributes")) {
        AttributeSpec a;
        a.name = ja.at("name").get<std::string>();
        a.source = ja.value("source", std::string());
        a.encoding = encoding_from_string(ja.at("encoding").get<std::string>());
        a.length = ja.value("length", std::size_t{1});
        a.vocabulary = ja.value("vocabulary", std::vector<std::string>{});
        k.attributes.push_back(std::move(a));
      }
      kinds.push_back(std::move(k));
    }
    std::optional<std::string> fallback;
    if (j.contains("fallback_kind") && !j.at("fallback_kind").is_null()) {
      fallback = j.at("fallback_kind").get<std::string>();
    }
    auto aliases = j.value("aliases", std::map<std::string, std::string>{});
    return Schema(std::move(kinds), std::move(fallback), std::move(aliases));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(fmt::format("malformed schema document: {}", e.what()));
  }
}

}  // namespace qppnet::ingest

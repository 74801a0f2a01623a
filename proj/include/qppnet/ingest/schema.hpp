#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace qppnet::ingest {

enum class Encoding { numeric, boolean, one_hot, numeric_vector };

const char* to_string(Encoding e);
Encoding encoding_from_string(const std::string& s);

struct AttributeSpec {
  std::string name;
  // Key of the value in a PostgreSQL EXPLAIN node, e.g. "Plan Rows".
  std::string source;
  Encoding encoding = Encoding::numeric;
  // Block length for numeric_vector attributes (zero-padded / truncated).
  std::size_t length = 1;
  // Fixed one-hot vocabulary. Empty means "collect from training data".
  std::vector<std::string> vocabulary;

  friend bool operator==(const AttributeSpec&, const AttributeSpec&) = default;
};

struct OperatorKind {
  std::string name;
  std::size_t max_arity = 0;
  std::vector<AttributeSpec> attributes;

  bool is_leaf() const { return max_arity == 0; }
  friend bool operator==(const OperatorKind&, const OperatorKind&) = default;
};

// Operator kinds, their attributes, and how EXPLAIN "Node Type" strings map
// onto kind names.
class Schema {
 public:
  Schema() = default;
  // Throws SchemaError on duplicate kind names or an invalid fallback.
  explicit Schema(std::vector<OperatorKind> kinds,
                  std::optional<std::string> fallback_kind = std::nullopt,
                  std::map<std::string, std::string> aliases = {});

  // Operator set and attributes of the PostgreSQL feature table: five
  // optimizer estimates on every operator plus join, hash, sort, scan and
  // aggregate specific inputs. attribute_vector_length sizes the
  // Attribute Mins/Medians/Maxs blocks of scans.
  static Schema postgres_default(std::size_t attribute_vector_length = 4);

  const std::vector<OperatorKind>& kinds() const { return kinds_; }
  const OperatorKind* find(const std::string& name) const;
  const OperatorKind& at(const std::string& name) const;
  const std::optional<std::string>& fallback_kind() const { return fallback_; }

  // Maps an EXPLAIN "Node Type" to a kind name: aliases first, then the
  // canonical kebab-case form ("Hash Join" -> "hash-join",
  // "WindowAgg" -> "window-agg"). Returns nullopt when the result is not a
  // kind of this schema.
  std::optional<std::string> kind_for_node_type(const std::string& node_type) const;

  nlohmann::json to_json() const;
  static Schema from_json(const nlohmann::json& j);

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<OperatorKind> kinds_;
  std::optional<std::string> fallback_;
  std::map<std::string, std::string> aliases_;
};

// "Index Only Scan" -> "index-only-scan", "BitmapAnd" -> "bitmap-and".
std::string canonical_kind_name(const std::string& node_type);

}  // namespace qppnet::ingest

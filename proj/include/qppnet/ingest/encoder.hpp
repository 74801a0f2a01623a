#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qppnet/ingest/plan.hpp"
#include "qppnet/ingest/schema.hpp"

namespace qppnet::ingest {

inline constexpr int kEncoderFormatVersion = 1;

// Fitted encoding of one attribute of one operator kind.
struct AttributeEncoding {
  AttributeSpec spec;
  // Slot range [offset, offset + width) inside the kind's feature vector.
  std::size_t offset = 0;
  std::size_t width = 0;
  // Whitening statistics, one entry per numeric slot.
  std::vector<double> mean;
  std::vector<double> stddev;
  // One-hot vocabulary; the slot after the last entry is the unknown slot.
  std::vector<std::string> vocabulary;

  friend bool operator==(const AttributeEncoding&, const AttributeEncoding&) = default;
};

struct KindEncoding {
  std::string kind;
  std::size_t max_arity = 0;
  std::size_t width = 0;
  std::vector<AttributeEncoding> attributes;

  friend bool operator==(const KindEncoding&, const KindEncoding&) = default;
};

// Implements the featurization F(x): a fixed-width vector per operator kind.
//
//   numeric         (v - mean) / std, population statistics over training
//                   values; constant columns get std = 1
//   boolean         0 or 1
//   one-hot         one slot per vocabulary entry plus an unknown slot
//   numeric-vector  per-element whitening, zero-padded or truncated
//
// Missing values encode as zero in every slot they own.
// Immutable after fitting.
class FeatureEncoder {
 public:
  FeatureEncoder() = default;
  FeatureEncoder(Schema schema, std::map<std::string, KindEncoding> kinds);

  const Schema& schema() const { return schema_; }
  const std::map<std::string, KindEncoding>& kinds() const { return kinds_; }
  const KindEncoding& kind(const std::string& name) const;
  bool has_kind(const std::string& name) const { return kinds_.contains(name); }
  std::size_t width(const std::string& kind) const { return this->kind(kind).width; }

  // Throws EncodingError for unknown kinds, too many children, or values of
  // the wrong type.
  std::vector<double> encode(const PlanNode& node) const;
  void encode_into(const PlanNode& node, std::span<double> out) const;

  nlohmann::json to_json() const;
  static FeatureEncoder from_json(const nlohmann::json& j);
  // SHA-256 of the canonical JSON document, hex encoded.
  std::string content_hash() const;

  friend bool operator==(const FeatureEncoder&, const FeatureEncoder&) = default;

 private:
  Schema schema_;
  std::map<std::string, KindEncoding> kinds_;
};

// Fits whitening statistics and one-hot vocabularies on every node of the
// corpus. Every kind of the schema gets an encoding, observed or not.
// Throws UsageError on an empty corpus and SchemaError when a node's kind is
// not in the schema.
FeatureEncoder fit_encoder(std::span<const PlanTree> corpus, const Schema& schema);

}  // namespace qppnet::ingest

#include "qppnet/ingest/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "qppnet/error.hpp"
#include "qppnet/hash.hpp"

namespace qppnet::ingest {

using nlohmann::json;

namespace {

std::size_t slot_width(const AttributeSpec& spec, std::size_t vocab_size) {
  switch (spec.encoding) {
    case Encoding::numeric:
    case Encoding::boolean:
      return 1;
    case Encoding::one_hot:
      return vocab_size + 1;
    case Encoding::numeric_vector:
      return spec.length;
  }
  return 1;
}

// Population mean and standard deviation; std is 1 for constant or empty
// columns.
std::pair<double, double> whitening(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 1.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  const double sd = std::sqrt(var);
  return {mean, sd > 0.0 ? sd : 1.0};
}

std::size_t layout(KindEncoding& k) {
  std::size_t offset = 0;
  for (auto& a : k.attributes) {
    a.offset = offset;
    a.width = slot_width(a.spec, a.vocabulary.size());
    offset += a.width;
  }
  return offset;
}

}  // namespace

FeatureEncoder::FeatureEncoder(Schema schema, std::map<std::string, KindEncoding> kinds)
    : schema_(std::move(schema)), kinds_(std::move(kinds)) {}

const KindEncoding& FeatureEncoder::kind(const std::string& name) const {
  auto it = kinds_.find(name);
  if (it == kinds_.end()) {
    throw EncodingError(fmt::format("no encoding for operator kind '{}'", name));
  }
  return it->second;
}

std::vector<double> FeatureEncoder::encode(const PlanNode& node) const {
  std::vector<double> out(kind(node.kind).width, 0.0);
  encode_into(node, out);
  return out;
}

void FeatureEncoder::encode_into(const PlanNode& node, std::span<double> out) const {
  const KindEncoding& k = kind(node.kind);
  if (out.size() != k.width) {
    throw DimensionError(
        fmt::format("feature buffer of {} slots, kind '{}' needs {}", out.size(), k.kind, k.width));
  }
  if (node.children.size() > k.max_arity) {
    throw EncodingError(fmt::format("'{}' node has {} children, at most {} allowed", k.kind,
                                    node.children.size(), k.max_arity));
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& a : k.attributes) {
    const AttrValue* raw = node.attr(a.spec.name);
    if (raw == nullptr) continue;
    auto slots = out.subspan(a.offset, a.width);
    auto type_error = [&] {
      return EncodingError(fmt::format("attribute '{}' of '{}' has the wrong type", a.spec.name,
                                       k.kind));
    };
    switch (a.spec.encoding) {
      case Encoding::numeric: {
        const double* v = std::get_if<double>(raw);
        if (v == nullptr) throw type_error();
        slots[0] = (*v - a.mean[0]) / a.stddev[0];
        break;
      }
      case Encoding::boolean: {
        if (const bool* b = std::get_if<bool>(raw)) {
          slots[0] = *b ? 1.0 : 0.0;
        } else if (const double* d = std::get_if<double>(raw)) {
          slots[0] = *d != 0.0 ? 1.0 : 0.0;
        } else {
          throw type_error();
        }
        break;
      }
      case Encoding::one_hot: {
        const std::string* s = std::get_if<std::string>(raw);
        if (s == nullptr) throw type_error();
        auto it = std::find(a.vocabulary.begin(), a.vocabulary.end(), *s);
        slots[static_cast<std::size_t>(it - a.vocabulary.begin())] = 1.0;
        break;
      }
      case Encoding::numeric_vector: {
        const auto* v = std::get_if<std::vector<double>>(raw);
        if (v == nullptr) throw type_error();
        const std::size_t n = std::min(v->size(), a.width);
        for (std::size_t i = 0; i < n; ++i) slots[i] = ((*v)[i] - a.mean[i]) / a.stddev[i];
        break;
      }
    }
  }
}

FeatureEncoder fit_encoder(std::span<const PlanTree> corpus, const Schema& schema) {
  if (corpus.empty()) throw UsageError("cannot fit an encoder on an empty corpus");

  // kind -> attribute -> per-slot observed numeric values / observed labels
  std::map<std::string, std::map<std::string, std::vector<std::vector<double>>>> numeric;
  std::map<std::string, std::map<std::string, std::set<std::string>>> labels;

  for (const auto& tree : corpus) {
    for (const PlanNode* node : preorder(tree.root)) {
      const OperatorKind* kind = schema.find(node->kind);
      if (kind == nullptr) {
        throw SchemaError(fmt::format("plan '{}' uses kind '{}' missing from the schema", tree.id,
                                      node->kind));
      }
      for (const auto& spec : kind->attributes) {
        const AttrValue* raw = node->attr(spec.name);
        if (raw == nullptr) continue;
        if (spec.encoding == Encoding::numeric) {
          if (const double* d = std::get_if<double>(raw)) {
            auto& cols = numeric[kind->name][spec.name];
            cols.resize(1);
            cols[0].push_back(*d);
          }
        } else if (spec.encoding == Encoding::numeric_vector) {
          if (const auto* v = std::get_if<std::vector<double>>(raw)) {
            auto& cols = numeric[kind->name][spec.name];
            cols.resize(spec.length);
            for (std::size_t i = 0; i < std::min(v->size(), spec.length); ++i) {
              cols[i].push_back((*v)[i]);
            }
          }
        } else if (spec.encoding == Encoding::one_hot) {
          if (const auto* s = std::get_if<std::string>(raw))
            labels[kind->name][spec.name].insert(*s);
        }
      }
    }
  }

  std::map<std::string, KindEncoding> kinds;
  for (const auto& kind : schema.kinds()) {
    KindEncoding k;
    k.kind = kind.name;
    k.max_arity = kind.max_arity;
    for (const auto& spec : kind.attributes) {
      AttributeEncoding a;
      a.spec = spec;
      if (spec.encoding == Encoding::numeric || spec.encoding == Encoding::numeric_vector) {
        const std::size_t slots = spec.encoding == Encoding::numeric ? 1 : spec.length;
        const auto& cols = numeric[kind.name][spec.name];
        for (std::size_t i = 0; i < slots; ++i) {
          const auto [mean, sd] = whitening(i < cols.size() ? cols[i] : std::vector<double>{});
          a.mean.push_back(mean);
          a.stddev.push_back(sd);
        }
      } else if (spec.encoding == Encoding::one_hot) {
        if (!spec.vocabulary.empty()) {
          a.vocabulary = spec.vocabulary;
        } else {
          const auto& seen = labels[kind.name][spec.name];
          a.vocabulary.assign(seen.begin(), seen.end());
        }
      }
      k.attributes.push_back(std::move(a));
    }
    k.width = layout(k);
    kinds.emplace(kind.name, std::move(k));
  }
  return FeatureEncoder(schema, std::move(kinds));
}

json FeatureEncoder::to_json() const {
  json kinds = json::object();
  for (const auto& [name, k] : kinds_) {
    json attrs = json::array();
    for (const auto& a : k.attributes) {
      json ja = {{"name", a.spec.name},
                 {"encoding", to_string(a.spec.encoding)},
                 {"offset", a.offset},
                 {"width", a.width}};
      if (!a.mean.empty()) {
        ja["mean"] = a.mean;
        ja["std"] = a.stddev;
      }
      if (a.spec.encoding == Encoding::one_hot) ja["vocabulary"] = a.vocabulary;
      attrs.push_back(std::move(ja));
    }
    kinds[name] = {{"width", k.width}, {"max_arity", k.max_arity}, {"attributes", attrs}};
  }
  return {{"format", "qppnet-encoder"},
          {"version", kEncoderFormatVersion},
          {"schema", schema_.to_json()},
          {"kinds", kinds}};
}

FeatureEncoder FeatureEncoder::from_json(const json& j) {
  if (j.value("format", "") != "qppnet-encoder") {
    throw ParseError("encoder: not a qppnet encoder document (format field)");
  }
  if (j.value("version", 0) != kEncoderFormatVersion) {
    throw ParseError(fmt::format("encoder: unsupported version {}", j.value("version", 0)));
  }
  Schema schema = Schema::from_json(j.at("schema"));
  std::map<std::string, KindEncoding> kinds;
  try {
    for (const auto& kind : schema.kinds()) {
      const json& jk = j.at("kinds").at(kind.name);
      KindEncoding k;
      k.kind = kind.name;
      k.max_arity = kind.max_arity;
      const json& attrs = jk.at("attributes");
      if (attrs.size() != kind.attributes.size()) {
        throw ParseError(fmt::format("encoder: kind '{}' attribute count mismatch", kind.name));
      }
      for (std::size_t i = 0; i < attrs.size(); ++i) {
        AttributeEncoding a;
        a.spec = kind.attributes[i];
        a.mean = attrs[i].value("mean", std::vector<double>{});
        a.stddev = attrs[i].value("std", std::vector<double>{});
        a.vocabulary = attrs[i].value("vocabulary", std::vector<std::string>{});
        k.attributes.push_back(std::move(a));
      }
      k.width = layout(k);
      if (k.width != jk.at("width").get<std::size_t>()) {
        throw ParseError(fmt::format("encoder: kind '{}' width mismatch", kind.name));
      }
      for (const auto& a : k.attributes) {
        const bool numeric = a.spec.encoding == Encoding::numeric ||
                             a.spec.encoding == Encoding::numeric_vector;
        if (numeric && (a.mean.size() != a.width || a.stddev.size() != a.width)) {
          throw ParseError(fmt::format("encoder: '{}.{}' statistics size mismatch", kind.name,
                                       a.spec.name));
        }
        for (double sd : a.stddev) {
          if (!(sd > 0.0)) {
            throw ParseError(fmt::format("encoder: '{}.{}' has non-positive std", kind.name,
                                         a.spec.name));
          }
        }
      }
      kinds.emplace(kind.name, std::move(k));
    }
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("encoder: malformed document ({})", e.what()));
  }
  return FeatureEncoder(std::move(schema), std::move(kinds));
}

std::string FeatureEncoder::content_hash() const { return sha256_hex(to_json().dump()); }

}  // namespace qppnet::ingest

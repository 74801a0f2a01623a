#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qppnet/diffnet/graph.hpp"
#include "qppnet/diffnet/param.hpp"
#include "qppnet/ingest/encoder.hpp"

namespace qppnet::plannet {

inline constexpr int kModelFormatVersion = 1;

struct Hyperparams {
  std::size_t hidden_layers = 5;
  std::size_t hidden_width = 128;
  // Size d of the opaque data vector; units emit d + 1 values.
  std::size_t data_width = 32;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

struct DenseLayer {
  diffnet::Param weight;  // out x in
  diffnet::Param bias;    // out
};

// The network shared by every instance of one operator kind.
//
// Input layout: F(x) first, then max_arity child outputs of d + 1 values
// each, left to right, each as (latency, data...). Absent children are
// zero-filled. Hidden layers use ReLU; the final layer is linear with d + 1
// outputs, index 0 being the latency.
class NeuralUnit {
 public:
  NeuralUnit(std::string kind, std::size_t feature_width, std::size_t max_arity,
             const Hyperparams& hp, SplitMix64& rng);

  const std::string& kind() const { return kind_; }
  std::size_t feature_width() const { return feature_width_; }
  std::size_t max_arity() const { return max_arity_; }
  std::size_t data_width() const { return data_width_; }
  std::size_t input_width() const { return feature_width_ + max_arity_ * (data_width_ + 1); }
  std::size_t output_width() const { return data_width_ + 1; }

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  // Adds the unit to a graph. input is (batch x input_width()).
  diffnet::NodeRef forward(diffnet::Graph& g, diffnet::NodeRef input) const;

 private:
  std::string kind_;
  std::size_t feature_width_;
  std::size_t max_arity_;
  std::size_t data_width_;
  std::vector<DenseLayer> layers_;
};

// A unit output p: latency p[l] and the opaque data vector p[d].
struct UnitOutput {
  double latency = 0.0;
  std::vector<double> data;

  friend bool operator==(const UnitOutput&, const UnitOutput&) = default;
};

// One neural unit per operator kind of the encoder's schema.
class QppModel {
 public:
  // Throws SchemaError for a kind with zero feature width and zero arity.
  QppModel(ingest::FeatureEncoder encoder, Hyperparams hp);

  const Hyperparams& hyperparams() const { return hp_; }
  const ingest::FeatureEncoder& encoder() const { return encoder_; }
  const std::string& encoder_hash() const { return encoder_hash_; }

  const NeuralUnit& unit(const std::string& kind) const;
  NeuralUnit& unit(const std::string& kind);
  const std::map<std::string, NeuralUnit>& units() const { return units_; }

  // All parameters in a fixed order (kind name, then layer, weight before
  // bias).
  std::vector<diffnet::Param*> parameters();
  std::vector<const diffnet::Param*> parameters() const;
  std::size_t parameter_count() const;
  void zero_grad();

  nlohmann::json to_json() const;
  // Rebuilds a model; the encoder must hash to the stored reference.
  static QppModel from_json(const nlohmann::json& j, ingest::FeatureEncoder encoder);

 private:
  Hyperparams hp_;
  ingest::FeatureEncoder encoder_;
  std::string encoder_hash_;
  std::map<std::string, NeuralUnit> units_;
};

QppModel init_model(const ingest::FeatureEncoder& encoder, const Hyperparams& hp);

void save_model(const QppModel& model, const std::filesystem::path& path);
QppModel load_model(const std::filesystem::path& path, ingest::FeatureEncoder encoder);

// Runs a single unit on a concrete input vector.
UnitOutput unit_forward(const QppModel& model, const std::string& kind,
                        std::span<const double> input);

}  // namespace qppnet::plannet

#include "qppnet/plannet/model.hpp"

#include <fmt/format.h>

#include "qppnet/error.hpp"
#include "qppnet/ingest/corpus.hpp"

namespace qppnet::plannet {

using diffnet::Param;
using diffnet::Tensor;
using nlohmann::json;

void Hyperparams::validate() const {
  if (hidden_layers < 1 || hidden_width < 1 || data_width < 1) {
    throw UsageError(fmt::format("hyperparameters must be positive (layers {}, width {}, d {})",
                                 hidden_layers, hidden_width, data_width));
  }
}

NeuralUnit::NeuralUnit(std::string kind, std::size_t feature_width, std::size_t max_arity,
                       const Hyperparams& hp, SplitMix64& rng)
    : kind_(std::move(kind)),
      feature_width_(feature_width),
      max_arity_(max_arity),
      data_width_(hp.data_width) {
  std::size_t in = input_width();
  for (std::size_t l = 0; l <= hp.hidden_layers; ++l) {
    const std::size_t out = l == hp.hidden_layers ? output_width() : hp.hidden_width;
    Tensor w = Tensor::zeros(out, in);
    Tensor b = Tensor::zeros(out);
    diffnet::init_uniform_fan_in(w, in, rng);
    diffnet::init_uniform_fan_in(b, in, rng);
    layers_.push_back({Param(fmt::format("{}/layer{}/weight", kind_, l), std::move(w)),
                       Param(fmt::format("{}/layer{}/bias", kind_, l), std::move(b))});
    in = out;
  }
}

diffnet::NodeRef NeuralUnit::forward(diffnet::Graph& g, diffnet::NodeRef input) const {
  if (g.value(input).cols() != input_width()) {
    throw DimensionError(fmt::format("unit '{}' expects {} inputs, got {}", kind_, input_width(),
                                     g.value(input).cols()));
  }
  diffnet::NodeRef h = input;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    h = g.affine(layers_[l].weight, layers_[l].bias, h);
    if (l + 1 < layers_.size()) h = g.relu(h);
  }
  return h;
}

QppModel::QppModel(ingest::FeatureEncoder encoder, Hyperparams hp)
    : hp_(hp), encoder_(std::move(encoder)), encoder_hash_(encoder_.content_hash()) {
  hp_.validate();
  SplitMix64 rng(hp_.seed);
  for (const auto& [name, k] : encoder_.kinds()) {
    if (k.width == 0 && k.max_arity == 0) {
      throw SchemaError(fmt::format("kind '{}' has no features and no children", name));
    }
    units_.emplace(name, NeuralUnit(name, k.width, k.max_arity, hp_, rng));
  }
}

const NeuralUnit& QppModel::unit(const std::string& kind) const {
  auto it = units_.find(kind);
  if (it == units_.end()) throw InferenceError(fmt::format("no neural unit for kind '{}'", kind));
  return it->second;
}

NeuralUnit& QppModel::unit(const std::string& kind) {
  return const_cast<NeuralUnit&>(std::as_const(*this).unit(kind));
}

std::vector<Param*> QppModel::parameters() {
  std::vector<Param*> out;
  for (auto& [_, u] : units_) {
    for (auto& l : u.layers()) {
      out.push_back(&l.weight);
      out.push_back(&l.bias);
    }
  }
  return out;
}

std::vector<const Param*> QppModel::parameters() const {
  std::vector<const Param*> out;
  for (const auto& [_, u] : units_) {
    for (const auto& l : u.layers()) {
      out.push_back(&l.weight);
      out.push_back(&l.bias);
    }
  }
  return out;
}

std::size_t QppModel::parameter_count() const {
  std::size_t n = 0;
  for (const Param* p : parameters()) n += p->value().size();
  return n;
}

void QppModel::zero_grad() {
  for (Param* p : parameters()) p->zero_grad();
}

json QppModel::to_json() const {
  json units = json::object();
  for (const auto& [name, u] : units_) {
    json layers = json::array();
    for (const auto& l : u.layers()) {
      const Tensor& w = l.weight.value();
      const Tensor& b = l.bias.value();
      layers.push_back({{"weight",
                         {{"rows", w.rows()},
                          {"cols", w.cols()},
                          {"values", std::vector<double>(w.data().begin(), w.data().end())}}},
                        {"bias",
                         {{"length", b.size()},
                          {"values", std::vector<double>(b.data().begin(), b.data().end())}}}});
    }
    units[name] = {{"feature_width", u.feature_width()},
                   {"max_arity", u.max_arity()},
                   {"layers", std::move(layers)}};
  }
  return {{"format", "qppnet-model"},
          {"version", kModelFormatVersion},
          {"hyperparams",
           {{"hidden_layers", hp_.hidden_layers},
            {"hidden_width", hp_.hidden_width},
            {"data_width", hp_.data_width},
            {"seed", hp_.seed}}},
          {"schema", encoder_.schema().to_json()},
          {"encoder_hash", encoder_hash_},
          {"units", std::move(units)}};
}

QppModel QppModel::from_json(const json& j, ingest::FeatureEncoder encoder) {
  if (j.value("format", "") != "qppnet-model") {
    throw ParseError("model: not a qppnet model document (format field)");
  }
  if (j.value("version", 0) != kModelFormatVersion) {
    throw ParseError(fmt::format("model: unsupported version {}", j.value("version", 0)));
  }
  try {
    const std::string hash = j.at("encoder_hash").get<std::string>();
    if (hash != encoder.content_hash()) {
      throw SchemaError(fmt::format("model was trained with encoder {}, got {}", hash,
                                    encoder.content_hash()));
    }
    const json& jh = j.at("hyperparams");
    Hyperparams hp;
    hp.hidden_layers = jh.at("hidden_layers").get<std::size_t>();
    hp.hidden_width = jh.at("hidden_width").get<std::size_t>();
    hp.data_width = jh.at("data_width").get<std::size_t>();
    hp.seed = jh.at("seed").get<std::uint64_t>();

    QppModel model(std::move(encoder), hp);
    const json& units = j.at("units");
    if (units.size() != model.units_.size()) {
      throw ParseError("model: unit set does not match the encoder schema");
    }
    for (auto& [name, unit] : model.units_) {
      const json& ju = units.at(name);
      const json& layers = ju.at("layers");
      if (layers.size() != unit.layers().size()) {
        throw ParseError(fmt::format("model: unit '{}' layer count mismatch", name));
      }
      for (std::size_t l = 0; l < layers.size(); ++l) {
        DenseLayer& layer = unit.layers()[l];
        const json& jw = layers[l].at("weight");
        const json& jb = layers[l].at("bias");
        Tensor w(jw.at("rows").get<std::size_t>(), jw.at("cols").get<std::size_t>(),
                 jw.at("values").get<std::vector<double>>());
        Tensor b(jb.at("values").get<std::vector<double>>());
        if (!w.same_shape(layer.weight.value()) || !b.same_shape(layer.bias.value())) {
          throw ParseError(fmt::format("model: unit '{}' layer {} shape mismatch", name, l));
        }
        layer.weight.assign(std::move(w));
        layer.bias.assign(std::move(b));
      }
    }
    return model;
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("model: malformed document ({})", e.what()));
  }
}

QppModel init_model(const ingest::FeatureEncoder& encoder, const Hyperparams& hp) {
  return QppModel(encoder, hp);
}

void save_model(const QppModel& model, const std::filesystem::path& path) {
  ingest::write_file(path, model.to_json().dump() + "\n");
}

QppModel load_model(const std::filesystem::path& path, ingest::FeatureEncoder encoder) {
  json j;
  try {
    j = json::parse(ingest::read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: malformed JSON ({})", path.string(), e.what()));
  }
  return QppModel::from_json(j, std::move(encoder));
}

UnitOutput unit_forward(const QppModel& model, const std::string& kind,
                        std::span<const double> input) {
  const NeuralUnit& unit = model.unit(kind);
  if (input.size() != unit.input_width()) {
    throw DimensionError(fmt::format("unit '{}' expects {} inputs, got {}", kind,
                                     unit.input_width(), input.size()));
  }
  diffnet::Graph g;
  const auto in = g.input(Tensor(std::vector<double>(input.begin(), input.end())));
  const Tensor& out = g.value(unit.forward(g, in));
  UnitOutput result;
  result.latency = out[0];
  result.data.assign(out.data().begin() + 1, out.data().end());
  return result;
}

}  // namespace qppnet::plannet

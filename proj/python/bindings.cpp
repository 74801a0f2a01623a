#include <pybind11/pybind11.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>

#include "qppnet/error.hpp"
#include "qppnet/evalkit/baseline.hpp"
#include "qppnet/evalkit/metrics.hpp"
#include "qppnet/evalkit/report.hpp"
#include "qppnet/ingest/corpus.hpp"
#include "qppnet/ingest/encoder.hpp"
#include "qppnet/ingest/explain.hpp"
#include "qppnet/ingest/signature.hpp"
#include "qppnet/ingest/synth.hpp"
#include "qppnet/plannet/network.hpp"
#include "qppnet/trainer/trainer.hpp"

namespace py = pybind11;
using namespace qppnet;

namespace {

// Structured results cross the boundary as JSON text; the Python package
// turns them into dicts.
std::string plan_json(const ingest::PlanTree& t) {
  return nlohmann::json{{"id", t.id}, {"template", t.template_name},
                        {"plan", ingest::node_to_json(t.root)}}
      .dump();
}

std::vector<ingest::PlanTree> synth(std::size_t plans, std::uint64_t seed, double noise,
                                    std::size_t templates) {
  ingest::SynthConfig cfg;
  cfg.plan_count = plans;
  cfg.seed = seed;
  cfg.noise_sigma = noise;
  cfg.template_count = templates;
  return ingest::synth_generate(cfg).plans;
}

trainer::HoldoutConfig::Mode holdout_mode(const std::string& s) {
  if (s == "none") return trainer::HoldoutConfig::Mode::none;
  if (s == "random") return trainer::HoldoutConfig::Mode::random;
  if (s == "template") return trainer::HoldoutConfig::Mode::by_template;
  throw UsageError("holdout mode must be 'none', 'random' or 'template'");
}

}  // namespace

PYBIND11_MODULE(_qppnet, m) {
  m.doc() = "Plan-structured neural networks for query latency prediction";
  m.attr("__version__") = QPPNET_VERSION;

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<UsageError>(m, "UsageError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<EncodingError>(m, "EncodingError", base.ptr());
  py::register_exception<InferenceError>(m, "InferenceError", base.ptr());
  py::register_exception<TrainingError>(m, "TrainingError", base.ptr());
  py::register_exception<MetricError>(m, "MetricError", base.ptr());
  py::register_exception<FitError>(m, "FitError", base.ptr());

  py::class_<ingest::PlanTree>(m, "PlanTree")
      .def_readonly("id", &ingest::PlanTree::id)
      .def_readonly("template", &ingest::PlanTree::template_name)
      .def_property_readonly("size", [](const ingest::PlanTree& t) { return t.root.size(); })
      .def_property_readonly("kind", [](const ingest::PlanTree& t) { return t.root.kind; })
      .def_property_readonly("latency", [](const ingest::PlanTree& t) { return t.root.latency; })
      .def_property_readonly("labeled",
                             [](const ingest::PlanTree& t) { return t.root.fully_labeled(); })
      .def_property_readonly(
          "signature",
          [](const ingest::PlanTree& t) { return ingest::structure_signature(t).text; })
      .def("to_json", &plan_json)
      .def("__repr__", [](const ingest::PlanTree& t) {
        return "<PlanTree " + t.id + " " + ingest::structure_signature(t).text + ">";
      });

  m.def("synth", &synth, py::arg("plans") = 2000, py::arg("seed") = 0, py::arg("noise") = 0.1,
        py::arg("templates") = 60, "Generate labeled synthetic plans");
  m.def("load_corpus", [](const std::string& path) { return ingest::load_corpus(path).plans; });
  m.def(
      "save_corpus",
      [](const std::vector<ingest::PlanTree>& plans, const std::string& path) {
        ingest::Corpus c;
        c.plans = plans;
        ingest::save_corpus(c, path);
      },
      py::arg("plans"), py::arg("path"));
  m.def(
      "parse_explain",
      [](const std::string& text, bool strict) {
        ingest::ExplainOptions opts;
        opts.strict = strict;
        return ingest::parse_explain_documents(text, ingest::Schema::postgres_default(), opts);
      },
      py::arg("text"), py::arg("strict") = false, "Parse EXPLAIN (FORMAT JSON) text");

  py::class_<ingest::FeatureEncoder>(m, "Encoder")
      .def_static(
          "fit",
          [](const std::vector<ingest::PlanTree>& plans) {
            return ingest::fit_encoder(plans, ingest::Schema::postgres_default());
          },
          py::arg("plans"))
      .def_static("from_json",
                  [](const std::string& s) {
                    return ingest::FeatureEncoder::from_json(nlohmann::json::parse(s));
                  })
      .def("to_json", [](const ingest::FeatureEncoder& e) { return e.to_json().dump(); })
      .def("width", &ingest::FeatureEncoder::width)
      .def("encode_root", [](const ingest::FeatureEncoder& e,
                             const ingest::PlanTree& t) { return e.encode(t.root); })
      .def_property_readonly("content_hash", &ingest::FeatureEncoder::content_hash)
      .def_property_readonly("kinds", [](const ingest::FeatureEncoder& e) {
        std::vector<std::string> out;
        for (const auto& [name, _] : e.kinds()) out.push_back(name);
        return out;
      });

  py::class_<plannet::QppModel>(m, "Model")
      .def(py::init([](const ingest::FeatureEncoder& enc, std::size_t hidden_layers,
                       std::size_t hidden_width, std::size_t data_width, std::uint64_t seed) {
             plannet::Hyperparams hp;
             hp.hidden_layers = hidden_layers;
             hp.hidden_width = hidden_width;
             hp.data_width = data_width;
             hp.seed = seed;
             return plannet::init_model(enc, hp);
           }),
           py::arg("encoder"), py::arg("hidden_layers") = 5, py::arg("hidden_width") = 128,
           py::arg("data_width") = 32, py::arg("seed") = 0)
      .def_static(
          "from_json",
          [](const std::string& s, const ingest::FeatureEncoder& enc) {
            return plannet::QppModel::from_json(nlohmann::json::parse(s), enc);
          },
          py::arg("text"), py::arg("encoder"))
      .def("to_json", [](const plannet::QppModel& mdl) { return mdl.to_json().dump(); })
      .def_property_readonly("parameter_count", &plannet::QppModel::parameter_count)
      .def_property_readonly("encoder", &plannet::QppModel::encoder)
      .def("predict",
           [](const plannet::QppModel& mdl, const std::vector<ingest::PlanTree>& plans) {
             return plannet::predict_latencies(mdl, plans);
           })
      .def("predict_nodes", [](const plannet::QppModel& mdl, const ingest::PlanTree& t) {
        std::vector<double> out;
        for (const auto& o : plannet::evaluate_plan(mdl, t)) out.push_back(o.latency);
        return out;
      });

  m.def(
      "train",
      [](plannet::QppModel& model, const std::vector<ingest::PlanTree>& train_set,
         const std::vector<ingest::PlanTree>& test_set, double lr, double momentum,
         std::size_t epochs, std::size_t batch_size, std::uint64_t seed) {
        trainer::TrainConfig tc;
        tc.learning_rate = lr;
        tc.momentum = momentum;
        tc.epochs = epochs;
        tc.batch_size = batch_size;
        tc.seed = seed;
        std::vector<std::tuple<std::size_t, double, std::optional<double>>> out;
        py::gil_scoped_release release;
        for (const auto& s : trainer::train(model, train_set, test_set, tc)) {
          out.emplace_back(s.epoch, s.train_rmse, s.test_mae);
        }
        return out;
      },
      py::arg("model"), py::arg("train"), py::arg("test") = std::vector<ingest::PlanTree>{},
      py::arg("lr") = 0.001, py::arg("momentum") = 0.9, py::arg("epochs") = 200,
      py::arg("batch_size") = 256, py::arg("seed") = 0,
      "Train in place; returns (epoch, train_rmse, test_mae) per epoch");

  m.def(
      "holdout_split",
      [](const std::vector<ingest::PlanTree>& plans, const std::string& mode, double fraction,
         std::size_t templates, std::uint64_t seed) {
        trainer::HoldoutConfig hc;
        hc.mode = holdout_mode(mode);
        hc.fraction = fraction;
        hc.template_count = templates;
        hc.seed = seed;
        const auto s = trainer::holdout_split(plans, hc);
        return std::pair{s.train, s.test};
      },
      py::arg("plans"), py::arg("mode") = "random", py::arg("fraction") = 0.1,
      py::arg("templates") = 0, py::arg("seed") = 0);

  m.def(
      "_evaluate_json",
      [](const std::vector<ingest::PlanTree>& plans, const std::vector<double>& predicted) {
        return evalkit::to_json(evalkit::evaluate_predictions(plans, predicted)).dump();
      },
      py::arg("plans"), py::arg("predicted"));
  m.def("r_factor", &evalkit::r_factor, py::arg("actual"), py::arg("predicted"));
  m.def("relative_error", [](const std::vector<double>& a, const std::vector<double>& p) {
    return evalkit::relative_error(a, p);
  });
  m.def("mean_absolute_error", [](const std::vector<double>& a, const std::vector<double>& p) {
    return evalkit::mean_absolute_error(a, p);
  });

  py::class_<evalkit::CalibratedCostModel>(m, "CostBaseline")
      .def_static("fit",
                  [](const std::vector<ingest::PlanTree>& plans) {
                    return evalkit::CalibratedCostModel::fit(plans);
                  })
      .def("predict",
           [](const evalkit::CalibratedCostModel& b, const std::vector<ingest::PlanTree>& plans) {
             std::vector<double> out;
             for (const auto& t : plans) out.push_back(b.predict(t));
             return out;
           })
      .def_property_readonly("intercept", &evalkit::CalibratedCostModel::intercept)
      .def_property_readonly("coefficients", &evalkit::CalibratedCostModel::coefficients);
}

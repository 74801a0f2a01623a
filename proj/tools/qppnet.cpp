// qppnet: command-line front end.
//
//   qppnet synth     --out corpus.ndjson [--plans N --seed S ...]
//   qppnet featurize --input a.json b.json --out corpus.ndjson --encoder-out enc.json
//   qppnet train     --corpus c.ndjson --encoder-out enc.json --model-out m.json
//   qppnet predict   --model m.json --encoder enc.json --corpus c.ndjson --out p.csv
//   qppnet evaluate  --model m.json --encoder enc.json --corpus c.ndjson --report r.json
//   qppnet inspect   [--corpus ...] [--encoder ...] [--model ...]
//
// Any flag may also come from a config file (--config run.toml), with one
// [section] per subcommand; flags given on the command line win.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "qppnet/error.hpp"
#include "qppnet/evalkit/baseline.hpp"
#include "qppnet/evalkit/report.hpp"
#include "qppnet/hash.hpp"
#include "qppnet/ingest/corpus.hpp"
#include "qppnet/ingest/encoder.hpp"
#include "qppnet/ingest/explain.hpp"
#include "qppnet/ingest/signature.hpp"
#include "qppnet/ingest/synth.hpp"
#include "qppnet/plannet/network.hpp"
#include "qppnet/trainer/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qppnet;

namespace {

constexpr const char* kToolVersion = QPPNET_VERSION;
constexpr int kCsvVersion = 1;

// ---------------------------------------------------------------------------
// shared helpers

std::string file_hash(const fs::path& p) { return sha256_hex(ingest::read_file(p)); }

json provenance(std::uint64_t seed, const std::map<std::string, std::string>& inputs) {
  json hashes = json::object();
  for (const auto& [name, hash] : inputs) hashes[name] = hash;
  return {{"tool", "qppnet"}, {"tool_version", kToolVersion}, {"seed", seed},
          {"inputs_sha256", hashes}};
}

// First line of every CSV artifact: "# <format> v1 tool=... seed=... <input>=<sha256>".
std::string csv_banner(const std::string& format, std::uint64_t seed,
                       const std::map<std::string, std::string>& inputs) {
  std::string line =
      fmt::format("# {} v{} tool=qppnet-{} seed={}", format, kCsvVersion, kToolVersion, seed);
  for (const auto& [name, hash] : inputs) line += fmt::format(" {}_sha256={}", name, hash);
  return line + "\n";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Artifact JSON: sorted keys, shortest round-trip doubles, trailing newline.
void write_json(const fs::path& p, const json& j) { ingest::write_file(p, j.dump(1) + "\n"); }

json read_json(const fs::path& p) {
  try {
    return json::parse(ingest::read_file(p));
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", p.string(), e.what()));
  }
}

ingest::FeatureEncoder load_encoder(const fs::path& p) {
  return ingest::FeatureEncoder::from_json(read_json(p));
}

plannet::QppModel load_model_file(const fs::path& model, const fs::path& encoder) {
  return plannet::QppModel::from_json(read_json(model), load_encoder(encoder));
}

void warn(const std::string& msg) { fmt::print(stderr, "qppnet: {}\n", msg); }

trainer::HoldoutConfig::Mode holdout_mode(const std::string& s) {
  if (s == "none") return trainer::HoldoutConfig::Mode::none;
  if (s == "random") return trainer::HoldoutConfig::Mode::random;
  if (s == "template") return trainer::HoldoutConfig::Mode::by_template;
  throw UsageError(fmt::format("unknown holdout mode '{}'", s));
}

struct HoldoutFlags {
  std::string mode = "none";
  double fraction = 0.1;
  std::size_t templates = 0;

  void add(CLI::App* cmd) {
    cmd->add_option("--holdout", mode, "Held-out split: none, random or template")
        ->check(CLI::IsMember({"none", "random", "template"}))
        ->capture_default_str();
    cmd->add_option("--holdout-fraction", fraction, "Share of plans (or templates) held out")
        ->capture_default_str();
    cmd->add_option("--holdout-templates", templates,
                    "Number of templates held out (overrides the fraction)");
  }

  trainer::HoldoutConfig config(std::uint64_t seed) const {
    trainer::HoldoutConfig hc;
    hc.mode = holdout_mode(mode);
    hc.fraction = fraction;
    hc.template_count = templates;
    hc.seed = seed;
    return hc;
  }

  json to_json() const {
    return {{"mode", mode}, {"fraction", fraction}, {"templates", templates}};
  }
};

// Reads a native corpus whose operator kinds the encoder must cover.
std::vector<ingest::PlanTree> load_plans(const fs::path& corpus,
                                         const ingest::FeatureEncoder& enc) {
  auto plans = ingest::load_corpus(corpus).plans;
  for (const auto& t : plans) {
    for (const auto* n : ingest::preorder(t.root)) {
      if (!enc.has_kind(n->kind)) {
        throw SchemaError(fmt::format("plan '{}': operator kind '{}' is not in the encoder schema",
                                      t.id, n->kind));
      }
    }
  }
  return plans;
}

// ---------------------------------------------------------------------------
// synth

struct SynthFlags {
  ingest::SynthConfig cfg;
  std::string out;
};

void run_synth(const SynthFlags& f) {
  const auto schema = ingest::Schema::postgres_default();
  auto corpus = ingest::synth_generate(f.cfg, schema);
  json prov = provenance(f.cfg.seed, {});
  prov["generator"] = "synth";
  prov["config"] = f.cfg.to_json();
  corpus.provenance = prov;
  ingest::save_corpus(corpus, f.out);
  fmt::print("wrote {} plans to {}\n", corpus.plans.size(), f.out);
}

// ---------------------------------------------------------------------------
// featurize

struct FeaturizeFlags {
  std::vector<std::string> inputs;
  std::string out;
  std::string encoder_out;
  std::string schema_path;
  std::size_t attr_vector_length = 4;
  bool strict = false;
};

void run_featurize(const FeaturizeFlags& f) {
  const ingest::Schema schema = f.schema_path.empty()
                                    ? ingest::Schema::postgres_default(f.attr_vector_length)
                                    : ingest::Schema::from_json(read_json(f.schema_path));
  ingest::ExplainOptions opts;
  opts.strict = f.strict;

  ingest::Corpus corpus;
  std::map<std::string, std::string> hashes;
  std::vector<std::string> failures;
  for (const auto& input : f.inputs) {
    const std::string text = ingest::read_file(input);
    hashes[fs::path(input).filename().string()] = sha256_hex(text);
    std::vector<ingest::PlanTree> trees;
    try {
      trees = ingest::parse_explain_documents(text, schema, opts);
    } catch (const ParseError& e) {
      const std::string msg = fmt::format("{}: {}", input, e.what());
      if (f.strict) throw ParseError(msg);
      failures.push_back(msg);
      continue;
    }
    const std::string stem = fs::path(input).stem().string();
    for (std::size_t k = 0; k < trees.size(); ++k) {
      if (trees[k].id.empty()) {
        trees[k].id = trees.size() == 1 ? stem : fmt::format("{}#{}", stem, k);
      }
      corpus.plans.push_back(std::move(trees[k]));
    }
  }
  for (const auto& msg : failures) warn(fmt::format("skipped {}", msg));
  if (corpus.plans.empty()) throw UsageError("no plan could be parsed from the inputs");

  corpus.provenance = provenance(0, hashes);
  corpus.provenance["source"] = "explain";
  ingest::save_corpus(corpus, f.out);

  const auto enc = ingest::fit_encoder(corpus.plans, schema);
  json je = enc.to_json();
  je["provenance"] = provenance(0, {{"corpus", file_hash(f.out)}});
  write_json(f.encoder_out, je);

  fmt::print("wrote {} plans ({}) to {}, encoder to {}\n", corpus.plans.size(),
             corpus.labeled() ? "labeled" : "unlabeled", f.out, f.encoder_out);
  if (!failures.empty()) fmt::print("{} input(s) skipped\n", failures.size());
}

// ---------------------------------------------------------------------------
// train

struct TrainFlags {
  std::string corpus;
  std::string encoder;
  std::string encoder_out;
  std::string model_out;
  std::string stats_out;
  plannet::Hyperparams hp;
  trainer::TrainConfig tc;
  std::string weighting = "operators";
  HoldoutFlags holdout;
  std::uint64_t seed = 0;
};

void run_train(TrainFlags f) {
  if (f.encoder.empty() == f.encoder_out.empty()) {
    throw UsageError("train needs exactly one of --encoder (reuse) or --encoder-out (fit)");
  }
  const auto corpus = ingest::load_corpus(f.corpus);
  if (!corpus.labeled()) {
    throw TrainingError(fmt::format("{} is not fully labeled (missing latencies); cannot train",
                                    f.corpus));
  }
  std::map<std::string, std::string> inputs = {{"corpus", file_hash(f.corpus)}};

  const auto split = trainer::holdout_split(corpus.plans, f.holdout.config(f.seed));
  const auto train_set = trainer::select(corpus.plans, split.train);
  const auto test_set = trainer::select(corpus.plans, split.test);

  ingest::FeatureEncoder enc;
  if (!f.encoder.empty()) {
    enc = load_encoder(f.encoder);
    inputs["encoder"] = file_hash(f.encoder);
    load_plans(f.corpus, enc);  // schema coverage check
  } else {
    enc = ingest::fit_encoder(train_set, ingest::Schema::postgres_default());
    json je = enc.to_json();
    je["provenance"] = provenance(f.seed, inputs);
    write_json(f.encoder_out, je);
  }

  f.hp.seed = f.seed;
  f.tc.seed = f.seed;
  f.tc.weighting = f.weighting == "plans" ? trainer::GroupWeighting::plan_count
                                          : trainer::GroupWeighting::operator_count;
  f.tc.validate();
  auto model = plannet::init_model(enc, f.hp);

  std::optional<std::ofstream> stats;
  if (!f.stats_out.empty()) {
    stats.emplace(f.stats_out, std::ios::binary | std::ios::trunc);
    if (!*stats) throw UsageError(fmt::format("cannot write {}", f.stats_out));
    *stats << csv_banner("qppnet-stats", f.seed, inputs)
           << "epoch,train_rmse,test_mae,wall_seconds\n";
  }
  const auto history = trainer::train(model, train_set, test_set, f.tc, [&](const auto& s) {
    if (!stats) return;
    *stats << fmt::format("{},{},{},{:.3f}\n", s.epoch, s.train_rmse,
                          s.test_mae ? fmt::format("{}", *s.test_mae) : std::string(),
                          s.wall_seconds);
    stats->flush();
  });

  json jm = model.to_json();
  json prov = provenance(f.seed, inputs);
  prov["train"] = {{"learning_rate", f.tc.learning_rate},
                   {"momentum", f.tc.momentum},
                   {"epochs", f.tc.epochs},
                   {"batch_size", f.tc.batch_size},
                   {"weighting", f.weighting},
                   {"holdout", f.holdout.to_json()},
                   {"train_plans", train_set.size()},
                   {"test_plans", test_set.size()}};
  if (!history.empty()) prov["train"]["final_train_rmse"] = history.back().train_rmse;
  jm["provenance"] = prov;
  write_json(f.model_out, jm);
  fmt::print("trained {} epochs on {} plans ({} parameters); model written to {}\n",
             history.size(), train_set.size(), model.parameter_count(), f.model_out);
  if (!history.empty()) {
    fmt::print("final train rmse {:.6f}", history.back().train_rmse);
    if (history.back().test_mae) fmt::print(", held-out mae {:.6f}", *history.back().test_mae);
    fmt::print("\n");
  }
}

// ---------------------------------------------------------------------------
// predict

struct PredictFlags {
  std::string model;
  std::string encoder;
  std::string corpus;
  std::string out;
  bool per_node = false;
};

void run_predict(const PredictFlags& f) {
  const auto model = load_model_file(f.model, f.encoder);
  const auto plans = load_plans(f.corpus, model.encoder());
  const std::map<std::string, std::string> inputs = {
      {"model", file_hash(f.model)}, {"encoder", file_hash(f.encoder)},
      {"corpus", file_hash(f.corpus)}};

  std::string out = csv_banner("qppnet-predictions", model.hyperparams().seed, inputs);
  if (f.per_node) {
    out += "plan_id,node_path,kind,predicted_seconds\n";
    for (const auto& t : plans) {
      const auto outputs = plannet::evaluate_plan(model, t);
      const auto paths = ingest::preorder_paths(t.root);
      const auto nodes = ingest::preorder(t.root);
      for (std::size_t i = 0; i < outputs.size(); ++i) {
        out += fmt::format("{},{},{},{}\n", csv_field(t.id), paths[i], nodes[i]->kind,
                           outputs[i].latency);
      }
    }
  } else {
    out += "plan_id,predicted_seconds\n";
    const auto pred = plannet::predict_latencies(model, plans);
    for (std::size_t i = 0; i < plans.size(); ++i) {
      out += fmt::format("{},{}\n", csv_field(plans[i].id), pred[i]);
    }
  }
  ingest::write_file(f.out, out);
  fmt::print("wrote predictions for {} plans to {}\n", plans.size(), f.out);
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateFlags {
  std::string model;
  std::string encoder;
  std::string corpus;
  std::string report;
  std::string cdf_out;
  std::string templates_out;
  bool baseline = false;
  HoldoutFlags holdout;
  std::uint64_t seed = 0;
};

void run_evaluate(const EvaluateFlags& f) {
  const auto model = load_model_file(f.model, f.encoder);
  const auto all = load_plans(f.corpus, model.encoder());
  const std::map<std::string, std::string> inputs = {
      {"model", file_hash(f.model)}, {"encoder", file_hash(f.encoder)},
      {"corpus", file_hash(f.corpus)}};

  // Queries without a positive root latency cannot be scored.
  std::vector<ingest::PlanTree> scored;
  std::size_t rejected = 0;
  for (const auto& t : all) {
    if (t.root.latency && *t.root.latency > 0.0) {
      scored.push_back(t);
    } else {
      ++rejected;
    }
  }
  if (rejected > 0) warn(fmt::format("rejected {} plan(s) without a positive latency", rejected));
  if (scored.empty()) throw MetricError("no plan with a positive latency to evaluate");

  const auto split = trainer::holdout_split(scored, f.holdout.config(f.seed));
  const bool held_out = holdout_mode(f.holdout.mode) != trainer::HoldoutConfig::Mode::none;
  const auto test_set = trainer::select(scored, held_out ? split.test : split.train);
  const auto train_set = trainer::select(scored, split.train);
  if (test_set.empty()) throw UsageError("the evaluation split is empty");

  const auto rep = evalkit::evaluate_predictions(test_set,
                                                 plannet::predict_latencies(model, test_set));
  json jr = {{"format", "qppnet-report"},
             {"version", 1},
             {"provenance", provenance(f.seed, inputs)},
             {"holdout", f.holdout.to_json()},
             {"rejected_plans", rejected},
             {"model", evalkit::to_json(rep)}};
  jr["model"]["plan_ids"] = json::array();
  for (const auto& t : test_set) jr["model"]["plan_ids"].push_back(t.id);

  std::optional<evalkit::EvalReport> base_rep;
  if (f.baseline) {
    const auto base = evalkit::CalibratedCostModel::fit(train_set);
    std::vector<double> pred;
    for (const auto& t : test_set) pred.push_back(base.predict(t));
    base_rep = evalkit::evaluate_predictions(test_set, pred);
    jr["baseline"] = evalkit::to_json(*base_rep);
    jr["baseline"]["fit"] = base.to_json();
    jr["baseline"]["fit"]["train_plans"] = train_set.size();
  }
  write_json(f.report, jr);

  if (!f.cdf_out.empty()) {
    std::string csv = csv_banner("qppnet-cdf", f.seed, inputs);
    if (base_rep) {
      csv += "predictor,fraction,r\n";
      const std::pair<const char*, const evalkit::EvalReport*> series[] = {
          {"model", &rep}, {"baseline", &*base_rep}};
      for (const auto& [label, r] : series) {
        for (const auto& [frac, value] : r->cdf)
          csv += fmt::format("{},{},{}\n", label, frac, value);
      }
    } else {
      csv += evalkit::cdf_csv(rep);
    }
    ingest::write_file(f.cdf_out, csv);
  }
  if (!f.templates_out.empty()) {
    ingest::write_file(f.templates_out, csv_banner("qppnet-template-mae", f.seed, inputs) +
                                            evalkit::per_template_csv(rep, test_set));
  }

  fmt::print("{} queries: relative error {:.4f}, MAE {:.6f} s, R<=1.5 {:.1f}%\n", rep.query_count,
             rep.relative_error, rep.mean_absolute_error, 100.0 * rep.buckets.within_1_5);
  if (base_rep) {
    fmt::print("baseline: relative error {:.4f}, MAE {:.6f} s, R<=1.5 {:.1f}%\n",
               base_rep->relative_error, base_rep->mean_absolute_error,
               100.0 * base_rep->buckets.within_1_5);
  }
}

// ---------------------------------------------------------------------------
// inspect

struct InspectFlags {
  std::string corpus;
  std::string encoder;
  std::string model;
};

void run_inspect(const InspectFlags& f) {
  if (f.corpus.empty() && f.encoder.empty()) {
    throw UsageError("inspect needs --corpus and/or --encoder (and --model with --encoder)");
  }
  json out = json::object();
  if (!f.corpus.empty()) {
    const auto corpus = ingest::load_corpus(f.corpus);
    std::map<std::string, std::size_t> kinds;
    std::size_t nodes = 0;
    std::vector<const ingest::PlanTree*> ptrs;
    for (const auto& t : corpus.plans) {
      ptrs.push_back(&t);
      for (const auto* n : ingest::preorder(t.root)) {
        ++kinds[n->kind];
        ++nodes;
      }
    }
    out["corpus"] = {{"plans", corpus.plans.size()},
                     {"operators", nodes},
                     {"labeled", corpus.labeled()},
                     {"operator_kinds", kinds},
                     {"structure_groups", ingest::group_by_signature(ptrs).size()},
                     {"sha256", file_hash(f.corpus)},
                     {"provenance", corpus.provenance}};
  }
  if (!f.encoder.empty()) {
    const auto enc = load_encoder(f.encoder);
    json widths = json::object();
    for (const auto& [name, k] : enc.kinds()) widths[name] = k.width;
    out["encoder"] = {{"feature_widths", widths}, {"content_hash", enc.content_hash()}};
    if (!f.model.empty()) {
      const auto model = plannet::QppModel::from_json(read_json(f.model), enc);
      json units = json::object();
      for (const auto& [name, u] : model.units()) {
        units[name] = {{"input_width", u.input_width()}, {"output_width", u.output_width()},
                       {"max_arity", u.max_arity()}};
      }
      out["model"] = {{"parameters", model.parameter_count()},
                      {"hidden_layers", model.hyperparams().hidden_layers},
                      {"hidden_width", model.hyperparams().hidden_width},
                      {"data_width", model.hyperparams().data_width},
                      {"units", units}};
    }
  } else if (!f.model.empty()) {
    throw UsageError("--model needs --encoder");
  }
  fmt::print("{}\n", out.dump(2));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plan-structured neural networks for query latency prediction"};
  app.set_version_flag("--version", std::string("qppnet ") + kToolVersion);
  app.set_config("--config", "", "Config file (TOML/INI); command-line flags override it");
  app.require_subcommand(1);

  SynthFlags synth;
  auto* cs = app.add_subcommand("synth", "Generate a labeled synthetic corpus");
  cs->add_option("--out", synth.out, "Output corpus (NDJSON)")->required();
  cs->add_option("--plans", synth.cfg.plan_count, "Number of plans")->capture_default_str();
  cs->add_option("--templates", synth.cfg.template_count, "Distinct plan templates (0: all fresh)")
      ->capture_default_str();
  cs->add_option("--relations", synth.cfg.relation_count, "Base relations")->capture_default_str();
  cs->add_option("--min-depth", synth.cfg.min_depth)->capture_default_str();
  cs->add_option("--max-depth", synth.cfg.max_depth)->capture_default_str();
  cs->add_option("--noise", synth.cfg.noise_sigma, "Log-normal latency noise sigma")
      ->capture_default_str();
  cs->add_option("--seed", synth.cfg.seed)->capture_default_str();

  FeaturizeFlags feat;
  auto* cf =
      app.add_subcommand("featurize", "Convert EXPLAIN ANALYZE JSON into a corpus + encoder");
  cf->add_option("--input", feat.inputs, "EXPLAIN (FORMAT JSON) files")
      ->required()
      ->check(CLI::ExistingFile);
  cf->add_option("--out", feat.out, "Output corpus (NDJSON)")->required();
  cf->add_option("--encoder-out", feat.encoder_out, "Output encoder JSON")->required();
  cf->add_option("--schema", feat.schema_path, "Schema JSON (default: built-in PostgreSQL)")
      ->check(CLI::ExistingFile);
  cf->add_option("--attr-vector-length", feat.attr_vector_length,
                 "Length of scan attribute statistic vectors")
      ->capture_default_str();
  cf->add_flag("--strict", feat.strict, "Abort on the first parse failure or unknown node type");

  TrainFlags train;
  auto* ct = app.add_subcommand("train", "Train a model on a labeled corpus");
  ct->add_option("--corpus", train.corpus)->required()->check(CLI::ExistingFile);
  ct->add_option("--encoder", train.encoder, "Reuse a fitted encoder")->check(CLI::ExistingFile);
  ct->add_option("--encoder-out", train.encoder_out, "Fit an encoder on the training split");
  ct->add_option("--model-out", train.model_out)->required();
  ct->add_option("--stats-out", train.stats_out, "Per-epoch stats CSV");
  ct->add_option("--hidden-layers", train.hp.hidden_layers)->capture_default_str();
  ct->add_option("--hidden-width", train.hp.hidden_width)->capture_default_str();
  ct->add_option("--data-width", train.hp.data_width, "Size d of the data vector")
      ->capture_default_str();
  ct->add_option("--lr", train.tc.learning_rate)->capture_default_str();
  ct->add_option("--momentum", train.tc.momentum)->capture_default_str();
  ct->add_option("--epochs", train.tc.epochs)->capture_default_str();
  ct->add_option("--batch-size", train.tc.batch_size, "Plans per batch")->capture_default_str();
  ct->add_option("--weighting", train.weighting, "Group weights: operators or plans")
      ->check(CLI::IsMember({"operators", "plans"}))
      ->capture_default_str();
  ct->add_option("--seed", train.seed)->capture_default_str();
  train.holdout.add(ct);

  PredictFlags pred;
  auto* cp = app.add_subcommand("predict", "Predict plan latencies");
  cp->add_option("--model", pred.model)->required()->check(CLI::ExistingFile);
  cp->add_option("--encoder", pred.encoder)->required()->check(CLI::ExistingFile);
  cp->add_option("--corpus", pred.corpus)->required()->check(CLI::ExistingFile);
  cp->add_option("--out", pred.out, "Predictions CSV")->required();
  cp->add_flag("--per-node", pred.per_node, "One row per operator instead of per plan");

  EvaluateFlags eval;
  auto* ce = app.add_subcommand("evaluate", "Score a model on labeled plans");
  ce->add_option("--model", eval.model)->required()->check(CLI::ExistingFile);
  ce->add_option("--encoder", eval.encoder)->required()->check(CLI::ExistingFile);
  ce->add_option("--corpus", eval.corpus)->required()->check(CLI::ExistingFile);
  ce->add_option("--report", eval.report, "Report JSON")->required();
  ce->add_option("--cdf-out", eval.cdf_out, "R(q) CDF CSV");
  ce->add_option("--per-template-out", eval.templates_out, "Per-template MAE CSV");
  ce->add_flag("--baseline", eval.baseline, "Also fit and score the calibrated cost model");
  ce->add_option("--seed", eval.seed, "Seed of the held-out split")->capture_default_str();
  eval.holdout.add(ce);

  InspectFlags insp;
  auto* ci = app.add_subcommand("inspect", "Summarize a corpus, encoder or model");
  ci->add_option("--corpus", insp.corpus)->check(CLI::ExistingFile);
  ci->add_option("--encoder", insp.encoder)->check(CLI::ExistingFile);
  ci->add_option("--model", insp.model)->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cs) run_synth(synth);
    if (*cf) run_featurize(feat);
    if (*ct) run_train(train);
    if (*cp) run_predict(pred);
    if (*ce) run_evaluate(eval);
    if (*ci) run_inspect(insp);
  } catch (const qppnet::Error& e) {
    fmt::print(stderr, "qppnet: error: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "qppnet: error: {}\n", e.what());
    return 1;
  }
  return 0;
}

#include "qppnet/ingest/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "qppnet/error.hpp"

namespace qppnet::ingest {

using nlohmann::json;

bool Corpus::labeled() const {
  return std::all_of(plans.begin(), plans.end(),
                     [](const PlanTree& t) { return t.root.fully_labeled(); });
}

json node_to_json(const PlanNode& node) {
  json attrs = json::object();
  for (const auto& [name, value] : node.attrs) {
    std::visit([&](const auto& v) { attrs[name] = v; }, value);
  }
  json j = {{"kind", node.kind}, {"attrs", std::move(attrs)}};
  if (node.latency) j["latency"] = *node.latency;
  json children = json::array();
  for (const auto& c : node.children) children.push_back(node_to_json(c));
  j["children"] = std::move(children);
  return j;
}

namespace {

double finite(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(fmt::format("{}: expected a number", path));
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(fmt::format("{}: number is not finite", path));
  return d;
}

AttrValue attr_from_json(const json& v, const std::string& path) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number()) return finite(v, path);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(finite(v[i], fmt::format("{}[{}]", path, i)));
    }
    return out;
  }
  throw ParseError(fmt::format("{}: unsupported attribute value", path));
}

}  // namespace

PlanNode node_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(fmt::format("{}: expected an object", path));
  PlanNode node;
  auto kind = j.find("kind");
  if (kind == j.end() || !kind->is_string()) {
    throw ParseError(fmt::format("{}: missing \"kind\"", path));
  }
  node.kind = kind->get<std::string>();
  if (auto attrs = j.find("attrs"); attrs != j.end()) {
    if (!attrs->is_object()) throw ParseError(fmt::format("{}.attrs: expected an object", path));
    for (auto it = attrs->begin(); it != attrs->end(); ++it) {
      node.attrs.emplace(it.key(),
                         attr_from_json(it.value(), fmt::format("{}.attrs.{}", path, it.key())));
    }
  }
  if (auto lat = j.find("latency"); lat != j.end() && !lat->is_null()) {
    const double v = finite(*lat, path + ".latency");
    if (v < 0.0) throw ParseError(fmt::format("{}.latency: negative latency", path));
    node.latency = v;
  }
  if (auto children = j.find("children"); children != j.end()) {
    if (!children->is_array()) {
      throw ParseError(fmt::format("{}.children: expected an array", path));
    }
    for (std::size_t i = 0; i < children->size(); ++i) {
      node.children.push_back(
          node_from_json((*children)[i], fmt::format("{}.children[{}]", path, i)));
    }
  }
  return node;
}

std::string write_corpus(const Corpus& corpus) {
  json header = {{"format", "qppnet-corpus"},
                 {"version", kCorpusFormatVersion},
                 {"count", corpus.plans.size()},
                 {"labeled", corpus.labeled()},
                 {"provenance", corpus.provenance}};
  std::string out = header.dump();
  out.push_back('\n');
  for (const auto& t : corpus.plans) {
    json rec = {{"id", t.id}, {"template", t.template_name}, {"plan", node_to_json(t.root)}};
    out += rec.dump();
    out.push_back('\n');
  }
  return out;
}

Corpus read_corpus(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError("line 1: missing corpus header");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("line 1: malformed header ({})", e.what()));
  }
  if (header.value("format", "") != "qppnet-corpus") {
    throw ParseError("line 1: not a qppnet corpus (format field)");
  }
  const int version = header.value("version", 0);
  if (version != kCorpusFormatVersion) {
    throw ParseError(fmt::format("line 1: unsupported corpus version {}", version));
  }

  Corpus corpus;
  corpus.provenance = header.value("provenance", json::object());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = fmt::format("line {}", lineno);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(fmt::format("{}: malformed record ({})", where, e.what()));
    }
    if (!rec.is_object() || !rec.contains("plan")) {
      throw ParseError(fmt::format("{}: record without \"plan\"", where));
    }
    PlanTree t;
    t.id = rec.value("id", std::string());
    t.template_name = rec.value("template", std::string());
    t.root = node_from_json(rec.at("plan"), where + ": plan");
    corpus.plans.push_back(std::move(t));
  }
  const auto expected = header.value("count", corpus.plans.size());
  if (expected != corpus.plans.size()) {
    throw ParseError(fmt::format("header declares {} plans, file holds {}", expected,
                                 corpus.plans.size()));
  }
  return corpus;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError(fmt::format("cannot write '{}'", path.string()));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw UsageError(fmt::format("failed writing '{}'", path.string()));
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  write_file(path, write_corpus(corpus));
}

Corpus load_corpus(const std::filesystem::path& path) {
  try {
    return read_corpus(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace qppnet::ingest

#include "qppnet/ingest/explain.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "qppnet/error.hpp"

namespace qppnet::ingest {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double finite_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(fmt::format("{}: expected a number", path));
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(fmt::format("{}: number is not finite", path));
  return d;
}

// Categorical text: strings are lowercased, arrays of strings joined with
// ", " (e.g. Sort Key), numbers spelled out.
std::string categorical(const json& v, const std::string& path) {
  if (v.is_string()) return lower(v.get<std::string>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ", ";
      out += categorical(v[i], fmt::format("{}[{}]", path, i));
    }
    return out;
  }
  throw ParseError(fmt::format("{}: expected categorical text", path));
}

// "Forward", "Partial", "Finalize", "true", "yes", "on" are true; any other
// text is false.
bool boolean_value(const json& v, const std::string& path) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number()) return finite_number(v, path) != 0.0;
  if (v.is_string()) {
    const std::string s = lower(v.get<std::string>());
    return s == "forward" || s == "partial" || s == "finalize" || s == "true" || s == "yes" ||
           s == "on";
  }
  throw ParseError(fmt::format("{}: expected a boolean", path));
}

AttrValue convert(const AttributeSpec& spec, const json& v, const std::string& path) {
  switch (spec.encoding) {
    case Encoding::numeric:
      return finite_number(v, path);
    case Encoding::boolean:
      return boolean_value(v, path);
    case Encoding::one_hot:
      return categorical(v, path);
    case Encoding::numeric_vector: {
      if (!v.is_array()) throw ParseError(fmt::format("{}: expected a numeric array", path));
      std::vector<double> out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(finite_number(v[i], fmt::format("{}[{}]", path, i)));
      }
      return out;
    }
  }
  return 0.0;
}

PlanNode parse_node(const json& j, const std::string& path, const Schema& schema,
                    const ExplainOptions& options) {
  if (!j.is_object()) throw ParseError(fmt::format("{}: plan node must be an object", path));
  auto nt = j.find("Node Type");
  if (nt == j.end() || !nt->is_string()) {
    throw ParseError(fmt::format("{}: missing \"Node Type\"", path));
  }
  const std::string node_type = nt->get<std::string>();
  std::optional<std::string> kind = schema.kind_for_node_type(node_type);
  if (!kind) {
    if (options.strict || !schema.fallback_kind()) {
      throw ParseError(fmt::format("{}: unknown node type \"{}\"", path, node_type));
    }
    kind = *schema.fallback_kind();
  }

  PlanNode node;
  node.kind = *kind;
  const OperatorKind& spec = schema.at(node.kind);
  for (const auto& a : spec.attributes) {
    if (a.source.empty()) continue;
    auto it = j.find(a.source);
    if (it == j.end() || it->is_null()) continue;
    node.attrs.emplace(a.name, convert(a, *it, fmt::format("{}.\"{}\"", path, a.source)));
  }

  if (auto t = j.find("Actual Total Time"); t != j.end()) {
    const double ms = finite_number(*t, path + ".\"Actual Total Time\"");
    double loops = 1.0;
    if (auto l = j.find("Actual Loops"); l != j.end()) {
      loops = finite_number(*l, path + ".\"Actual Loops\"");
    }
    const double seconds = ms * loops / 1000.0;
    if (seconds < 0.0) throw ParseError(fmt::format("{}: negative actual time", path));
    node.latency = seconds;
  }

  if (auto plans = j.find("Plans"); plans != j.end()) {
    if (!plans->is_array()) throw ParseError(fmt::format("{}.Plans: expected an array", path));
    for (std::size_t i = 0; i < plans->size(); ++i) {
      node.children.push_back(
          parse_node((*plans)[i], fmt::format("{}.Plans[{}]", path, i), schema, options));
    }
  }
  if (node.children.size() > spec.max_arity) {
    throw ParseError(fmt::format("{}: {} has {} children, at most {} allowed", path, node.kind,
                                 node.children.size(), spec.max_arity));
  }
  return node;
}

PlanTree parse_statement(const json& stmt, const std::string& path, const Schema& schema,
                         const ExplainOptions& options) {
  if (!stmt.is_object() || !stmt.contains("Plan")) {
    throw ParseError(fmt::format("{}: expected an object with a \"Plan\" member", path));
  }
  PlanTree tree;
  tree.root = parse_node(stmt.at("Plan"), path + ".Plan", schema, options);
  if (auto id = stmt.find("Query Id"); id != stmt.end()) {
    tree.id = id->is_string() ? id->get<std::string>() : id->dump();
  }
  if (auto tmpl = stmt.find("Template"); tmpl != stmt.end() && tmpl->is_string()) {
    tree.template_name = tmpl->get<std::string>();
  }
  return tree;
}

std::vector<PlanTree> parse_document(const json& doc, const std::string& path,
                                     const Schema& schema, const ExplainOptions& options) {
  std::vector<PlanTree> out;
  if (doc.is_array()) {
    if (doc.empty()) throw ParseError(fmt::format("{}: empty EXPLAIN array", path));
    for (std::size_t i = 0; i < doc.size(); ++i) {
      out.push_back(parse_statement(doc[i], fmt::format("{}[{}]", path, i), schema, options));
    }
  } else {
    out.push_back(parse_statement(doc, path, schema, options));
  }
  return out;
}

json parse_json(std::string_view text, const std::string& path) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: malformed JSON ({})", path, e.what()));
  }
}

}  // namespace

PlanTree parse_explain_json(std::string_view text, const Schema& schema,
                            const ExplainOptions& options) {
  const json doc = parse_json(text, "$");
  return parse_document(doc, "$", schema, options).front();
}

std::vector<PlanTree> parse_explain_documents(std::string_view text, const Schema& schema,
                                              const ExplainOptions& options) {
  if (json::accept(text)) return parse_document(json::parse(text), "$", schema, options);

  std::vector<PlanTree> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (std::all_of(line.begin(), line.end(),
                    [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    const std::string path = fmt::format("line {}: $", lineno);
    auto trees = parse_document(parse_json(line, path), path, schema, options);
    std::move(trees.begin(), trees.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace qppnet::ingest

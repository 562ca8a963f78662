#include "valuetax/io.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "json.hpp"

namespace valuetax::io {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Line (1-based) of a byte offset reported by the JSON parser.
std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
    throw ParseError("line " + std::to_string(line_of(text, byte)), "invalid JSON");
  }
}

[[noreturn]] void fail(const std::string& pointer, const std::string& what) {
  throw ParseError(pointer.empty() ? "/" : pointer, what);
}

const json& field(const json& obj, const std::string& pointer, const char* key) {
  if (!obj.is_object()) fail(pointer, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(pointer + "/" + key, "missing field");
  return *it;
}

std::string string_field(const json& obj, const std::string& pointer, const char* key) {
  const json& v = field(obj, pointer, key);
  if (!v.is_string()) fail(pointer + "/" + key, "expected a string");
  std::string s = v.get<std::string>();
  if (s.empty()) fail(pointer + "/" + key, "must be non-empty");
  return s;
}

double importance_value(const json& v, const std::string& pointer) {
  if (!v.is_number()) fail(pointer, "expected a number");
  double d = v.get<double>();
  if (!Importance::in_range(d)) fail(pointer, "importance " + v.dump() + " outside [-1, 1]");
  return d;
}

void check_schema(const json& doc) {
  const json& v = field(doc, "", "schema_version");
  if (!v.is_number_integer()) fail("/schema_version", "expected an integer");
  long long version = v.get<long long>();
  if (version != kSchemaVersion) throw SchemaVersionUnsupported(version);
}

const json& array_field(const json& doc, const char* key) {
  const json& v = field(doc, "", key);
  if (!v.is_array()) fail(std::string("/") + key, "expected an array");
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

namespace {

struct ParsedTaxonomy {
  ValueTaxonomy taxonomy;
  std::map<NodeId, std::size_t> node_index;
  std::map<Edge, std::size_t> edge_index;
};

ParsedTaxonomy parse_taxonomy_document(std::string_view text) {
  json doc = parse_json(text);
  if (!doc.is_object()) fail("", "expected a taxonomy object");
  check_schema(doc);

  TaxonomyBuilder b;
  std::map<NodeId, std::size_t> node_index;
  const json& nodes = array_field(doc, "nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string at = "/nodes/" + std::to_string(i);
    const json& n = nodes[i];
    std::string id = string_field(n, at, "id");
    std::string kind = string_field(n, at, "kind");
    if (node_index.contains(id)) fail(at + "/id", "duplicate node id '" + id + "'");
    if (kind == "label") {
      b.add_label(id, string_field(n, at, "label"));
    } else if (kind == "property") {
      b.add_property(id, string_field(n, at, "property"));
    } else {
      fail(at + "/kind", "unknown node kind '" + kind + "'");
    }
    node_index.emplace(id, i);
    if (auto it = n.find("importance"); it != n.end() && !it->is_null()) {
      b.set_importance(id, importance_value(*it, at + "/importance"));
    }
  }

  std::map<Edge, std::size_t> edge_index;
  const json& edges = array_field(doc, "edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string at = "/edges/" + std::to_string(i);
    Edge e{string_field(edges[i], at, "parent"), string_field(edges[i], at, "child")};
    if (edge_index.contains(e)) fail(at, "duplicate edge");
    b.add_edge(e.first, e.second);
    edge_index.emplace(std::move(e), i);
  }

  return {b.build(), std::move(node_index), std::move(edge_index)};
}

}  // namespace

ValueTaxonomy parse_taxonomy(std::string_view text) {
  auto parsed = parse_taxonomy_document(text);
  auto report = validate(parsed.taxonomy);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    std::string at = v.edge ? "/edges/" + std::to_string(parsed.edge_index.at(*v.edge))
                            : "/nodes/" + std::to_string(parsed.node_index.at(v.node));
    fail(at, std::string(to_string(v.rule)) + ": " + v.message);
  }
  return std::move(parsed.taxonomy);
}

ValueTaxonomy parse_taxonomy_candidate(std::string_view text) {
  return parse_taxonomy_document(text).taxonomy;
}

std::string serialize_taxonomy(const ValueTaxonomy& t) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  ordered_json nodes = ordered_json::array();
  for (const auto& [id, n] : t.nodes()) {
    ordered_json j;
    j["id"] = id.str();
    if (n.is_property()) {
      j["kind"] = "property";
      j["property"] = n.text();
    } else {
      j["kind"] = "label";
      j["label"] = n.text();
    }
    if (auto v = t.importance_of(id)) j["importance"] = *v;
    nodes.push_back(std::move(j));
  }
  doc["nodes"] = std::move(nodes);
  ordered_json edges = ordered_json::array();
  for (const auto& [parent, child] : t.edges()) {
    edges.push_back({{"parent", parent.str()}, {"child", child.str()}});
  }
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

ContextSpec parse_context(std::string_view text) {
  json doc = parse_json(text);
  if (!doc.is_object()) fail("", "expected a context object");
  check_schema(doc);

  ContextSpec ctx;
  ctx.id = string_field(doc, "", "id");

  if (auto it = doc.find("defining_properties"); it != doc.end()) {
    if (!it->is_array()) fail("/defining_properties", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& p = (*it)[i];
      if (!p.is_string() || p.get<std::string>().empty()) {
        fail("/defining_properties/" + std::to_string(i), "expected a non-empty string");
      }
      ctx.defining_properties.insert(p.get<std::string>());
    }
  }

  const json& imp = field(doc, "", "property_importance");
  if (!imp.is_object()) fail("/property_importance", "expected an object");
  for (const auto& [key, value] : imp.items()) {
    if (key.empty()) fail("/property_importance", "empty node id");
    double v = importance_value(value, "/property_importance/" + key);
    ctx.property_importance.emplace(key, Importance(v));
  }

  if (auto it = doc.find("selection"); it != doc.end()) {
    std::string kind = string_field(*it, "/selection", "kind");
    if (kind == "positive") {
      double threshold = 0.0;
      if (auto th = it->find("threshold"); th != it->end()) {
        threshold = importance_value(*th, "/selection/threshold");
      }
      ctx.selection = SelectionStrategy::positive(threshold);
    } else if (kind == "kmeans2") {
      ctx.selection = SelectionStrategy::kmeans_two();
    } else {
      fail("/selection/kind", "unknown selection strategy '" + kind + "'");
    }
  }
  return ctx;
}

std::string serialize_context(const ContextSpec& ctx) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["id"] = ctx.id;
  doc["defining_properties"] = ordered_json::array();
  for (const auto& p : ctx.defining_properties) doc["defining_properties"].push_back(p);
  ordered_json imp = ordered_json::object();
  for (const auto& [id, v] : ctx.property_importance) imp[id.str()] = v.value();
  doc["property_importance"] = std::move(imp);
  if (ctx.selection.kind == SelectionStrategy::Kind::KMeansTwo) {
    doc["selection"] = {{"kind", "kmeans2"}};
  } else {
    doc["selection"] = {{"kind", "positive"}, {"threshold", ctx.selection.threshold}};
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

std::vector<mutual_aid::Event> parse_event_log(std::string_view text) {
  using mutual_aid::EventKind;
  static const std::map<std::string, EventKind, std::less<>> kinds = {
      {"request", EventKind::Request},
      {"offer", EventKind::Offer},
      {"volunteer_chosen", EventKind::VolunteerChosen},
      {"task_assigned", EventKind::TaskAssigned},
  };

  std::vector<mutual_aid::Event> events;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    json rec;
    try {
      rec = json::parse(line.begin(), line.end());
    } catch (const json::parse_error&) {
      throw MalformedEvent(line_no, "invalid JSON record");
    }
    if (!rec.is_object()) throw MalformedEvent(line_no, "expected an object");

    auto kind = rec.find("kind");
    if (kind == rec.end() || !kind->is_string()) {
      throw MalformedEvent(line_no, "missing kind");
    }
    auto k = kinds.find(kind->get<std::string>());
    if (k == kinds.end()) {
      throw MalformedEvent(line_no, "unknown kind '" + kind->get<std::string>() + "'");
    }
    auto member = rec.find("member");
    if (member == rec.end() || !member->is_string() || member->get<std::string>().empty()) {
      throw MalformedEvent(line_no, "missing member");
    }
    auto ts = rec.find("timestamp");
    if (ts == rec.end() || !ts->is_number_unsigned()) {
      throw MalformedEvent(line_no, "timestamp must be a non-negative integer");
    }
    mutual_aid::Event e{k->second, member->get<std::string>(), ts->get<std::uint64_t>()};
    if (!events.empty() && e.timestamp < events.back().timestamp) {
      throw MalformedEvent(line_no, "timestamp decreases");
    }
    events.push_back(std::move(e));
  }
  return events;
}

std::string serialize_event_log(const std::vector<mutual_aid::Event>& events) {
  std::string out;
  for (const auto& e : events) {
    ordered_json j;
    j["kind"] = std::string(mutual_aid::to_string(e.kind));
    j["member"] = e.member;
    j["timestamp"] = e.timestamp;
    out += j.dump();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string report_to_json(const AlignmentReport& r) {
  ordered_json doc;
  doc["entity"] = r.entity;
  doc["scheme"] = std::string(to_string(r.scheme));
  doc["score"] = r.score;
  doc["max_paths"] = r.max_paths;
  ordered_json props = ordered_json::array();
  for (const auto& p : r.per_property) {
    ordered_json j;
    j["node"] = p.node.str();
    j["satisfaction"] = p.satisfaction;
    j["importance"] = p.importance;
    j["paths"] = p.paths;
    j["contribution"] = p.contribution;
    props.push_back(std::move(j));
  }
  doc["properties"] = std::move(props);
  return doc.dump(2) + "\n";
}

std::string coherence_to_json(const CoherenceReport& r) {
  ordered_json doc;
  doc["coherent"] = r.coherent();
  ordered_json vs = ordered_json::array();
  for (const auto& v : r.violations) {
    vs.push_back({{"parent", v.parent.str()}, {"expected", v.expected}, {"actual", v.actual}});
  }
  doc["violations"] = std::move(vs);
  doc["root_causes"] = ordered_json::array();
  for (const auto& n : r.root_causes) doc["root_causes"].push_back(n.str());
  doc["unevaluable"] = ordered_json::array();
  for (const auto& n : r.unevaluable) doc["unevaluable"].push_back(n.str());
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

namespace {

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string export_dot(const ValueTaxonomy& t) {
  require_valid(t);
  std::ostringstream os;
  os << "digraph taxonomy {\n";
  for (const auto& [id, n] : t.nodes()) {
    std::string label = n.is_property() ? id.str() : n.text();
    if (auto v = t.importance_of(id)) label += "\n" + fixed6(*v);
    std::string escaped;
    for (char c : label) {
      if (c == '\n') escaped += "\\n";
      else if (c == '"' || c == '\\') escaped += std::string("\\") + c;
      else escaped += c;
    }
    os << "  " << dot_quote(id.str()) << " [shape=" << (n.is_property() ? "square" : "circle")
       << ", label=\"" << escaped << "\"];\n";
  }
  for (const auto& [parent, child] : t.edges()) {
    os << "  " << dot_quote(parent.str()) << " -> " << dot_quote(child.str()) << ";\n";
  }
  os << "}\n";
  return os.str();
}

std::string fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

}  // namespace valuetax::io

#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "valuetax/aggregation.hpp"
#include "valuetax/alignment.hpp"
#include "valuetax/context.hpp"
#include "valuetax/io.hpp"
#include "valuetax/mutual_aid.hpp"
#include "valuetax/propagation.hpp"
#include "valuetax/taxonomy.hpp"

namespace valuetax::cli {

namespace {

using io::fixed6;
namespace ma = mutual_aid;

struct IoFailure : Error {
  using Error::Error;
};

/// Failure tied to one input file, so the message can name it.
struct FileError {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoFailure(path + ": read failed");
  return ss.str();
}

// Runs `fn`, prefixing library errors with the file they came from.
template <class Fn>
auto with_file(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const IoFailure&) {
    throw;
  } catch (const PropagationError& e) {
    throw FileError{kIncoherent, path + ": " + e.what()};
  } catch (const Error& e) {
    throw FileError{kInvalidInput, path + ": " + e.what()};
  }
}

ValueTaxonomy load_taxonomy(const std::string& path) {
  std::string text = read_file(path);
  return with_file(path, [&] { return io::parse_taxonomy(text); });
}

ContextSpec load_context(const std::string& path) {
  std::string text = read_file(path);
  return with_file(path, [&] { return io::parse_context(text); });
}

/// Left-aligned plain-text table.
class Table {
 public:
  explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string render() const {
    std::vector<std::size_t> width;
    for (const auto& r : rows_) {
      width.resize(std::max(width.size(), r.size()), 0);
      for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    }
    std::ostringstream os;
    for (const auto& r : rows_) {
      std::string line;
      for (std::size_t i = 0; i < r.size(); ++i) {
        line += r[i];
        if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
      }
      os << line << '\n';
    }
    return os.str();
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

std::string importance_cell(const ValueTaxonomy& t, const NodeId& id) {
  auto v = t.importance_of(id);
  return v ? fixed6(*v) : "-";
}

std::string taxonomy_table(const ValueTaxonomy& t) {
  if (t.empty()) return "(empty taxonomy)\n";
  Table table({"node", "kind", "text", "importance"});
  for (const auto& [id, n] : t.nodes()) {
    table.add({id.str(), n.is_property() ? "property" : "label", n.text(), importance_cell(t, id)});
  }
  return table.render();
}

std::string alignment_text(const AlignmentReport& r) {
  auto ex = explain(r);
  Table table({"property", "sd", "importance", "paths", "contribution"});
  for (const auto& c : ex.terms) {
    table.add({c.node.str(), fixed6(c.satisfaction), fixed6(c.importance), std::to_string(c.paths),
               fixed6(c.contribution)});
  }
  std::ostringstream os;
  os << table.render();
  os << "scheme: " << to_string(r.scheme) << '\n';
  if (r.scheme == AlignmentScheme::PathWeighted) os << "bound: +/-" << r.max_paths << '\n';
  os << "alignment(" << r.entity << "): " << fixed6(r.score) << '\n';
  return os.str();
}

std::string coherence_text(const CoherenceReport& r) {
  std::ostringstream os;
  if (r.coherent()) {
    os << "coherent\n";
  } else {
    Table table({"parent", "expected", "actual"});
    for (const auto& v : r.violations) {
      table.add({v.parent.str(), fixed6(v.expected), fixed6(v.actual)});
    }
    os << "incoherent\n" << table.render();
    os << "root causes:";
    for (const auto& n : r.root_causes) os << ' ' << n.str();
    os << '\n';
  }
  if (!r.unevaluable.empty()) {
    os << "unevaluable:";
    for (const auto& n : r.unevaluable) os << ' ' << n.str();
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------

struct Options {
  std::string input;
  std::string context;
  std::string log;
  std::string output;
  std::string format = "text";
  std::string strategy;
  std::optional<double> threshold;
  std::string scheme = "mean";
  std::string measure = "emd";
  std::string aggregation = "mean";
  std::string entity = "community";
  std::string node;
  std::vector<std::string> sd;
  bool include_detested = false;
  ma::DomainConfig domain;
};

bool machine(const Options& o) { return o.format == "machine"; }

SelectionStrategy selection_for(const Options& o, SelectionStrategy current) {
  if (o.strategy == "kmeans2") return SelectionStrategy::kmeans_two();
  if (o.strategy == "positive" || (o.strategy.empty() && o.threshold)) {
    double th = o.threshold.value_or(o.strategy.empty() ? current.threshold : 0.0);
    return SelectionStrategy::positive(th);
  }
  return current;
}

// Each command returns its exit code and writes the rendered result to `out`.

int cmd_validate(const Options& o, std::ostream& out) {
  std::string text = read_file(o.input);
  auto t = with_file(o.input, [&] { return io::parse_taxonomy_candidate(text); });
  auto report = validate(t);
  if (machine(o)) {
    nlohmann::ordered_json doc;
    doc["ok"] = report.ok();
    doc["violations"] = nlohmann::ordered_json::array();
    for (const auto& v : report.violations) {
      doc["violations"].push_back(
          {{"rule", std::string(to_string(v.rule))}, {"node", v.node.str()}, {"message", v.message}});
    }
    out << doc.dump(2) << '\n';
  } else if (report.ok()) {
    out << "ok: " << t.size() << " nodes, " << t.edges().size() << " edges\n";
  } else {
    for (const auto& v : report.violations) {
      out << o.input << ": " << to_string(v.rule) << " at '" << v.node.str() << "': " << v.message
          << '\n';
    }
  }
  return report.ok() ? kOk : kInvalidInput;
}

int cmd_propagate(const Options& o, std::ostream& out) {
  auto t = load_taxonomy(o.input);
  auto result = with_file(o.input, [&] { return propagate(t); });
  if (machine(o)) {
    out << io::serialize_taxonomy(result.taxonomy);
    return kOk;
  }
  std::set<NodeId> derived;
  for (const auto& a : result.assigned) derived.insert(a.node);
  Table table({"node", "kind", "importance", "source"});
  for (const auto& [id, n] : result.taxonomy.nodes()) {
    std::string source = derived.contains(id) ? "propagated"
                         : t.importance_of(id) ? "given"
                                               : "unset";
    table.add({id.str(), n.is_property() ? "property" : "label",
               importance_cell(result.taxonomy, id), source});
  }
  out << table.render() << "iterations: " << result.iterations << '\n';
  return kOk;
}

int cmd_coherence(const Options& o, std::ostream& out) {
  auto t = load_taxonomy(o.input);
  auto report = with_file(o.input, [&] { return check_coherence(t); });
  out << (machine(o) ? io::coherence_to_json(report) : coherence_text(report));
  return report.coherent() ? kOk : kIncoherent;
}

int cmd_context(const Options& o, std::ostream& out, std::ostream& err) {
  auto general = load_taxonomy(o.input);
  auto ctx = load_context(o.context);
  ctx.selection = selection_for(o, ctx.selection);
  auto built = with_file(o.context, [&] { return build_context_taxonomy(general, ctx); });
  if (built.empty_selection) {
    err << "warning: " << o.context << ": EmptySelection: no property node selected in context '"
        << ctx.id << "'\n";
  }
  out << (machine(o) ? io::serialize_taxonomy(built.taxonomy) : taxonomy_table(built.taxonomy));
  return kOk;
}

SatisfactionProvider sd_from_flags(const std::vector<std::string>& entries) {
  std::map<NodeId, double> values;
  for (const auto& e : entries) {
    auto eq = e.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw FileError{kInvalidInput, "--sd expects node=value, got '" + e + "'"};
    }
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(e.substr(eq + 1), &used);
      if (used != e.size() - eq - 1) throw std::invalid_argument(e);
    } catch (const std::exception&) {
      throw FileError{kInvalidInput, "--sd value is not a number in '" + e + "'"};
    }
    values[NodeId(e.substr(0, eq))] = v;
  }
  return [values](std::string_view, const NodeId& node) {
    auto it = values.find(node);
    if (it == values.end()) throw MissingSatisfaction(node.str());
    return it->second;
  };
}

int cmd_align(const Options& o, std::ostream& out) {
  auto taxonomy = load_taxonomy(o.input);
  AlignmentScheme scheme =
      o.scheme == "path" ? AlignmentScheme::PathWeighted : AlignmentScheme::MeanWeighted;

  SatisfactionProvider sd;
  std::string source;
  if (!o.log.empty()) {
    std::string text = read_file(o.log);
    auto events = with_file(o.log, [&] { return io::parse_event_log(text); });
    auto state = with_file(o.log, [&] { return ma::ingest(events); });
    ma::DomainConfig cfg = o.domain;
    cfg.measure = o.measure == "kl" ? ma::DifferenceMeasure::KLDivergence
                                    : ma::DifferenceMeasure::EarthMovers1D;
    cfg.aggregation = o.aggregation == "single" ? ma::MemberAggregation::SingleEntity
                                                : ma::MemberAggregation::MeanOverMembers;
    sd = with_file(o.log, [&] { return ma::community_sd_provider(std::move(state), cfg); });
    source = o.log;
  } else if (!o.sd.empty()) {
    sd = sd_from_flags(o.sd);
    source = "--sd";
  } else {
    throw FileError{kInvalidInput, "align needs --log or --sd"};
  }

  // Missing satisfaction is the sd source's fault; anything else comes from the documents.
  auto scored = [&](auto&& fn) {
    try {
      return fn();
    } catch (const MissingSatisfaction& e) {
      throw FileError{kInvalidInput, source + ": " + e.what()};
    } catch (const Error& e) {
      throw FileError{kInvalidInput, (o.context.empty() ? o.input : o.context) + ": " + e.what()};
    }
  };

  AlignmentReport report;
  if (!o.context.empty()) {
    auto ctx = load_context(o.context);
    ctx.selection = selection_for(o, ctx.selection);
    if (o.include_detested) {
      report = scored([&] { return align_with_context(o.entity, taxonomy, ctx, sd, scheme); });
    } else {
      auto built = with_file(o.context, [&] { return build_context_taxonomy(taxonomy, ctx); });
      report = scored([&] { return align(o.entity, built.taxonomy, sd, scheme); });
    }
  } else {
    report = scored([&] { return align(o.entity, taxonomy, sd, scheme); });
  }
  out << (machine(o) ? io::report_to_json(report) : alignment_text(report));
  return kOk;
}

int cmd_paths(const Options& o, std::ostream& out) {
  auto t = load_taxonomy(o.input);
  auto counts = with_file(o.input, [&] {
    if (!o.node.empty()) {
      std::map<NodeId, std::uint64_t> one;
      one.emplace(o.node, paths_count(t, o.node));
      return one;
    }
    return all_paths_counts(t);
  });
  if (machine(o)) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (const auto& [id, n] : counts) doc[id.str()] = n;
    out << doc.dump(2) << '\n';
  } else {
    Table table({"node", "paths"});
    for (const auto& [id, n] : counts) table.add({id.str(), std::to_string(n)});
    out << table.render();
  }
  return kOk;
}

int cmd_export_dot(const Options& o, std::ostream& out) {
  auto t = load_taxonomy(o.input);
  out << with_file(o.input, [&] { return io::export_dot(t); });
  return kOk;
}

// ---------------------------------------------------------------------------
// demo: the fairness example end to end, from embedded fixtures.

std::string demo_event_log() {
  std::vector<ma::Event> events;
  std::uint64_t ts = 0;
  // m1 asks three times for every offer: R = 3.
  for (int i = 0; i < 3; ++i) events.push_back({ma::EventKind::Request, "m1", ts++});
  events.push_back({ma::EventKind::Offer, "m1", ts++});
  // Tasks split 51/49 between two volunteers.
  events.push_back({ma::EventKind::VolunteerChosen, "v1", ts++});
  events.push_back({ma::EventKind::VolunteerChosen, "v2", ts++});
  for (int i = 0; i < 51; ++i) events.push_back({ma::EventKind::TaskAssigned, "v1", ts++});
  for (int i = 0; i < 49; ++i) events.push_back({ma::EventKind::TaskAssigned, "v2", ts++});
  return io::serialize_event_log(events);
}

ContextSpec demo_context(std::string id, std::map<std::string, double> imp) {
  ContextSpec ctx;
  ctx.id = std::move(id);
  for (const auto& [k, v] : imp) ctx.property_importance.emplace(k, Importance(v));
  return ctx;
}

int cmd_demo(const Options& o, std::ostream& out) {
  const auto general = ma::fairness_taxonomy();
  require_valid(general);

  auto laws = check_all_laws(mean_operator());
  bool laws_ok = std::all_of(laws.begin(), laws.end(), [](const LawReport& r) { return r.passed; });

  auto ctx_c = demo_context("c", {{"p1", 0.8}, {"p2", 0.0}, {"p3", 0.7}});
  auto ctx_c2 = demo_context("c'", {{"p1", -0.5}, {"p2", -0.5}, {"p3", 0.9}});
  auto built_c = build_context_taxonomy(general, ctx_c);
  auto built_c2 = build_context_taxonomy(general, ctx_c2);
  auto kmeans_c = select_nodes({{"p1", 0.8}, {"p2", 0.0}, {"p3", 0.7}}, SelectionStrategy::kmeans_two());
  bool coherent_c = check_coherence(built_c.taxonomy).coherent();
  bool coherent_c2 = check_coherence(built_c2.taxonomy).coherent();

  // Alignment: importances p1 = 1, p3 = 0.5; satisfaction p1 = 0.5, p3 = 0.9.
  auto ctx_e = demo_context("e", {{"p1", 1.0}, {"p2", 0.0}, {"p3", 0.5}});
  auto built_e = build_context_taxonomy(general, ctx_e);
  std::map<NodeId, double> given_sd = {{"p1", 0.5}, {"p3", 0.9}};
  auto given = align("e", built_e.taxonomy, [&](std::string_view, const NodeId& p) {
    auto it = given_sd.find(p);
    if (it == given_sd.end()) throw MissingSatisfaction(p.str());
    return it->second;
  });
  auto events = io::parse_event_log(demo_event_log());
  auto state = ma::ingest(events);
  auto from_log = align("e", built_e.taxonomy, ma::community_sd_provider(state, {}));

  if (machine(o)) {
    nlohmann::ordered_json doc;
    doc["general"] = nlohmann::ordered_json::parse(io::serialize_taxonomy(general));
    doc["aggregation_laws"] = nlohmann::ordered_json::object();
    for (const auto& r : laws) doc["aggregation_laws"][std::string(to_string(r.law))] = r.passed;
    doc["context_c"] = nlohmann::ordered_json::parse(io::serialize_taxonomy(built_c.taxonomy));
    doc["context_c_prime"] = nlohmann::ordered_json::parse(io::serialize_taxonomy(built_c2.taxonomy));
    doc["kmeans_selection_c"] = nlohmann::ordered_json::array();
    for (const auto& n : kmeans_c) doc["kmeans_selection_c"].push_back(n.str());
    doc["alignment"] = nlohmann::ordered_json::parse(io::report_to_json(given));
    doc["alignment_from_log"] = nlohmann::ordered_json::parse(io::report_to_json(from_log));
    out << doc.dump(2) << '\n';
    return kOk;
  }

  out << "== general fairness taxonomy (" << (validate(general).ok() ? "valid" : "INVALID")
      << ")\n"
      << taxonomy_table(general) << '\n';
  out << "== mean aggregation laws: " << (laws_ok ? "all pass" : "FAILED") << '\n';
  for (const auto& r : laws) {
    out << "  " << to_string(r.law) << ": " << (r.passed ? "pass" : "fail") << " (" << r.trials
        << " trials)\n";
  }
  out << "\n== context c: p1=0.8 p2=0 p3=0.7 ("
      << (coherent_c ? "coherent" : "INCOHERENT") << ")\n"
      << taxonomy_table(built_c.taxonomy);
  out << "k-means(2) selection:";
  for (const auto& n : kmeans_c) out << ' ' << n.str();
  out << "\n\n== context c': p1=-0.5 p2=-0.5 p3=0.9 ("
      << (coherent_c2 ? "coherent" : "INCOHERENT") << ")\n"
      << taxonomy_table(built_c2.taxonomy) << '\n';
  out << "== alignment, sd p1=0.5 p3=0.9, importance p1=1 p3=0.5\n" << alignment_text(given) << '\n';
  out << "== alignment from community event log (" << events.size() << " events)\n"
      << alignment_text(from_log) << '\n';
  out << "== context c as DOT\n" << io::export_dot(built_c.taxonomy);
  return kOk;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"text", "machine"}));
  sub->add_option("--output", o.output, "Write output to this file instead of stdout");
}

void add_domain(CLI::App* sub, Options& o) {
  sub->add_option("--max-r", o.domain.max_ratio, "Maximum request ratio");
  sub->add_option("--epsilon", o.domain.epsilon, "Workload difference threshold");
  sub->add_option("--max-delta", o.domain.max_delta, "Maximum workload difference");
  sub->add_option("--measure", o.measure, "Distribution difference")
      ->check(CLI::IsMember({"kl", "emd"}));
  sub->add_option("--aggregation", o.aggregation, "Lift of per-member properties")
      ->check(CLI::IsMember({"mean", "single"}));
  sub->add_flag("--saturate-ratio", o.domain.saturate_undefined_ratio,
                "Read requests without offers as the maximum ratio");
}

void add_selection(CLI::App* sub, Options& o) {
  sub->add_option("--strategy", o.strategy, "Property node selection")
      ->check(CLI::IsMember({"positive", "kmeans2"}));
  sub->add_option("--threshold", o.threshold, "Threshold for the positive strategy")
      ->check(CLI::Range(-1.0, 1.0));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Value taxonomies: validation, propagation, contexts and alignment", "valuetax"};
  app.require_subcommand(1, 1);

  auto* validate_cmd = app.add_subcommand("validate", "Check taxonomy structure");
  validate_cmd->add_option("--input", o.input, "Taxonomy document")->required();
  add_common(validate_cmd, o);

  auto* propagate_cmd = app.add_subcommand("propagate", "Propagate importances");
  propagate_cmd->add_option("--input", o.input, "Taxonomy document")->required();
  add_common(propagate_cmd, o);

  auto* coherence_cmd = app.add_subcommand("coherence", "Check importance coherence");
  coherence_cmd->add_option("--input", o.input, "Taxonomy document")->required();
  add_common(coherence_cmd, o);

  auto* context_cmd = app.add_subcommand("context", "Build a context-based taxonomy");
  context_cmd->add_option("--input", o.input, "General taxonomy document")->required();
  context_cmd->add_option("--context", o.context, "Context document")->required();
  add_selection(context_cmd, o);
  add_common(context_cmd, o);

  auto* align_cmd = app.add_subcommand("align", "Score value alignment");
  align_cmd->add_option("--input", o.input, "Taxonomy document")->required();
  align_cmd->add_option("--context", o.context, "Build this context from --input first");
  align_cmd->add_option("--log", o.log, "Community event log");
  align_cmd->add_option("--sd", o.sd, "Satisfaction degree as node=value (repeatable)");
  align_cmd->add_option("--entity", o.entity, "Entity being assessed");
  align_cmd->add_option("--scheme", o.scheme, "Weighting scheme")
      ->check(CLI::IsMember({"mean", "path"}));
  align_cmd->add_flag("--include-detested", o.include_detested,
                      "Score every property of the context, negative importances included");
  add_selection(align_cmd, o);
  add_domain(align_cmd, o);
  add_common(align_cmd, o);

  auto* paths_cmd = app.add_subcommand("paths", "Count root paths per node");
  paths_cmd->add_option("--input", o.input, "Taxonomy document")->required();
  paths_cmd->add_option("--node", o.node, "Only this node");
  add_common(paths_cmd, o);

  auto* dot_cmd = app.add_subcommand("export-dot", "Render the taxonomy as Graphviz DOT");
  dot_cmd->add_option("--input", o.input, "Taxonomy document")->required();
  add_common(dot_cmd, o);

  auto* demo_cmd = app.add_subcommand("demo", "Run the mutual-aid fairness example");
  add_common(demo_cmd, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  std::ostringstream rendered;
  int code = kOk;
  try {
    if (validate_cmd->parsed()) code = cmd_validate(o, rendered);
    else if (propagate_cmd->parsed()) code = cmd_propagate(o, rendered);
    else if (coherence_cmd->parsed()) code = cmd_coherence(o, rendered);
    else if (context_cmd->parsed()) code = cmd_context(o, rendered, err);
    else if (align_cmd->parsed()) code = cmd_align(o, rendered);
    else if (paths_cmd->parsed()) code = cmd_paths(o, rendered);
    else if (dot_cmd->parsed()) code = cmd_export_dot(o, rendered);
    else if (demo_cmd->parsed()) code = cmd_demo(o, rendered);
  } catch (const IoFailure& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const FileError& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const PropagationError& e) {
    err << "error: " << e.what() << '\n';
    return kIncoherent;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  if (o.output.empty()) {
    out << rendered.str();
  } else {
    std::ofstream file(o.output, std::ios::binary);
    if (!file || !(file << rendered.str()) || !file.flush()) {
      err << "error: " << o.output << ": cannot write output\n";
      return kIoFailure;
    }
  }
  return code;
}

}  // namespace valuetax::cli

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "valuetax/alignment.hpp"
#include "valuetax/context.hpp"
#include "valuetax/mutual_aid.hpp"
#include "valuetax/propagation.hpp"
#include "valuetax/taxonomy.hpp"

namespace valuetax::io {

inline constexpr int kSchemaVersion = 1;

/// Taxonomy document:
///
///   {"schema_version": 1,
///    "nodes": [{"id": "fairness", "kind": "label", "label": "fairness", "importance": 0.75},
///              {"id": "p1", "kind": "property", "property": "p1"}],
///    "edges": [{"parent": "fairness", "child": "p1"}]}
///
/// Parsing rejects malformed JSON, missing or mistyped fields, importances outside [-1, 1],
/// duplicate nodes or edges and structurally invalid taxonomies with a ParseError located by
/// line (syntax) or JSON pointer (fields). Serialization sorts nodes and edges and writes
/// importances with the shortest decimal that reads back to the same double.
ValueTaxonomy parse_taxonomy(std::string_view text);
/// As parse_taxonomy, but leaves structural rules (cycles, leaf restriction, edge endpoints) to
/// a later validate() so that every violation can be reported.
ValueTaxonomy parse_taxonomy_candidate(std::string_view text);
std::string serialize_taxonomy(const ValueTaxonomy& taxonomy);

/// Context document:
///
///   {"schema_version": 1, "id": "c", "defining_properties": ["p1"],
///    "property_importance": {"p1": 0.8, "p2": 0, "p3": 0.7},
///    "selection": {"kind": "positive", "threshold": 0}}
///
/// `selection` is optional (positive, threshold 0); its kind is "positive" or "kmeans2".
ContextSpec parse_context(std::string_view text);
std::string serialize_context(const ContextSpec& ctx);

/// One JSON object per line: {"kind": "request", "member": "m1", "timestamp": 3}, with kind one
/// of request, offer, volunteer_chosen, task_assigned. Blank lines are skipped. Timestamps must
/// not decrease. Errors are MalformedEvent carrying the one-based line number.
std::vector<mutual_aid::Event> parse_event_log(std::string_view text);
std::string serialize_event_log(const std::vector<mutual_aid::Event>& events);

std::string report_to_json(const AlignmentReport& report);
std::string coherence_to_json(const CoherenceReport& report);

/// Graphviz digraph: label nodes as circles, property nodes as squares, each labelled with its
/// text and importance (6 decimals) when set. Throws InvalidTaxonomy.
std::string export_dot(const ValueTaxonomy& taxonomy);

/// Fixed 6-decimal rendering used for all human-readable numbers.
std::string fixed6(double value);

}  // namespace valuetax::io

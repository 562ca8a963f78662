#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "valuetax/error.hpp"

namespace valuetax {

/// Identifier of a node, unique within a taxonomy. Never empty.
class NodeId {
 public:
  NodeId(std::string id) : id_(std::move(id)) {  // NOLINT(google-explicit-constructor)
    if (id_.empty()) throw InvalidTaxonomy("node id must be non-empty");
  }
  NodeId(const char* id) : NodeId(std::string(id)) {}  // NOLINT(google-explicit-constructor)

  const std::string& str() const noexcept { return id_; }

  friend bool operator==(const NodeId&, const NodeId&) = default;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;

 private:
  std::string id_;
};

/// Importance of a value concept, restricted to [-1, 1].
class Importance {
 public:
  static constexpr double kMin = -1.0;
  static constexpr double kMax = 1.0;

  explicit Importance(double value);

  double value() const noexcept { return value_; }

  static bool in_range(double value) noexcept { return value >= kMin && value <= kMax; }

  friend bool operator==(const Importance&, const Importance&) = default;

 private:
  double value_;
};

enum class NodeKind { Label, Property };

/// Label nodes carry a human-readable text; property nodes reference a property catalog entry.
class Node {
 public:
  static Node label(NodeId id, std::string text);
  static Node property(NodeId id, std::string property_id);

  const NodeId& id() const noexcept { return id_; }
  NodeKind kind() const noexcept { return kind_; }
  bool is_property() const noexcept { return kind_ == NodeKind::Property; }
  /// Label text for label nodes, catalog reference for property nodes.
  const std::string& text() const noexcept { return text_; }
  const std::string* label_text() const noexcept { return is_property() ? nullptr : &text_; }
  const std::string* property_id() const noexcept { return is_property() ? &text_ : nullptr; }

  friend bool operator==(const Node&, const Node&) = default;

 private:
  Node(NodeId id, NodeKind kind, std::string text)
      : id_(std::move(id)), kind_(kind), text_(std::move(text)) {}

  NodeId id_;
  NodeKind kind_;
  std::string text_;
};

using Edge = std::pair<NodeId, NodeId>;  // (parent, child)

/// An importance-annotated graph of label and property nodes.
///
/// Instances are immutable once built (see TaxonomyBuilder). Structural rules (acyclicity,
/// property nodes as leaves, edge endpoints present) are *not* enforced on construction so that
/// arbitrary candidates can be checked with validate(); graph queries validate first.
class ValueTaxonomy {
 public:
  ValueTaxonomy() = default;

  const std::map<NodeId, Node>& nodes() const noexcept { return nodes_; }
  const std::set<Edge>& edges() const noexcept { return edges_; }
  const std::map<NodeId, Importance>& importance() const noexcept { return importance_; }

  bool contains(const NodeId& id) const { return nodes_.contains(id); }
  const Node& node(const NodeId& id) const;
  std::optional<double> importance_of(const NodeId& id) const;
  bool empty() const noexcept { return nodes_.empty(); }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Children in NodeId order; empty for unknown nodes (use children() for checked access).
  const std::vector<NodeId>& children_of(const NodeId& id) const;
  const std::vector<NodeId>& parents_of(const NodeId& id) const;

  std::vector<NodeId> property_nodes() const;

  friend bool operator==(const ValueTaxonomy& a, const ValueTaxonomy& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_ && a.importance_ == b.importance_;
  }

 private:
  friend class TaxonomyBuilder;

  std::map<NodeId, Node> nodes_;
  std::set<Edge> edges_;
  std::map<NodeId, Importance> importance_;
  std::map<NodeId, std::vector<NodeId>> children_;
  std::map<NodeId, std::vector<NodeId>> parents_;
};

class TaxonomyBuilder {
 public:
  TaxonomyBuilder() = default;
  explicit TaxonomyBuilder(const ValueTaxonomy& from);

  /// Throws DuplicateEntry if the id is already present.
  TaxonomyBuilder& add_node(Node node);
  TaxonomyBuilder& add_label(NodeId id, std::string text);
  TaxonomyBuilder& add_property(NodeId id, std::string property_id);
  /// Throws DuplicateEntry on a repeated (parent, child) pair.
  TaxonomyBuilder& add_edge(NodeId parent, NodeId child);
  /// Throws UnknownNode if the node has not been added.
  TaxonomyBuilder& set_importance(NodeId id, Importance value);
  TaxonomyBuilder& set_importance(NodeId id, double value) {
    return set_importance(std::move(id), Importance(value));
  }
  TaxonomyBuilder& clear_importance(const NodeId& id);

  ValueTaxonomy build() const;

 private:
  ValueTaxonomy t_;
};

enum class ValidationRule {
  UnknownEdgeEndpoint,
  CycleDetected,
  PropertyNodeNotLeaf,
};

std::string_view to_string(ValidationRule rule);

struct Violation {
  ValidationRule rule;
  NodeId node;
  std::optional<Edge> edge;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(ValidationRule rule) const;
};

ValidationReport validate(const ValueTaxonomy& taxonomy);

/// Throws InvalidTaxonomy naming the first violation.
void require_valid(const ValueTaxonomy& taxonomy);

std::set<NodeId> roots(const ValueTaxonomy& taxonomy);
std::set<NodeId> children(const ValueTaxonomy& taxonomy, const NodeId& n);
std::set<NodeId> ancestors(const ValueTaxonomy& taxonomy, const NodeId& n);
std::set<NodeId> descendants(const ValueTaxonomy& taxonomy, const NodeId& n);

/// Number of distinct directed paths from any root to `p` (1 for a root).
std::uint64_t paths_count(const ValueTaxonomy& taxonomy, const NodeId& p);
/// paths_count for every node at once.
std::map<NodeId, std::uint64_t> all_paths_counts(const ValueTaxonomy& taxonomy);

/// Nodes ordered so that every parent precedes its children. Requires a valid taxonomy.
std::vector<NodeId> topological_order(const ValueTaxonomy& taxonomy);

// ---------------------------------------------------------------------------
// Holders

/// Who holds a taxonomy: `holder`'s own values, or `holder`'s belief about `subject`'s values.
struct HolderRef {
  std::string holder;
  std::optional<std::string> subject;

  HolderRef(std::string holder_id, std::optional<std::string> subject_id = std::nullopt);

  friend bool operator==(const HolderRef&, const HolderRef&) = default;
  friend auto operator<=>(const HolderRef&, const HolderRef&) = default;
};

/// Single writer, many readers; callers serialize writes.
class HolderRegistry {
 public:
  /// Throws InvalidTaxonomy if the taxonomy does not validate.
  void put(const HolderRef& ref, ValueTaxonomy taxonomy);
  std::optional<ValueTaxonomy> get(const HolderRef& ref) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::map<HolderRef, ValueTaxonomy> entries_;
};

}  // namespace valuetax

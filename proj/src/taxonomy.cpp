#include "valuetax/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace valuetax {

namespace {

const std::vector<NodeId>& empty_ids() {
  static const std::vector<NodeId> kEmpty;
  return kEmpty;
}

std::string edge_text(const Edge& e) { return "(" + e.first.str() + ", " + e.second.str() + ")"; }

void require_node(const ValueTaxonomy& t, const NodeId& n) {
  if (!t.contains(n)) throw UnknownNode(n.str());
}

}  // namespace

Importance::Importance(double value) : value_(value) {
  if (!in_range(value)) {
    throw ImportanceOutOfRange("importance " + std::to_string(value) + " outside [-1, 1]");
  }
}

Node Node::label(NodeId id, std::string text) {
  return Node(std::move(id), NodeKind::Label, std::move(text));
}

Node Node::property(NodeId id, std::string property_id) {
  if (property_id.empty()) throw InvalidTaxonomy("property node '" + id.str() + "' needs a property id");
  return Node(std::move(id), NodeKind::Property, std::move(property_id));
}

const Node& ValueTaxonomy::node(const NodeId& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownNode(id.str());
  return it->second;
}

std::optional<double> ValueTaxonomy::importance_of(const NodeId& id) const {
  auto it = importance_.find(id);
  if (it == importance_.end()) return std::nullopt;
  return it->second.value();
}

const std::vector<NodeId>& ValueTaxonomy::children_of(const NodeId& id) const {
  auto it = children_.find(id);
  return it == children_.end() ? empty_ids() : it->second;
}

const std::vector<NodeId>& ValueTaxonomy::parents_of(const NodeId& id) const {
  auto it = parents_.find(id);
  return it == parents_.end() ? empty_ids() : it->second;
}

std::vector<NodeId> ValueTaxonomy::property_nodes() const {
  std::vector<NodeId> out;
  for (const auto& [id, n] : nodes_) {
    if (n.is_property()) out.push_back(id);
  }
  return out;
}

// ---------------------------------------------------------------------------

TaxonomyBuilder::TaxonomyBuilder(const ValueTaxonomy& from) : t_(from) {}

TaxonomyBuilder& TaxonomyBuilder::add_node(Node node) {
  NodeId id = node.id();
  if (!t_.nodes_.emplace(id, std::move(node)).second) {
    throw DuplicateEntry("duplicate node id '" + id.str() + "'");
  }
  return *this;
}

TaxonomyBuilder& TaxonomyBuilder::add_label(NodeId id, std::string text) {
  return add_node(Node::label(std::move(id), std::move(text)));
}

TaxonomyBuilder& TaxonomyBuilder::add_property(NodeId id, std::string property_id) {
  return add_node(Node::property(std::move(id), std::move(property_id)));
}

TaxonomyBuilder& TaxonomyBuilder::add_edge(NodeId parent, NodeId child) {
  Edge e{std::move(parent), std::move(child)};
  if (t_.edges_.contains(e)) throw DuplicateEntry("duplicate edge " + edge_text(e));
  t_.edges_.insert(std::move(e));
  return *this;
}

TaxonomyBuilder& TaxonomyBuilder::set_importance(NodeId id, Importance value) {
  if (!t_.nodes_.contains(id)) throw UnknownNode(id.str());
  t_.importance_.insert_or_assign(std::move(id), value);
  return *this;
}

TaxonomyBuilder& TaxonomyBuilder::clear_importance(const NodeId& id) {
  t_.importance_.erase(id);
  return *this;
}

ValueTaxonomy TaxonomyBuilder::build() const {
  ValueTaxonomy out = t_;
  out.children_.clear();
  out.parents_.clear();
  // edges_ is ordered by (parent, child), so adjacency lists come out sorted.
  for (const auto& [parent, child] : out.edges_) {
    out.children_[parent].push_back(child);
    out.parents_[child].push_back(parent);
  }
  for (auto& [id, ps] : out.parents_) std::sort(ps.begin(), ps.end());
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ValidationRule rule) {
  switch (rule) {
    case ValidationRule::UnknownEdgeEndpoint: return "UnknownEdgeEndpoint";
    case ValidationRule::CycleDetected: return "CycleDetected";
    case ValidationRule::PropertyNodeNotLeaf: return "PropertyNodeNotLeaf";
  }
  return "?";
}

bool ValidationReport::has(ValidationRule rule) const {
  return std::any_of(violations.begin(), violations.end(),
                     [rule](const Violation& v) { return v.rule == rule; });
}

ValidationReport validate(const ValueTaxonomy& t) {
  ValidationReport report;

  for (const auto& e : t.edges()) {
    for (const NodeId* end : {&e.first, &e.second}) {
      if (!t.contains(*end)) {
        report.violations.push_back({ValidationRule::UnknownEdgeEndpoint, *end, e,
                                     "edge " + edge_text(e) + " references unknown node '" +
                                         end->str() + "'"});
      }
    }
    auto it = t.nodes().find(e.first);
    if (it != t.nodes().end() && it->second.is_property()) {
      report.violations.push_back({ValidationRule::PropertyNodeNotLeaf, e.first, e,
                                   "property node '" + e.first.str() + "' is the parent in edge " +
                                       edge_text(e)});
    }
  }

  // Colour DFS over the adjacency lists; each back edge closes one cycle.
  enum class Mark { White, Grey, Black };
  std::map<NodeId, Mark> mark;
  for (const auto& [id, _] : t.nodes()) mark.emplace(id, Mark::White);

  std::function<void(const NodeId&)> visit = [&](const NodeId& n) {
    mark[n] = Mark::Grey;
    for (const auto& c : t.children_of(n)) {
      auto it = mark.find(c);
      if (it == mark.end()) continue;  // unknown endpoint, reported above
      if (it->second == Mark::Grey) {
        Edge back{n, c};
        report.violations.push_back({ValidationRule::CycleDetected, c, back,
                                     "cycle through '" + c.str() + "' closed by edge " +
                                         edge_text(back)});
      } else if (it->second == Mark::White) {
        visit(c);
      }
    }
    mark[n] = Mark::Black;
  };
  for (const auto& [id, _] : t.nodes()) {
    if (mark[id] == Mark::White) visit(id);
  }
  return report;
}

void require_valid(const ValueTaxonomy& t) {
  auto report = validate(t);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw InvalidTaxonomy(std::string(to_string(v.rule)) + ": " + v.message);
  }
}

std::set<NodeId> roots(const ValueTaxonomy& t) {
  require_valid(t);
  std::set<NodeId> out;
  for (const auto& [id, _] : t.nodes()) {
    if (t.parents_of(id).empty()) out.insert(id);
  }
  return out;
}

std::set<NodeId> children(const ValueTaxonomy& t, const NodeId& n) {
  require_node(t, n);
  const auto& cs = t.children_of(n);
  return {cs.begin(), cs.end()};
}

namespace {

std::set<NodeId> reach(const ValueTaxonomy& t, const NodeId& start,
                       const std::vector<NodeId>& (ValueTaxonomy::*next)(const NodeId&) const) {
  std::set<NodeId> seen;
  std::vector<NodeId> stack = (t.*next)(start);
  while (!stack.empty()) {
    NodeId n = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    for (const auto& m : (t.*next)(n)) {
      if (!seen.contains(m)) stack.push_back(m);
    }
  }
  return seen;
}

}  // namespace

std::set<NodeId> ancestors(const ValueTaxonomy& t, const NodeId& n) {
  require_node(t, n);
  return reach(t, n, &ValueTaxonomy::parents_of);
}

std::set<NodeId> descendants(const ValueTaxonomy& t, const NodeId& n) {
  require_node(t, n);
  return reach(t, n, &ValueTaxonomy::children_of);
}

std::vector<NodeId> topological_order(const ValueTaxonomy& t) {
  require_valid(t);
  std::map<NodeId, std::size_t> indegree;
  std::set<NodeId> ready;
  for (const auto& [id, _] : t.nodes()) {
    indegree[id] = t.parents_of(id).size();
    if (indegree[id] == 0) ready.insert(id);
  }
  std::vector<NodeId> order;
  order.reserve(t.size());
  while (!ready.empty()) {
    NodeId n = *ready.begin();
    ready.erase(ready.begin());
    for (const auto& c : t.children_of(n)) {
      if (--indegree[c] == 0) ready.insert(c);
    }
    order.push_back(std::move(n));
  }
  return order;
}

std::map<NodeId, std::uint64_t> all_paths_counts(const ValueTaxonomy& t) {
  std::map<NodeId, std::uint64_t> count;
  for (const auto& n : topological_order(t)) {
    const auto& ps = t.parents_of(n);
    if (ps.empty()) {
      count[n] = 1;
      continue;
    }
    std::uint64_t sum = 0;
    for (const auto& p : ps) sum += count.at(p);
    count[n] = sum;
  }
  return count;
}

std::uint64_t paths_count(const ValueTaxonomy& t, const NodeId& p) {
  require_node(t, p);
  return all_paths_counts(t).at(p);
}

// ---------------------------------------------------------------------------

HolderRef::HolderRef(std::string holder_id, std::optional<std::string> subject_id)
    : holder(std::move(holder_id)), subject(std::move(subject_id)) {
  if (holder.empty()) throw Error("holder id must be non-empty");
}

void HolderRegistry::put(const HolderRef& ref, ValueTaxonomy taxonomy) {
  require_valid(taxonomy);
  entries_.insert_or_assign(ref, std::move(taxonomy));
}

std::optional<ValueTaxonomy> HolderRegistry::get(const HolderRef& ref) const {
  auto it = entries_.find(ref);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

}  // namespace valuetax

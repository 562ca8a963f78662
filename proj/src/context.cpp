#include "valuetax/context.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

#include "valuetax/propagation.hpp"

namespace valuetax {

SelectionStrategy SelectionStrategy::positive(double threshold) {
  if (!Importance::in_range(threshold)) {
    throw InvalidContext("selection threshold must lie in [-1, 1]");
  }
  return {Kind::PositiveThreshold, threshold};
}

SelectionStrategy SelectionStrategy::kmeans_two() { return {Kind::KMeansTwo, 0.0}; }

double ContextSpec::importance_of(const NodeId& node) const {
  auto it = property_importance.find(node);
  return it == property_importance.end() ? 0.0 : it->second.value();
}

namespace {

// Lowest value of the upper cluster of the optimal two-way split, or nullopt if no split
// lowers the within-cluster sum of squares.
std::optional<double> kmeans_two_cut(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::vector<double> prefix(n + 1, 0.0), prefix_sq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i] + values[i];
    prefix_sq[i + 1] = prefix_sq[i] + values[i] * values[i];
  }
  auto sse = [&](std::size_t lo, std::size_t hi) {  // [lo, hi)
    double cnt = static_cast<double>(hi - lo);
    double s = prefix[hi] - prefix[lo];
    return std::max(0.0, (prefix_sq[hi] - prefix_sq[lo]) - s * s / cnt);
  };

  std::optional<double> cut;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < n; ++k) {
    if (!(values[k - 1] < values[k])) continue;  // equal values stay together
    double cost = sse(0, k) + sse(k, n);
    if (cost < best) {
      best = cost;
      cut = values[k];
    }
  }
  return cut;
}

}  // namespace

std::set<NodeId> select_nodes(const std::map<NodeId, double>& importances,
                              const SelectionStrategy& strategy) {
  std::set<NodeId> out;
  if (strategy.kind == SelectionStrategy::Kind::PositiveThreshold) {
    for (const auto& [id, v] : importances) {
      if (v > strategy.threshold) out.insert(id);
    }
    return out;
  }

  if (importances.empty()) throw EmptyInput("k-means selection needs at least one importance");
  std::vector<double> values;
  values.reserve(importances.size());
  for (const auto& [_, v] : importances) values.push_back(v);
  auto cut = kmeans_two_cut(std::move(values));
  for (const auto& [id, v] : importances) {
    if (!cut || v >= *cut) out.insert(id);
  }
  return out;
}

ContextTaxonomy build_context_taxonomy(const ValueTaxonomy& general, const ContextSpec& ctx) {
  require_valid(general);
  for (const auto& [id, _] : ctx.property_importance) {
    if (!general.contains(id) || !general.node(id).is_property()) {
      throw InvalidContext("context '" + ctx.id + "' assigns importance to '" + id.str() +
                           "', which is not a property node of the taxonomy");
    }
  }

  std::map<NodeId, double> candidate;
  for (const auto& p : general.property_nodes()) candidate.emplace(p, ctx.importance_of(p));

  ContextTaxonomy out;
  if (candidate.empty()) {
    out.empty_selection = true;
    return out;
  }
  out.selected = select_nodes(candidate, ctx.selection);
  if (out.selected.empty()) {
    out.empty_selection = true;
    return out;
  }

  // Close upwards: every ancestor of a selected node lies on a root path to it.
  std::set<NodeId> keep = out.selected;
  for (const auto& s : out.selected) {
    auto up = ancestors(general, s);
    keep.insert(up.begin(), up.end());
  }

  TaxonomyBuilder b;
  for (const auto& id : keep) b.add_node(general.node(id));
  for (const auto& [parent, child] : general.edges()) {
    if (keep.contains(parent) && keep.contains(child)) b.add_edge(parent, child);
  }
  for (const auto& s : out.selected) b.set_importance(s, ctx.importance_of(s));

  out.taxonomy = propagate(b.build()).taxonomy;
  return out;
}

}  // namespace valuetax

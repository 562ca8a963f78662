#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "valuetax/error.hpp"
#include "valuetax/taxonomy.hpp"

namespace valuetax {

struct SelectionStrategy {
  enum class Kind { PositiveThreshold, KMeansTwo };

  Kind kind = Kind::PositiveThreshold;
  double threshold = 0.0;  // PositiveThreshold only, in [-1, 1]

  static SelectionStrategy positive(double threshold = 0.0);
  static SelectionStrategy kmeans_two();
};

/// A context: the properties that define it and the importance each property node takes in it.
struct ContextSpec {
  std::string id;
  std::set<std::string> defining_properties;
  std::map<NodeId, Importance> property_importance;
  SelectionStrategy selection;

  /// Importance of `node` in this context; 0 when unlisted.
  double importance_of(const NodeId& node) const;
};

/// Nodes to keep. PositiveThreshold keeps I(n) > threshold. KMeansTwo splits the values into
/// two 1-D clusters with minimal within-cluster sum of squares and keeps the higher one; with
/// no variance-reducing split (a single distinct value) every node is kept.
std::set<NodeId> select_nodes(const std::map<NodeId, double>& importances,
                              const SelectionStrategy& strategy);

struct ContextTaxonomy {
  ValueTaxonomy taxonomy;
  std::set<NodeId> selected;
  bool empty_selection = false;  // warning: nothing selected, taxonomy is empty
};

/// Keeps the selected property nodes and every node on a path from a root down to one of
/// them, assigns the context importances to the selected nodes and propagates upwards.
/// Importances carried by `general` are ignored.
ContextTaxonomy build_context_taxonomy(const ValueTaxonomy& general, const ContextSpec& ctx);

// ---------------------------------------------------------------------------

template <class World>
using PropertyEvaluator = std::function<bool(const World&)>;

template <class World>
using EvaluatorRegistry = std::map<std::string, PropertyEvaluator<World>, std::less<>>;

/// True iff every defining property of `ctx` holds in `world`.
template <class World>
bool context_holds(const ContextSpec& ctx, const World& world,
                   const EvaluatorRegistry<World>& evaluators) {
  for (const auto& p : ctx.defining_properties) {
    if (!evaluators.contains(p)) throw MissingEvaluator(p);
  }
  for (const auto& p : ctx.defining_properties) {
    if (!evaluators.find(p)->second(world)) return false;
  }
  return true;
}

}  // namespace valuetax

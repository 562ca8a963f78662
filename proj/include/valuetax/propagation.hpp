#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "valuetax/aggregation.hpp"
#include "valuetax/error.hpp"
#include "valuetax/taxonomy.hpp"

namespace valuetax {

/// Equality test used for coherence: |a - b| <= max(absolute, relative * max(|a|, |b|)).
struct Tolerance {
  double relative = 1e-9;
  double absolute = 1e-12;

  bool equal(double a, double b) const;
};

struct Assignment {
  NodeId node;
  double value;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct PropagationResult {
  ValueTaxonomy taxonomy;
  /// Newly assigned importances, in assignment order.
  std::vector<Assignment> assigned;
  /// Outer fixpoint passes, including the final pass that assigned nothing.
  std::size_t iterations = 0;
};

/// A propagation run that stopped early. Carries the assignments made before the failure.
class PropagationError : public Error {
 public:
  PropagationError(const std::string& what, NodeId node, std::vector<Assignment> partial)
      : Error(what), node_(std::move(node)), partial_(std::move(partial)) {}

  const NodeId& node() const noexcept { return node_; }
  const std::vector<Assignment>& partial() const noexcept { return partial_; }

 private:
  NodeId node_;
  std::vector<Assignment> partial_;
};

/// A set parent whose fully-set children do not average to it.
class IncoherentInput : public PropagationError {
 public:
  using PropagationError::PropagationError;
};

/// Two parents of a shared child imply different values for it.
class ConflictingAssignment : public PropagationError {
 public:
  using PropagationError::PropagationError;
};

/// A derived importance fell outside [-1, 1].
class RangeViolation : public PropagationError {
 public:
  using PropagationError::PropagationError;
};

/// Fixpoint propagation of importances with the mean operator.
///
/// Walks the taxonomy from its roots (children in NodeId order) and, at each node:
///  - set node, all children set: checks node == mean(children), else IncoherentInput;
///  - set node, one child unset: solves the mean for that child;
///  - set node, several unset children none of which has a set descendant: splits the
///    remainder equally among them;
///  - unset node, all children set: assigns the mean;
///  - unset node, some children set and the unset ones without set descendants: assigns the
///    mean of the set children to the node and to each unset child;
///  - otherwise nothing.
/// Passes repeat until one assigns nothing. Pre-assigned values are never changed.
PropagationResult propagate(const ValueTaxonomy& taxonomy, const Tolerance& tolerance = {});

struct CoherenceViolation {
  NodeId parent;
  double expected;  // op(children)
  double actual;    // I(parent)
};

struct CoherenceReport {
  std::vector<CoherenceViolation> violations;
  /// Parents that could not be checked because they or a child lack an importance.
  std::vector<NodeId> unevaluable;
  /// Violating parents still violating once every violating descendant is replaced by the value
  /// its own children imply. A single corrupted node shows up here alone, while its parent's
  /// knock-on violation does not.
  std::set<NodeId> root_causes;

  bool coherent() const noexcept { return violations.empty(); }
};

CoherenceReport check_coherence(const ValueTaxonomy& taxonomy,
                                const AggregationOperator& op = mean_operator(),
                                const Tolerance& tolerance = {});

}  // namespace valuetax

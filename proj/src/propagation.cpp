#include "valuetax/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

namespace valuetax {

bool Tolerance::equal(double a, double b) const {
  double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= std::max(absolute, relative * scale);
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

class Propagator {
 public:
  Propagator(const ValueTaxonomy& t, const Tolerance& tol) : t_(t), tol_(tol) {
    for (const auto& [id, imp] : t.importance()) value_.emplace(id, imp.value());
  }

  PropagationResult run() {
    const auto root_set = roots(t_);
    const std::size_t bound = t_.size() + 1;
    std::size_t iterations = 0;
    bool changed = true;
    while (changed) {
      ++iterations;
      changed_ = false;
      visited_.clear();
      for (const auto& r : root_set) visit(r);
      changed = changed_;
      if (iterations > bound) {
        // Unreachable: every productive pass assigns at least one of the finitely many nodes.
        throw Error("propagation exceeded " + std::to_string(bound) + " passes");
      }
    }

    TaxonomyBuilder b(t_);
    for (const auto& a : assigned_) b.set_importance(a.node, a.value);
    return {b.build(), std::move(assigned_), iterations};
  }

 private:
  bool is_set(const NodeId& n) const { return value_.contains(n); }
  double val(const NodeId& n) const { return value_.at(n); }

  // True if any strict descendant of any node in `nodes` carries an importance.
  bool has_set_descendant(const std::vector<NodeId>& nodes) const {
    std::vector<NodeId> stack;
    std::set<NodeId> seen;
    for (const auto& n : nodes) {
      for (const auto& c : t_.children_of(n)) stack.push_back(c);
    }
    while (!stack.empty()) {
      NodeId n = std::move(stack.back());
      stack.pop_back();
      if (!seen.insert(n).second) continue;
      if (is_set(n)) return true;
      for (const auto& c : t_.children_of(n)) stack.push_back(c);
    }
    return false;
  }

  void assign(const NodeId& n, double v) {
    if (v < Importance::kMin - tol_.absolute || v > Importance::kMax + tol_.absolute ||
        !std::isfinite(v)) {
      throw RangeViolation("derived importance " + fmt(v) + " for '" + n.str() +
                               "' falls outside [-1, 1]",
                           n, assigned_);
    }
    v = std::clamp(v, Importance::kMin, Importance::kMax);
    value_.emplace(n, v);
    assigned_.push_back({n, v});
    changed_ = true;
  }

  [[noreturn]] void incoherent(const NodeId& n, double expected) {
    bool derived_here = !t_.importance().contains(n);
    if (derived_here && t_.parents_of(n).size() > 1) {
      throw ConflictingAssignment("shared node '" + n.str() + "' was assigned " + fmt(val(n)) +
                                      " but its children imply " + fmt(expected),
                                  n, assigned_);
    }
    for (const auto& c : t_.children_of(n)) {
      if (!t_.importance().contains(c) && t_.parents_of(c).size() > 1) {
        throw ConflictingAssignment("shared node '" + c.str() + "' was assigned " +
                                        fmt(val(c)) + " through another parent, which leaves '" +
                                        n.str() + "' incoherent",
                                    c, assigned_);
      }
    }
    throw IncoherentInput("importance " + fmt(val(n)) + " of '" + n.str() +
                              "' differs from the mean of its children " + fmt(expected),
                          n, assigned_);
  }

  void visit(const NodeId& n) {
    if (!visited_.insert(n).second) return;

    const auto& kids = t_.children_of(n);
    std::vector<NodeId> unset;
    std::vector<double> set_values;
    for (const auto& c : kids) {
      if (is_set(c)) {
        set_values.push_back(val(c));
      } else {
        unset.push_back(c);
      }
    }
    const double arity = static_cast<double>(kids.size());

    if (kids.empty()) {
      // nothing to propagate
    } else if (is_set(n)) {
      if (unset.empty()) {
        double expected = mean_aggregate(set_values);
        if (!tol_.equal(val(n), expected)) incoherent(n, expected);
      } else if (unset.size() == 1) {
        assign(unset.front(), invert_mean(val(n), set_values));
      } else if (!has_set_descendant(unset)) {
        double known = 0.0;
        for (double v : set_values) known += v;
        double share = (val(n) * arity - known) / static_cast<double>(unset.size());
        for (const auto& c : unset) assign(c, share);
      }
    } else {
      if (unset.empty()) {
        assign(n, mean_aggregate(set_values));
      } else if (!set_values.empty() && !has_set_descendant(unset)) {
        double m = mean_aggregate(set_values);
        assign(n, m);
        for (const auto& c : unset) assign(c, m);
      }
    }

    for (const auto& c : kids) visit(c);
  }

  const ValueTaxonomy& t_;
  Tolerance tol_;
  std::map<NodeId, double> value_;
  std::vector<Assignment> assigned_;
  std::set<NodeId> visited_;
  bool changed_ = false;
};

}  // namespace

PropagationResult propagate(const ValueTaxonomy& taxonomy, const Tolerance& tolerance) {
  require_valid(taxonomy);
  return Propagator(taxonomy, tolerance).run();
}

CoherenceReport check_coherence(const ValueTaxonomy& t, const AggregationOperator& op,
                                const Tolerance& tolerance) {
  require_valid(t);
  CoherenceReport report;
  std::set<NodeId> violating;

  for (const auto& [id, _] : t.nodes()) {
    const auto& kids = t.children_of(id);
    if (kids.empty()) continue;
    auto own = t.importance_of(id);
    std::vector<double> values;
    bool complete = own.has_value();
    for (const auto& c : kids) {
      auto v = t.importance_of(c);
      if (!v) complete = false;
      else values.push_back(*v);
    }
    if (!complete) {
      report.unevaluable.push_back(id);
      continue;
    }
    double expected = op(values);
    if (!tolerance.equal(*own, expected)) {
      report.violations.push_back({id, expected, *own});
      violating.insert(id);
    }
  }
  if (violating.empty()) return report;

  // Children first; a violating node's stand-in value is whatever its (reconciled) children imply.
  std::map<NodeId, std::optional<double>> reconciled;
  auto order = topological_order(t);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId& n = *it;
    std::optional<double> own = t.importance_of(n);
    reconciled[n] = own;
    if (!violating.contains(n)) continue;
    std::vector<double> values;
    bool complete = true;
    for (const auto& c : t.children_of(n)) {
      const auto& r = reconciled.at(c);
      if (!r) {
        complete = false;
        break;
      }
      values.push_back(*r);
    }
    if (!complete) continue;
    double expected = op(values);
    if (!tolerance.equal(*own, expected)) {
      report.root_causes.insert(n);
      reconciled[n] = expected;
    }
  }
  return report;
}

}  // namespace valuetax

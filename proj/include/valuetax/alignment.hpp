#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "valuetax/context.hpp"
#include "valuetax/taxonomy.hpp"

namespace valuetax {

/// Degree in [-1, 1] to which `entity`'s behaviour satisfies the property at `node`.
/// Implementations throw MissingSatisfaction for properties they cannot assess.
using SatisfactionProvider = std::function<double(std::string_view entity, const NodeId& node)>;

enum class AlignmentScheme { MeanWeighted, PathWeighted };

std::string_view to_string(AlignmentScheme scheme);

struct PropertyContribution {
  NodeId node;
  double satisfaction;
  double importance;
  std::uint64_t paths;
  double contribution;  // importance * satisfaction, times paths for PathWeighted
};

struct AlignmentReport {
  std::string entity;
  AlignmentScheme scheme = AlignmentScheme::MeanWeighted;
  double score = 0.0;
  /// One entry per property node, in NodeId order.
  std::vector<PropertyContribution> per_property;
  /// Largest paths factor among the properties; PathWeighted scores lie within ±max_paths.
  std::uint64_t max_paths = 1;
};

/// Importance-weighted mean of satisfaction degrees over the taxonomy's property nodes.
AlignmentReport align(std::string_view entity, const ValueTaxonomy& taxonomy,
                      const SatisfactionProvider& sd,
                      AlignmentScheme scheme = AlignmentScheme::MeanWeighted);

/// Alignment against every property node of `general`, weighted by the context's own
/// importances (unlisted properties weigh 0). Unlike align() on a built context taxonomy this
/// keeps the detested, negatively weighted properties in the score.
AlignmentReport align_with_context(std::string_view entity, const ValueTaxonomy& general,
                                   const ContextSpec& ctx, const SatisfactionProvider& sd,
                                   AlignmentScheme scheme = AlignmentScheme::MeanWeighted);

struct Explanation {
  /// Contributions by descending magnitude, ties by NodeId.
  std::vector<PropertyContribution> terms;
  double sum = 0.0;
  double score = 0.0;
};

Explanation explain(const AlignmentReport& report);

}  // namespace valuetax

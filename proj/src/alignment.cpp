#include "valuetax/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace valuetax {

std::string_view to_string(AlignmentScheme scheme) {
  switch (scheme) {
    case AlignmentScheme::MeanWeighted: return "mean";
    case AlignmentScheme::PathWeighted: return "path";
  }
  return "?";
}

namespace {

double checked_sd(const SatisfactionProvider& sd, std::string_view entity, const NodeId& p) {
  double v = sd(entity, p);
  if (!(v >= -1.0 && v <= 1.0)) {
    throw Error("satisfaction degree " + std::to_string(v) + " for '" + p.str() +
                "' outside [-1, 1]");
  }
  return v;
}

// importance_for(p) returns the weight of property node p.
template <class ImportanceFor>
AlignmentReport score(std::string_view entity, const ValueTaxonomy& taxonomy,
                      const SatisfactionProvider& sd, AlignmentScheme scheme,
                      ImportanceFor importance_for) {
  require_valid(taxonomy);
  auto properties = taxonomy.property_nodes();
  if (properties.empty()) throw NoPropertyNodes();

  auto paths = all_paths_counts(taxonomy);
  AlignmentReport report;
  report.entity = std::string(entity);
  report.scheme = scheme;
  report.max_paths = 0;

  double total = 0.0;
  for (const auto& p : properties) {
    double importance = importance_for(p);
    double s = checked_sd(sd, entity, p);
    std::uint64_t n_paths = paths.at(p);
    double factor = scheme == AlignmentScheme::PathWeighted ? static_cast<double>(n_paths) : 1.0;
    double contribution = factor * importance * s;
    total += contribution;
    report.max_paths = std::max(report.max_paths, n_paths);
    report.per_property.push_back({p, s, importance, n_paths, contribution});
  }
  report.score = total / static_cast<double>(properties.size());
  return report;
}

}  // namespace

AlignmentReport align(std::string_view entity, const ValueTaxonomy& taxonomy,
                      const SatisfactionProvider& sd, AlignmentScheme scheme) {
  return score(entity, taxonomy, sd, scheme, [&](const NodeId& p) {
    auto v = taxonomy.importance_of(p);
    if (!v) throw MissingImportance(p.str());
    return *v;
  });
}

AlignmentReport align_with_context(std::string_view entity, const ValueTaxonomy& general,
                                   const ContextSpec& ctx, const SatisfactionProvider& sd,
                                   AlignmentScheme scheme) {
  return score(entity, general, sd, scheme,
               [&](const NodeId& p) { return ctx.importance_of(p); });
}

Explanation explain(const AlignmentReport& report) {
  Explanation out;
  out.terms = report.per_property;
  std::sort(out.terms.begin(), out.terms.end(),
            [](const PropertyContribution& a, const PropertyContribution& b) {
              double ma = std::abs(a.contribution);
              double mb = std::abs(b.contribution);
              if (ma != mb) return ma > mb;
              return a.node < b.node;
            });
  for (const auto& t : out.terms) out.sum += t.contribution;
  out.score = report.score;
  return out;
}

}  // namespace valuetax

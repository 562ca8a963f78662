#include "valuetax/mutual_aid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace valuetax::mutual_aid {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Request: return "request";
    case EventKind::Offer: return "offer";
    case EventKind::VolunteerChosen: return "volunteer_chosen";
    case EventKind::TaskAssigned: return "task_assigned";
  }
  return "?";
}

std::uint64_t CommunityState::total_tasks() const {
  std::uint64_t n = 0;
  for (const auto& [_, c] : task_distribution) n += c;
  return n;
}

MemberCounters CommunityState::totals() const {
  MemberCounters t;
  for (const auto& [_, c] : members) {
    t.requests += c.requests;
    t.offers += c.offers;
    t.volunteering += c.volunteering;
  }
  return t;
}

void DomainConfig::check() const {
  if (!(max_ratio > 1.0)) throw InvalidConfig("max_ratio must exceed 1");
  if (!(epsilon > 0.0)) throw InvalidConfig("epsilon must be positive");
  if (!(max_delta > epsilon)) throw InvalidConfig("max_delta must exceed epsilon");
}

CommunityState ingest(std::span<const Event> log) {
  CommunityState s;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const Event& e = log[i];
    if (e.member.empty()) throw MalformedEvent(i, "event without a member");
    auto& m = s.members[e.member];
    switch (e.kind) {
      case EventKind::Request: ++m.requests; break;
      case EventKind::Offer: ++m.offers; break;
      case EventKind::VolunteerChosen:
        ++m.volunteering;
        s.task_distribution.try_emplace(e.member, 0);
        break;
      case EventKind::TaskAssigned: ++s.task_distribution[e.member]; break;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------

double request_ratio(std::uint64_t requests, std::uint64_t denominator, const DomainConfig& cfg) {
  if (denominator == 0) {
    if (requests == 0) return 1.0;
    if (cfg.saturate_undefined_ratio) return cfg.max_ratio;
    throw UndefinedRatio(std::to_string(requests) + " requests against a zero denominator");
  }
  return static_cast<double>(requests) / static_cast<double>(denominator);
}

double sd_from_ratio(double ratio, const DomainConfig& cfg) {
  cfg.check();
  double r = std::clamp(ratio, 0.0, cfg.max_ratio);
  if (r > 1.0) return (r - 1.0) / (cfg.max_ratio - 1.0);
  return r - 1.0;
}

double sd_from_difference(double delta, const DomainConfig& cfg) {
  cfg.check();
  double d = std::clamp(delta, 0.0, cfg.max_delta);
  if (d < cfg.epsilon) return 1.0 - d / cfg.epsilon;
  // Negated so that max_delta lands on -1.
  return -(d - cfg.epsilon) / (cfg.max_delta - cfg.epsilon);
}

namespace {

MemberCounters counters_of(const CommunityState& state, std::string_view member) {
  auto it = state.members.find(std::string(member));
  return it == state.members.end() ? MemberCounters{} : it->second;
}

std::vector<double> normalized(std::span<const double> counts) {
  if (counts.empty()) throw EmptyDistribution("empty distribution");
  double total = 0.0;
  for (double c : counts) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw SupportMismatch("distribution entries must be finite and non-negative");
    }
    total += c;
  }
  if (!(total > 0.0)) throw EmptyDistribution("distribution has zero mass");
  std::vector<double> out(counts.begin(), counts.end());
  for (double& v : out) v /= total;
  return out;
}

void require_same_support(std::span<const double> d, std::span<const double> u) {
  if (d.size() != u.size()) {
    throw SupportMismatch("supports differ in size: " + std::to_string(d.size()) + " vs " +
                          std::to_string(u.size()));
  }
}

}  // namespace

double sd_p1(const CommunityState& state, std::string_view member, const DomainConfig& cfg) {
  auto c = counters_of(state, member);
  return sd_from_ratio(request_ratio(c.requests, c.offers, cfg), cfg);
}

double sd_p2(const CommunityState& state, std::string_view member, const DomainConfig& cfg) {
  auto c = counters_of(state, member);
  return sd_from_ratio(request_ratio(c.requests, c.volunteering, cfg), cfg);
}

double kl_divergence(std::span<const double> d, std::span<const double> u) {
  require_same_support(d, u);
  auto p = normalized(d);
  auto q = normalized(u);
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) throw SupportMismatch("reference distribution is zero where data is not");
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(0.0, kl);
}

double emd_1d(std::span<const double> d, std::span<const double> u) {
  require_same_support(d, u);
  auto p = normalized(d);
  auto q = normalized(u);
  double cdf_p = 0.0, cdf_q = 0.0, total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    cdf_p += p[i];
    cdf_q += q[i];
    total += std::abs(cdf_p - cdf_q);
  }
  return total;
}

double task_difference(const CommunityState& state, const DomainConfig& cfg) {
  if (state.task_distribution.empty() || state.total_tasks() == 0) {
    throw EmptyDistribution("no tasks have been assigned");
  }
  std::vector<double> d;
  for (const auto& [_, n] : state.task_distribution) d.push_back(static_cast<double>(n));
  std::vector<double> u(d.size(), 1.0);
  return cfg.measure == DifferenceMeasure::KLDivergence ? kl_divergence(d, u) : emd_1d(d, u);
}

double sd_p3(const CommunityState& state, const DomainConfig& cfg) {
  return sd_from_difference(task_difference(state, cfg), cfg);
}

// ---------------------------------------------------------------------------

namespace {

template <class HasEvidence, class Sd>
double member_mean(const CommunityState& state, HasEvidence has_evidence, Sd sd) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& [id, c] : state.members) {
    if (!has_evidence(c)) continue;
    sum += sd(id);
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace

SatisfactionProvider community_sd_provider(CommunityState state, DomainConfig cfg) {
  cfg.check();
  return [state = std::move(state), cfg](std::string_view entity, const NodeId& node) -> double {
    const std::string& p = node.str();
    bool single = cfg.aggregation == MemberAggregation::SingleEntity;
    if (p == kP1) {
      if (single) return sd_p1(state, entity, cfg);
      return member_mean(
          state, [](const MemberCounters& c) { return c.requests + c.offers > 0; },
          [&](const std::string& m) { return sd_p1(state, m, cfg); });
    }
    if (p == kP2) {
      if (single) return sd_p2(state, entity, cfg);
      return member_mean(
          state, [](const MemberCounters& c) { return c.requests + c.volunteering > 0; },
          [&](const std::string& m) { return sd_p2(state, m, cfg); });
    }
    if (p == kP3) return sd_p3(state, cfg);
    throw MissingSatisfaction(p);
  };
}

EvaluatorRegistry<CommunityState> community_evaluators(DomainConfig cfg) {
  cfg.check();
  EvaluatorRegistry<CommunityState> reg;
  reg.emplace(std::string(kP1), [cfg](const CommunityState& s) {
    auto t = s.totals();
    return request_ratio(t.requests, t.offers, cfg) > 1.0;
  });
  reg.emplace(std::string(kP2), [cfg](const CommunityState& s) {
    auto t = s.totals();
    return request_ratio(t.requests, t.volunteering, cfg) > 1.0;
  });
  reg.emplace(std::string(kP3), [cfg](const CommunityState& s) {
    return task_difference(s, cfg) < cfg.epsilon;
  });
  return reg;
}

ValueTaxonomy fairness_taxonomy() {
  TaxonomyBuilder b;
  b.add_label("fairness", "fairness")
      .add_label("reciprocity", "reciprocity")
      .add_label("equal_treatment", "equal treatment")
      .add_label("balanced_give_take", "balanced give & take")
      .add_label("equal_division", "equal division of workload")
      .add_label("equal_pay", "equal pay")
      .add_property("p1", std::string(kP1))
      .add_property("p2", std::string(kP2))
      .add_property("p3", std::string(kP3));
  b.add_edge("fairness", "reciprocity")
      .add_edge("fairness", "equal_treatment")
      .add_edge("reciprocity", "balanced_give_take")
      .add_edge("balanced_give_take", "p1")
      .add_edge("balanced_give_take", "p2")
      .add_edge("equal_treatment", "equal_division")
      .add_edge("equal_treatment", "equal_pay")
      .add_edge("equal_division", "p3");
  return b.build();
}

}  // namespace valuetax::mutual_aid

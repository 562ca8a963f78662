#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "valuetax/alignment.hpp"
#include "valuetax/context.hpp"
#include "valuetax/taxonomy.hpp"

/// The mutual-aid community running example: fairness understood as reciprocity (balanced
/// give & take, properties p1 and p2) and equal treatment (equal division of workload, p3).
namespace valuetax::mutual_aid {

enum class EventKind { Request, Offer, VolunteerChosen, TaskAssigned };

std::string_view to_string(EventKind kind);

struct Event {
  EventKind kind;
  std::string member;
  std::uint64_t timestamp = 0;
};

struct MemberCounters {
  std::uint64_t requests = 0;
  std::uint64_t offers = 0;
  std::uint64_t volunteering = 0;  // times chosen as volunteer

  friend bool operator==(const MemberCounters&, const MemberCounters&) = default;
};

struct CommunityState {
  std::map<std::string, MemberCounters> members;
  /// Tasks per volunteer. Volunteers chosen but never assigned a task appear with 0.
  std::map<std::string, std::uint64_t> task_distribution;

  std::uint64_t total_tasks() const;
  MemberCounters totals() const;

  friend bool operator==(const CommunityState&, const CommunityState&) = default;
};

enum class DifferenceMeasure { KLDivergence, EarthMovers1D };
enum class MemberAggregation { MeanOverMembers, SingleEntity };

struct DomainConfig {
  double max_ratio = 5.0;
  double epsilon = 0.1;
  double max_delta = 1.0;
  DifferenceMeasure measure = DifferenceMeasure::EarthMovers1D;
  MemberAggregation aggregation = MemberAggregation::MeanOverMembers;
  /// requests > 0 with a zero denominator saturates the ratio at max_ratio instead of throwing.
  bool saturate_undefined_ratio = false;

  /// Throws InvalidConfig unless max_ratio > 1 and max_delta > epsilon > 0.
  void check() const;
};

/// Counts events per member and kind. Throws MalformedEvent(index) for an empty member id.
CommunityState ingest(std::span<const Event> log);

// ---------------------------------------------------------------------------
// Satisfaction degrees

/// requests / denominator, with 0/0 read as 1 (no evidence either way).
double request_ratio(std::uint64_t requests, std::uint64_t denominator, const DomainConfig& cfg);

/// Maps a ratio R, clamped to [0, max_ratio], to [-1, 1]: 0 -> -1, 1 -> 0, max_ratio -> 1.
double sd_from_ratio(double ratio, const DomainConfig& cfg);

/// Maps a distribution difference, clamped to [0, max_delta], to [-1, 1]: 0 -> 1,
/// epsilon -> 0, max_delta -> -1.
double sd_from_difference(double delta, const DomainConfig& cfg);

/// Requests proportionate to offers, for one member.
double sd_p1(const CommunityState& state, std::string_view member, const DomainConfig& cfg);
/// Requests proportionate to times chosen as volunteer, for one member.
double sd_p2(const CommunityState& state, std::string_view member, const DomainConfig& cfg);
/// Tasks spread evenly over volunteers. Throws EmptyDistribution without any assigned task.
double sd_p3(const CommunityState& state, const DomainConfig& cfg);

// ---------------------------------------------------------------------------
// Distribution differences. Inputs are raw non-negative counts, normalized internally.

/// Σ d_i ln(d_i / u_i), with 0 ln 0 = 0. Throws SupportMismatch on size mismatch or when
/// u_i = 0 < d_i.
double kl_divergence(std::span<const double> d, std::span<const double> u);

/// Σ_k |CDF_d(k) - CDF_u(k)| over the ordered support (unit ground distance).
double emd_1d(std::span<const double> d, std::span<const double> u);

/// difference(D, U) for the state's task distribution against the uniform one.
double task_difference(const CommunityState& state, const DomainConfig& cfg);

// ---------------------------------------------------------------------------

/// Property ids of the example catalog; the fixture taxonomy uses them as node ids too.
inline constexpr std::string_view kP1 = "p1";
inline constexpr std::string_view kP2 = "p2";
inline constexpr std::string_view kP3 = "p3";

/// Satisfaction provider for the example properties. Node ids are read as property ids, as in
/// fairness_taxonomy(); any other node raises MissingSatisfaction. p1/p2 are per-member:
/// MeanOverMembers averages over members with any evidence (a request or an offer for p1, a
/// request or a volunteering for p2), SingleEntity reads the member named by the entity.
/// p3 is community-wide.
SatisfactionProvider community_sd_provider(CommunityState state, DomainConfig cfg);

/// Boolean property evaluators over community totals: p1 and p2 hold when the ratio exceeds 1,
/// p3 when the task difference is below epsilon.
EvaluatorRegistry<CommunityState> community_evaluators(DomainConfig cfg);

/// The general fairness taxonomy (no importances).
ValueTaxonomy fairness_taxonomy();

}  // namespace valuetax::mutual_aid

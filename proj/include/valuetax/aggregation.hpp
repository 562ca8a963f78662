#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "valuetax/error.hpp"

namespace valuetax {

/// Combines the importances of a parent's children into the parent's importance.
struct AggregationOperator {
  using Apply = std::function<double(std::span<const double>)>;
  /// Solves for the one unknown child given the parent value and the known siblings.
  using Invert = std::function<double(double parent, std::span<const double> known)>;

  std::string name;
  Apply apply;
  Invert invert_for_mean;  // empty unless the operator supports exact down-propagation

  double operator()(std::span<const double> values) const { return apply(values); }
  bool invertible() const noexcept { return static_cast<bool>(invert_for_mean); }
};

/// Arithmetic mean. Throws EmptyInput on an empty tuple.
double mean_aggregate(std::span<const double> values);

/// Child value c such that mean(known ∪ {c}) == parent.
double invert_mean(double parent, std::span<const double> known);

const AggregationOperator& mean_operator();

// ---------------------------------------------------------------------------
// Law checking

enum class Law { Symmetry, Idempotence, Monotonicity, CompensativeBounds };

std::string_view to_string(Law law);

struct Counterexample {
  std::vector<double> input;
  std::vector<double> other;  // permutation, or the dominating tuple for monotonicity
  double value = 0.0;
  double other_value = 0.0;
};

struct LawReport {
  Law law;
  bool passed = true;
  std::size_t trials = 0;
  std::optional<Counterexample> counterexample;
};

inline constexpr double kLawTolerance = 1e-12;

/// Random importance tuples for law checks: lengths in [min_length, max_length], values uniform
/// in [-1, 1] with the endpoints mixed in so boundary cases are always exercised.
class TupleSampler {
 public:
  explicit TupleSampler(std::uint64_t seed = 0x5eed, std::size_t min_length = 1,
                        std::size_t max_length = 8);

  double value();
  std::vector<double> tuple();
  /// A pair (lo, hi) of equal length with lo[i] <= hi[i] for every i.
  std::pair<std::vector<double>, std::vector<double>> ordered_pair();
  std::vector<double> permutation_of(std::vector<double> values);

 private:
  std::mt19937_64 rng_;
  std::size_t min_length_;
  std::size_t max_length_;
};

inline constexpr std::size_t kDefaultTrials = 1000;

LawReport check_symmetry(const AggregationOperator& op, TupleSampler& samples,
                         std::size_t trials = kDefaultTrials);
LawReport check_idempotence(const AggregationOperator& op, TupleSampler& samples,
                            std::size_t trials = kDefaultTrials);
LawReport check_monotonicity(const AggregationOperator& op, TupleSampler& samples,
                             std::size_t trials = kDefaultTrials);
LawReport check_compensative_bounds(const AggregationOperator& op, TupleSampler& samples,
                                    std::size_t trials = kDefaultTrials);

/// All four checks, each with a fresh sampler seeded from `seed`.
std::vector<LawReport> check_all_laws(const AggregationOperator& op, std::uint64_t seed = 0x5eed,
                                      std::size_t trials = kDefaultTrials);

}  // namespace valuetax

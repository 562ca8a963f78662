#include "valuetax/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "valuetax/error.hpp"

namespace valuetax {

double mean_aggregate(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("mean of an empty tuple");
  double sum = std::accumulate(values.begin(), values.end(), 0.0);
  return sum / static_cast<double>(values.size());
}

double invert_mean(double parent, std::span<const double> known) {
  double sum = std::accumulate(known.begin(), known.end(), 0.0);
  return parent * static_cast<double>(known.size() + 1) - sum;
}

const AggregationOperator& mean_operator() {
  static const AggregationOperator kMean{"mean", mean_aggregate, invert_mean};
  return kMean;
}

std::string_view to_string(Law law) {
  switch (law) {
    case Law::Symmetry: return "symmetry";
    case Law::Idempotence: return "idempotence";
    case Law::Monotonicity: return "monotonicity";
    case Law::CompensativeBounds: return "compensative-bounds";
  }
  return "?";
}

// ---------------------------------------------------------------------------

TupleSampler::TupleSampler(std::uint64_t seed, std::size_t min_length, std::size_t max_length)
    : rng_(seed), min_length_(std::max<std::size_t>(1, min_length)),
      max_length_(std::max(std::max<std::size_t>(1, min_length), max_length)) {}

double TupleSampler::value() {
  // One draw in sixteen lands exactly on an endpoint.
  std::uniform_int_distribution<int> pick(0, 31);
  int k = pick(rng_);
  if (k == 0) return -1.0;
  if (k == 1) return 1.0;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return u(rng_);
}

std::vector<double> TupleSampler::tuple() {
  std::uniform_int_distribution<std::size_t> len(min_length_, max_length_);
  std::vector<double> out(len(rng_));
  for (auto& v : out) v = value();
  return out;
}

std::pair<std::vector<double>, std::vector<double>> TupleSampler::ordered_pair() {
  std::vector<double> lo = tuple();
  std::vector<double> hi(lo.size());
  std::uniform_int_distribution<int> keep(0, 7);
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (keep(rng_) == 0) {
      hi[i] = lo[i];
    } else {
      std::uniform_real_distribution<double> up(lo[i], 1.0);
      hi[i] = lo[i] < 1.0 ? up(rng_) : 1.0;
    }
  }
  return {std::move(lo), std::move(hi)};
}

std::vector<double> TupleSampler::permutation_of(std::vector<double> values) {
  std::shuffle(values.begin(), values.end(), rng_);
  return values;
}

// ---------------------------------------------------------------------------

namespace {

LawReport fail(Law law, std::size_t trials, Counterexample cx) {
  return LawReport{law, false, trials, std::move(cx)};
}

}  // namespace

LawReport check_symmetry(const AggregationOperator& op, TupleSampler& samples,
                         std::size_t trials) {
  for (std::size_t t = 0; t < trials; ++t) {
    auto lambda = samples.tuple();
    auto pi = samples.permutation_of(lambda);
    double a = op(lambda);
    double b = op(pi);
    if (!(std::abs(a - b) <= kLawTolerance)) {
      return fail(Law::Symmetry, t + 1, {std::move(lambda), std::move(pi), a, b});
    }
  }
  return {Law::Symmetry, true, trials, std::nullopt};
}

LawReport check_idempotence(const AggregationOperator& op, TupleSampler& samples,
                            std::size_t trials) {
  // The endpoints and zero are checked on top of the sampled values.
  std::vector<double> fixed = {-1.0, 0.0, 1.0};
  for (std::size_t t = 0; t < trials + fixed.size(); ++t) {
    auto shape = samples.tuple();
    double i = t < fixed.size() ? fixed[t] : samples.value();
    std::vector<double> repeated(shape.size(), i);
    double a = op(repeated);
    if (!(std::abs(a - i) <= kLawTolerance)) {
      return fail(Law::Idempotence, t + 1, {std::move(repeated), {i}, a, i});
    }
  }
  return {Law::Idempotence, true, trials + fixed.size(), std::nullopt};
}

LawReport check_monotonicity(const AggregationOperator& op, TupleSampler& samples,
                             std::size_t trials) {
  for (std::size_t t = 0; t < trials; ++t) {
    auto [lo, hi] = samples.ordered_pair();
    double a = op(lo);
    double b = op(hi);
    if (!(a <= b + kLawTolerance)) {
      return fail(Law::Monotonicity, t + 1, {std::move(lo), std::move(hi), a, b});
    }
  }
  return {Law::Monotonicity, true, trials, std::nullopt};
}

LawReport check_compensative_bounds(const AggregationOperator& op, TupleSampler& samples,
                                    std::size_t trials) {
  for (std::size_t t = 0; t < trials; ++t) {
    auto lambda = samples.tuple();
    auto [mn, mx] = std::minmax_element(lambda.begin(), lambda.end());
    double lo = *mn;
    double hi = *mx;
    double a = op(lambda);
    if (!(lo - kLawTolerance <= a && a <= hi + kLawTolerance)) {
      return fail(Law::CompensativeBounds, t + 1, {std::move(lambda), {lo, hi}, a, a < lo ? lo : hi});
    }
  }
  return {Law::CompensativeBounds, true, trials, std::nullopt};
}

std::vector<LawReport> check_all_laws(const AggregationOperator& op, std::uint64_t seed,
                                      std::size_t trials) {
  std::vector<LawReport> out;
  TupleSampler s1(seed), s2(seed + 1), s3(seed + 2), s4(seed + 3);
  out.push_back(check_symmetry(op, s1, trials));
  out.push_back(check_idempotence(op, s2, trials));
  out.push_back(check_monotonicity(op, s3, trials));
  out.push_back(check_compensative_bounds(op, s4, trials));
  return out;
}

}  // namespace valuetax

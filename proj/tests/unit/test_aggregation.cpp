#include <cmath>
#include <vector>

#include "catch_amalgamated.hpp"
#include "valuetax/aggregation.hpp"

using namespace valuetax;

namespace {

AggregationOperator planted(std::string name, AggregationOperator::Apply f) {
  return AggregationOperator{std::move(name), std::move(f), {}};
}

const LawReport& find(const std::vector<LawReport>& rs, Law law) {
  for (const auto& r : rs) {
    if (r.law == law) return r;
  }
  throw std::logic_error("law missing");
}

}  // namespace

TEST_CASE("mean of the worked pair") {
  std::vector<double> v{0.8, 0.7};
  CHECK(mean_aggregate(v) == Catch::Approx(0.75).margin(1e-15));
  CHECK(mean_operator()(v) == Catch::Approx(0.75).margin(1e-15));
  CHECK_THROWS_AS(mean_aggregate(std::vector<double>{}), EmptyInput);
}

TEST_CASE("invert_mean recovers the missing child") {
  TupleSampler s(3);
  for (int i = 0; i < 200; ++i) {
    auto known = s.tuple();
    double missing = s.value();
    auto all = known;
    all.push_back(missing);
    double parent = mean_aggregate(all);
    CHECK(invert_mean(parent, known) == Catch::Approx(missing).margin(1e-12));
  }
  CHECK(mean_operator().invertible());
}

TEST_CASE("mean satisfies every averaging law") {
  for (const auto& r : check_all_laws(mean_operator(), 99)) {
    INFO(to_string(r.law));
    CHECK(r.passed);
    CHECK_FALSE(r.counterexample);
    CHECK(r.trials >= kDefaultTrials);
  }
}

TEST_CASE("sampler keeps ordered pairs ordered and tuples in range") {
  TupleSampler s(5, 2, 4);
  for (int i = 0; i < 500; ++i) {
    auto t = s.tuple();
    CHECK(t.size() >= 2);
    CHECK(t.size() <= 4);
    for (double x : t) CHECK(std::fabs(x) <= 1.0);
    auto [lo, hi] = s.ordered_pair();
    REQUIRE(lo.size() == hi.size());
    for (std::size_t k = 0; k < lo.size(); ++k) CHECK(lo[k] <= hi[k]);
  }
}

TEST_CASE("first-element operator breaks symmetry") {
  auto first = planted("first", [](std::span<const double> v) { return v.front(); });
  auto reports = check_all_laws(first, 1);
  const auto& sym = find(reports, Law::Symmetry);
  CHECK_FALSE(sym.passed);
  REQUIRE(sym.counterexample);
  CHECK(sym.counterexample->value != sym.counterexample->other_value);
  // Still idempotent, monotone and bounded.
  CHECK(find(reports, Law::Idempotence).passed);
  CHECK(find(reports, Law::Monotonicity).passed);
  CHECK(find(reports, Law::CompensativeBounds).passed);
}

TEST_CASE("sum breaks idempotence and the bounds") {
  auto sum = planted("sum", [](std::span<const double> v) {
    double s = 0;
    for (double x : v) s += x;
    return s;
  });
  auto reports = check_all_laws(sum, 2);
  CHECK_FALSE(find(reports, Law::Idempotence).passed);
  CHECK(find(reports, Law::Idempotence).counterexample);
  CHECK_FALSE(find(reports, Law::CompensativeBounds).passed);
  CHECK(find(reports, Law::Symmetry).passed);
}

TEST_CASE("negated mean breaks monotonicity") {
  auto neg = planted("negated-mean", [](std::span<const double> v) { return -mean_aggregate(v); });
  TupleSampler s(4);
  auto r = check_monotonicity(neg, s);
  CHECK_FALSE(r.passed);
  REQUIRE(r.counterexample);
  CHECK(r.counterexample->value > r.counterexample->other_value);
}

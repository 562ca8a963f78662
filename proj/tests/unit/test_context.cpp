#include <random>

#include "catch_amalgamated.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "valuetax/context.hpp"
#include "valuetax/mutual_aid.hpp"
#include "valuetax/propagation.hpp"

using namespace valuetax;

namespace {

ContextSpec make_context(std::map<std::string, double> imp,
                 SelectionStrategy s = SelectionStrategy::positive()) {
  ContextSpec c;
  c.id = "test";
  for (const auto& [k, v] : imp) c.property_importance.emplace(k, Importance(v));
  c.selection = s;
  return c;
}

std::set<NodeId> ids(const ValueTaxonomy& t) {
  std::set<NodeId> out;
  for (const auto& [id, n] : t.nodes()) out.insert(id);
  return out;
}

}  // namespace

TEST_CASE("context c keeps the two prominent branches") {
  auto general = mutual_aid::fairness_taxonomy();
  auto built = build_context_taxonomy(general, make_context({{"p1", 0.8}, {"p2", 0.0}, {"p3", 0.7}}));
  CHECK(ids(built.taxonomy) == std::set<NodeId>{"fairness", "reciprocity", "balanced_give_take",
                                                "p1", "equal_treatment", "equal_division", "p3"});
  CHECK(built.selected == std::set<NodeId>{"p1", "p3"});
  CHECK(*built.taxonomy.importance_of("fairness") == Catch::Approx(0.75).margin(1e-12));
  CHECK_FALSE(built.empty_selection);
}

TEST_CASE("context c' is a single chain at 0.9") {
  auto built = build_context_taxonomy(mutual_aid::fairness_taxonomy(),
                                      make_context({{"p1", -0.5}, {"p2", -0.5}, {"p3", 0.9}}));
  CHECK(ids(built.taxonomy) ==
        std::set<NodeId>{"fairness", "equal_treatment", "equal_division", "p3"});
  CHECK(built.taxonomy.edges().size() == 3);
  for (const auto& [id, v] : built.taxonomy.importance()) CHECK(v.value() == Catch::Approx(0.9));
}

TEST_CASE("nothing positive gives an empty taxonomy and a warning flag") {
  auto built = build_context_taxonomy(mutual_aid::fairness_taxonomy(),
                                      make_context({{"p1", -0.2}, {"p2", 0.0}}));
  CHECK(built.empty_selection);
  CHECK(built.taxonomy.empty());
}

TEST_CASE("context keys must be property nodes") {
  auto general = mutual_aid::fairness_taxonomy();
  CHECK_THROWS_AS(build_context_taxonomy(general, make_context({{"fairness", 0.5}})), InvalidContext);
  CHECK_THROWS_AS(build_context_taxonomy(general, make_context({{"p9", 0.5}})), InvalidContext);
  auto bad = TaxonomyBuilder().add_label("a", "A").add_edge("a", "a").build();
  CHECK_THROWS_AS(build_context_taxonomy(bad, make_context({})), InvalidTaxonomy);
}

TEST_CASE("selection examples") {
  std::map<NodeId, double> c{{"p1", 0.8}, {"p2", 0.0}, {"p3", 0.7}};
  CHECK(select_nodes(c, SelectionStrategy::positive()) == std::set<NodeId>{"p1", "p3"});
  CHECK(select_nodes(c, SelectionStrategy::kmeans_two()) == std::set<NodeId>{"p1", "p3"});
  CHECK(select_nodes(c, SelectionStrategy::positive(0.75)) == std::set<NodeId>{"p1"});

  std::map<NodeId, double> same{{"a", 0.3}, {"b", 0.3}, {"c", 0.3}};
  CHECK(select_nodes(same, SelectionStrategy::kmeans_two()) == std::set<NodeId>{"a", "b", "c"});
  CHECK_THROWS_AS(select_nodes({}, SelectionStrategy::kmeans_two()), EmptyInput);
  CHECK(select_nodes({}, SelectionStrategy::positive()).empty());
  CHECK_THROWS(SelectionStrategy::positive(1.5));
}

TEST_CASE("k-means split matches exhaustive search") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    std::map<NodeId, double> v;
    std::size_t n = vt_test::pick(rng, 1, 10);
    for (std::size_t i = 0; i < n; ++i) v[vt_test::padded('P', i)] = vt_test::uniform(rng);
    CHECK(select_nodes(v, SelectionStrategy::kmeans_two()) == vt_test::kmeans_two_oracle(v));
  }
}

TEST_CASE("raising the threshold never adds nodes") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<NodeId, double> v;
    for (std::size_t i = 0; i < 8; ++i) v[vt_test::padded('P', i)] = vt_test::uniform(rng);
    double lo = vt_test::uniform(rng);
    double hi = vt_test::uniform(rng, lo, 1.0);
    auto a = select_nodes(v, SelectionStrategy::positive(lo));
    auto b = select_nodes(v, SelectionStrategy::positive(hi));
    CHECK(std::includes(a.begin(), a.end(), b.begin(), b.end()));
  }
}

TEST_CASE("built contexts are valid, closed, coherent and ignore general importances") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 150; ++trial) {
    auto general = vt_test::random_dag(rng, vt_test::pick(rng, 1, 6), vt_test::pick(rng, 1, 8));
    std::map<std::string, double> imp;
    for (const auto& p : general.property_nodes()) imp[p.str()] = vt_test::uniform(rng);
    auto ctx = make_context(imp, trial % 2 ? SelectionStrategy::kmeans_two() : SelectionStrategy::positive());

    ContextTaxonomy built;
    try {
      built = build_context_taxonomy(general, ctx);
    } catch (const PropagationError&) {
      continue;  // shared properties in a DAG can legitimately conflict
    }
    const auto& t = built.taxonomy;
    REQUIRE(validate(t).ok());
    CHECK(check_coherence(t).coherent());

    // Every kept node reaches a selected property.
    for (const auto& [id, n] : t.nodes()) {
      auto below = descendants(t, id);
      below.insert(id);
      bool hits = std::any_of(below.begin(), below.end(),
                              [&](const NodeId& d) { return built.selected.contains(d); });
      CHECK(hits);
    }
    // And every ancestor of a selected property is kept, with the general edges between them.
    for (const auto& s : built.selected) {
      for (const auto& a : ancestors(general, s)) CHECK(t.contains(a));
    }
    for (const auto& [p, c] : general.edges()) {
      CHECK(t.edges().contains({p, c}) == (t.contains(p) && t.contains(c)));
    }

    auto noisy = vt_test::with_random_importances(rng, general, 0.7);
    CHECK(build_context_taxonomy(noisy, ctx).taxonomy == t);
  }
}

TEST_CASE("context holds only when every defining property does") {
  EvaluatorRegistry<int> evals{{"even", [](const int& x) { return x % 2 == 0; }},
                               {"positive", [](const int& x) { return x > 0; }}};
  ContextSpec c;
  CHECK(context_holds(c, 3, evals));
  c.defining_properties = {"even", "positive"};
  CHECK(context_holds(c, 4, evals));
  CHECK_FALSE(context_holds(c, 3, evals));
  CHECK_FALSE(context_holds(c, -2, evals));
  c.defining_properties.insert("prime");
  CHECK_THROWS_AS(context_holds(c, 4, evals), MissingEvaluator);
}

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "generators.hpp"
#include "oracles.hpp"
#include "valuetax/aggregation.hpp"
#include "valuetax/alignment.hpp"
#include "valuetax/context.hpp"
#include "valuetax/io.hpp"
#include "valuetax/mutual_aid.hpp"
#include "valuetax/propagation.hpp"

using namespace valuetax;
namespace ma = valuetax::mutual_aid;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void criterion(int n, const char* name, double budget_s, const std::function<Outcome()>& body) {
  auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_s > 0 && secs > budget_s) {
    o.require(false, "took " + std::to_string(secs) + " s, budget " + std::to_string(budget_s));
  }
  if (!o.ok) ++failures;
  std::printf("%s  %2d  %-44s %8.3f s  %s\n", o.ok ? "PASS" : "FAIL", n, name, secs,
              o.detail.c_str());
}

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ContextSpec context(std::map<std::string, double> imp,
                    SelectionStrategy s = SelectionStrategy::positive()) {
  ContextSpec c;
  c.id = "ctx";
  for (const auto& [k, v] : imp) c.property_importance.emplace(k, Importance(v));
  c.selection = s;
  return c;
}

SatisfactionProvider table(std::map<NodeId, double> values) {
  return [values = std::move(values)](std::string_view, const NodeId& n) {
    auto it = values.find(n);
    if (it == values.end()) throw MissingSatisfaction(n.str());
    return it->second;
  };
}

std::set<NodeId> node_set(const ValueTaxonomy& t) {
  std::set<NodeId> s;
  for (const auto& [id, n] : t.nodes()) s.insert(id);
  return s;
}

std::vector<NodeId> internal_nodes(const ValueTaxonomy& t) {
  std::vector<NodeId> out;
  for (const auto& [id, n] : t.nodes()) {
    if (!t.children_of(id).empty()) out.push_back(id);
  }
  return out;
}

// Random tree with leaves assigned uniformly in [-1, 1]; `leaf` receives the leaf values.
ValueTaxonomy random_leafed_tree(std::mt19937_64& rng, std::size_t max_nodes,
                                 std::map<NodeId, double>& leaf) {
  auto tree = vt_test::random_tree(rng, vt_test::pick(rng, 1, max_nodes));
  TaxonomyBuilder b(tree);
  for (const auto& [id, n] : tree.nodes()) {
    if (tree.children_of(id).empty()) {
      leaf[id] = vt_test::uniform(rng);
      b.set_importance(id, leaf[id]);
    }
  }
  return b.build();
}

}  // namespace

int main() {
  std::printf("valuetax acceptance suite\n");

  criterion(1, "golden alignment 0.475", 1.0, [] {
    Outcome o;
    auto t = TaxonomyBuilder()
                 .add_label("fairness", "fairness")
                 .add_label("reciprocity", "reciprocity")
                 .add_label("equal_treatment", "equal treatment")
                 .add_property("p1", "p1")
                 .add_property("p3", "p3")
                 .add_edge("fairness", "reciprocity")
                 .add_edge("fairness", "equal_treatment")
                 .add_edge("reciprocity", "p1")
                 .add_edge("equal_treatment", "p3")
                 .set_importance("p1", 1.0)
                 .set_importance("p3", 0.5)
                 .build();
    auto r = align("e", t, table({{"p1", 0.5}, {"p3", 0.9}}), AlignmentScheme::MeanWeighted);
    o.require(near(r.score, 0.475, 1e-12), "score " + num(r.score));
    o.detail = o.ok ? "score " + num(r.score) : o.detail;
    return o;
  });

  criterion(2, "context c: 7 nodes, root 0.75", 1.0, [] {
    Outcome o;
    auto general = ma::fairness_taxonomy();
    auto built = build_context_taxonomy(general, context({{"p1", 0.8}, {"p2", 0.0}, {"p3", 0.7}}));
    const auto& t = built.taxonomy;
    std::set<NodeId> want{"fairness", "reciprocity", "balanced_give_take", "p1",
                          "equal_treatment", "equal_division", "p3"};
    o.require(node_set(t) == want, "node set differs");
    auto oracle = vt_test::recursive_mean(t, {{"p1", 0.8}, {"p3", 0.7}});
    for (const auto& [id, v] : oracle) {
      auto got = t.importance_of(id);
      o.require(got && near(*got, v, 1e-9), "node " + id.str() + " differs from oracle");
    }
    double root = t.importance_of("fairness").value_or(NAN);
    o.require(near(root, 0.75, 1e-9), "root " + num(root));
    if (o.ok) o.detail = "root " + num(root);
    return o;
  });

  criterion(3, "context c': single 0.9 chain", 0, [] {
    Outcome o;
    auto built = build_context_taxonomy(ma::fairness_taxonomy(),
                                        context({{"p1", -0.5}, {"p2", -0.5}, {"p3", 0.9}}));
    const auto& t = built.taxonomy;
    o.require(node_set(t) == std::set<NodeId>{"fairness", "equal_treatment", "equal_division", "p3"},
              "node set differs");
    std::set<Edge> chain{{"fairness", "equal_treatment"},
                         {"equal_treatment", "equal_division"},
                         {"equal_division", "p3"}};
    o.require(t.edges() == chain, "edges differ from the chain");
    for (const auto& id : node_set(t)) {
      auto v = t.importance_of(id);
      o.require(v && near(*v, 0.9, 1e-9), "node " + id.str() + " not 0.9");
    }
    return o;
  });

  criterion(4, "propagation = recursive mean on 500 trees", 30.0, [] {
    Outcome o;
    std::mt19937_64 rng(4);
    double worst = 0.0;
    for (int trial = 0; trial < 500 && o.ok; ++trial) {
      std::map<NodeId, double> leaf;
      auto input = random_leafed_tree(rng, 50, leaf);
      auto r = propagate(input);
      auto want = vt_test::recursive_mean(input, leaf);
      for (const auto& [id, v] : want) {
        auto got = r.taxonomy.importance_of(id);
        o.require(got.has_value(), "tree " + std::to_string(trial) + ": " + id.str() + " unset");
        if (got) worst = std::max(worst, std::fabs(*got - v));
      }
      o.require(r.iterations <= input.size() + 1,
                "tree " + std::to_string(trial) + ": " + std::to_string(r.iterations) + " passes");
    }
    o.require(worst <= 1e-9, "max error " + num(worst));
    if (o.ok) o.detail = "max error " + num(worst);
    return o;
  });

  criterion(5, "coherence localizes a perturbed node", 0, [] {
    Outcome o;
    std::mt19937_64 rng(5);
    int trees = 0;
    while (trees < 200 && o.ok) {
      std::map<NodeId, double> leaf;
      auto input = random_leafed_tree(rng, 40, leaf);
      auto internal = internal_nodes(input);
      if (internal.empty()) continue;
      ++trees;
      auto full = propagate(input).taxonomy;
      auto clean = check_coherence(full);
      o.require(clean.coherent() && clean.unevaluable.empty(), "unperturbed tree incoherent");

      const auto& x = internal[vt_test::pick(rng, 0, internal.size() - 1)];
      double v = *full.importance_of(x);
      double delta = vt_test::uniform(rng, 0.05, 0.9);
      double moved = v + delta <= 1.0 ? v + delta : v - delta;
      if (moved < -1.0) moved = v > 0 ? -1.0 : 1.0;
      auto report = check_coherence(TaxonomyBuilder(full).set_importance(x, moved).build());
      o.require(!report.coherent(), "perturbation at " + x.str() + " undetected");
      o.require(report.root_causes == std::set<NodeId>{x},
                "root causes for " + x.str() + " are not exactly that node");
    }
    return o;
  });

  criterion(6, "aggregation law suite and planted violators", 0, [] {
    Outcome o;
    for (const auto& r : check_all_laws(mean_operator(), 6, 1000)) {
      o.require(r.passed && r.trials >= 1000, "mean fails " + std::string(to_string(r.law)));
    }
    auto planted = [](std::string name, AggregationOperator::Apply f) {
      return AggregationOperator{std::move(name), std::move(f), {}};
    };
    auto first = planted("first", [](std::span<const double> v) { return v.front(); });
    auto sum = planted("sum", [](std::span<const double> v) {
      double s = 0;
      for (double x : v) s += x;
      return s;
    });
    auto negated = planted("negated-mean",
                           [](std::span<const double> v) { return -mean_aggregate(v); });
    auto fails = [&](const AggregationOperator& op, Law law) {
      TupleSampler s(66);
      LawReport r;
      switch (law) {
        case Law::Symmetry: r = check_symmetry(op, s, 1000); break;
        case Law::Idempotence: r = check_idempotence(op, s, 1000); break;
        case Law::Monotonicity: r = check_monotonicity(op, s, 1000); break;
        case Law::CompensativeBounds: r = check_compensative_bounds(op, s, 1000); break;
      }
      o.require(!r.passed && r.counterexample.has_value(),
                op.name + " not caught by " + std::string(to_string(law)));
    };
    fails(first, Law::Symmetry);
    fails(sum, Law::Idempotence);
    fails(negated, Law::Monotonicity);
    return o;
  });

  criterion(7, "sd endpoint mapping and continuity", 0, [] {
    Outcome o;
    ma::DomainConfig cfg;
    auto member_sd = [&](std::uint64_t requests, std::uint64_t offers) {
      std::vector<ma::Event> log;
      for (std::uint64_t i = 0; i < requests; ++i) log.push_back({ma::EventKind::Request, "m", i});
      for (std::uint64_t i = 0; i < offers; ++i) log.push_back({ma::EventKind::Offer, "m", i});
      return ma::sd_p1(ma::ingest(log), "m", cfg);
    };
    o.require(near(member_sd(0, 1), -1.0, 1e-12), "R=0");
    o.require(near(member_sd(2, 2), 0.0, 1e-12), "R=1");
    o.require(near(member_sd(5, 1), 1.0, 1e-12), "R=max_R");
    o.require(near(ma::sd_from_ratio(cfg.max_ratio, cfg), 1.0, 1e-12), "ratio max_R");
    o.require(near(ma::sd_from_difference(0.0, cfg), 1.0, 1e-12), "delta=0");
    o.require(near(ma::sd_from_difference(cfg.epsilon, cfg), 0.0, 1e-12), "delta=epsilon");
    o.require(near(ma::sd_from_difference(cfg.max_delta, cfg), -1.0, 1e-12), "delta=max");

    std::vector<ma::Event> even;
    for (std::uint64_t i = 0; i < 4; ++i) {
      even.push_back({ma::EventKind::TaskAssigned, i % 2 ? "a" : "b", i});
    }
    o.require(near(ma::sd_p3(ma::ingest(even), cfg), 1.0, 1e-12), "sd_p3 on an even split");

    const double h = 1e-12;
    o.require(near(ma::sd_from_ratio(1.0 - h, cfg), ma::sd_from_ratio(1.0 + h, cfg), 1e-9),
              "ratio discontinuous at 1");
    o.require(near(ma::sd_from_difference(cfg.epsilon - h, cfg),
                   ma::sd_from_difference(cfg.epsilon + h, cfg), 1e-9),
              "difference discontinuous at epsilon");
    return o;
  });

  criterion(8, "KL and EMD on (1,0) vs uniform", 0, [] {
    Outcome o;
    std::vector<double> d{1, 0}, u{0.5, 0.5};
    double kl = ma::kl_divergence(d, u);
    double emd = ma::emd_1d(d, u);
    o.require(near(kl, std::log(2.0), 1e-9), "KL " + num(kl));
    o.require(near(emd, 0.5, 1e-12), "EMD " + num(emd));
    o.require(ma::kl_divergence(u, u) == 0.0 && ma::emd_1d(u, u) == 0.0,
              "non-zero on identical distributions");
    std::vector<double> counts{3, 1, 4}, same{6, 2, 8};
    o.require(near(ma::kl_divergence(counts, same), 0.0, 1e-12) &&
                  near(ma::emd_1d(counts, same), 0.0, 1e-12),
              "non-zero on proportional counts");
    if (o.ok) o.detail = "KL " + num(kl) + ", EMD " + num(emd);
    return o;
  });

  criterion(9, "positive and k-means selections agree", 0, [] {
    Outcome o;
    std::map<NodeId, double> c{{"p1", 0.8}, {"p2", 0.0}, {"p3", 0.7}};
    auto pos = select_nodes(c, SelectionStrategy::positive(0.0));
    auto km = select_nodes(c, SelectionStrategy::kmeans_two());
    std::set<NodeId> want{"p1", "p3"};
    o.require(pos == want, "positive selection differs");
    o.require(km == want, "k-means selection differs");
    o.require(vt_test::kmeans_two_oracle(c) == want, "exhaustive split differs");
    return o;
  });

  criterion(10, "format round-trip and DOT determinism", 0, [] {
    Outcome o;
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 200 && o.ok; ++trial) {
      auto t = vt_test::with_random_importances(
          rng, vt_test::random_dag(rng, vt_test::pick(rng, 1, 10), vt_test::pick(rng, 1, 12)), 0.6);
      auto text = io::serialize_taxonomy(t);
      auto back = io::parse_taxonomy(text);
      o.require(back == t, "taxonomy " + std::to_string(trial) + " changed in round-trip");
      o.require(io::serialize_taxonomy(back) == text, "serialization not stable");
      auto dot = io::export_dot(t);
      o.require(dot == io::export_dot(t) && dot == io::export_dot(back),
                "DOT output not byte-identical");
    }
    return o;
  });

  criterion(11, "alignment equals literal and paths oracles", 0, [] {
    Outcome o;
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      auto base = vt_test::random_dag(rng, vt_test::pick(rng, 1, 8), vt_test::pick(rng, 1, 12));
      std::map<NodeId, double> imp, sd;
      TaxonomyBuilder b(base);
      for (const auto& p : base.property_nodes()) {
        imp[p] = vt_test::uniform(rng);
        sd[p] = vt_test::uniform(rng);
        b.set_importance(p, imp[p]);
      }
      auto t = b.build();
      double mean = align("e", t, table(sd), AlignmentScheme::MeanWeighted).score;
      double path = align("e", t, table(sd), AlignmentScheme::PathWeighted).score;
      double want_mean = vt_test::alignment_oracle(t, sd, imp, false);
      double want_path = vt_test::alignment_oracle(t, sd, imp, true);
      worst = std::max({worst, std::fabs(mean - want_mean), std::fabs(path - want_path)});
    }
    o.require(worst <= 1e-12, "max error " + num(worst));
    if (o.ok) o.detail = "max error " + num(worst);
    return o;
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures;
}

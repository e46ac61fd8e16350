#include <gtest/gtest.h>

#include <sstream>

#include "exes/corpus.hpp"
#include "exes/error.hpp"
#include "exes/eval_harness.hpp"
#include "exes/skill_embedding.hpp"

using namespace exes;

namespace {

const ReferenceEngine kEngine;

Query t4_query(const CollaborationNetwork& net) {
  return Query{{net.skill("db"), net.skill("ml")}, 2};
}

CounterfactualExplanation sized(std::size_t n) {
  CounterfactualExplanation x;
  for (std::size_t i = 0; i < n; ++i) x.perturbations.push_back(Perturbation::add_keyword(skill_id(i)));
  return x;
}

}  // namespace

TEST(EvalHarness, FullScopeFeatureCount) {
  const auto net = make_t4();
  StatusProbe probe(kEngine, net, t4_query(net), net.node("p1"), Mode::search());
  EXPECT_EQ(factual_universe(probe, FeatureScope::kFull, 0).size(), 8u + 3u + 2u);
  EXPECT_EQ(factual_universe(probe, FeatureScope::kNeighborhood, 3),
            factual_universe(probe, FeatureScope::kFull, 0));
}

TEST(EvalHarness, ExhaustiveFactualTimeout) {
  const auto net = make_t4();
  StatusProbe probe(kEngine, net, t4_query(net), net.node("p1"), Mode::search());
  probe.set_deadline(Deadline(0.0));
  EXPECT_THROW(exhaustive_factual(probe, FeatureScope::kFull, ValueFunction::kStatus), Error);
}

TEST(EvalHarness, ExhaustiveMinimalT4) {
  const auto net = make_t4();
  const auto emb = fit_embedding(net, 5);
  const CounterfactualContext ctx{&emb, nullptr, std::nullopt};
  StatusProbe probe(kEngine, net, t4_query(net), net.node("p3"), Mode::search());
  for (auto v : {BaselineVariant::kFull, BaselineVariant::kExhaustiveNeighborhood,
                 BaselineVariant::kExhaustiveSkills}) {
    const auto r = exhaustive_counterfactual(probe, CounterfactualKind::kSkillAdd, 5, v, ctx, 10);
    ASSERT_TRUE(r.minimal_size);
    EXPECT_EQ(*r.minimal_size, 1u);
    EXPECT_TRUE(r.complete);
  }
  const auto none = exhaustive_counterfactual(probe, CounterfactualKind::kSkillAdd, 0,
                                              BaselineVariant::kFull, ctx, 10);
  EXPECT_TRUE(none.explanations.empty());
  EXPECT_FALSE(none.minimal_size);
}

TEST(EvalHarness, ExhaustiveMinimalTimeoutKeepsPartial) {
  const auto net = make_t4();
  StatusProbe probe(kEngine, net, t4_query(net), net.node("p3"), Mode::search());
  probe.set_deadline(Deadline(1e9, probe.engine_calls() + 3));
  const std::vector<Perturbation> universe{
      Perturbation::add_skill(node_id(2), net.skill("ml")),
      Perturbation::add_skill(node_id(2), net.skill("ir")),
      Perturbation::add_skill(node_id(3), net.skill("ml")),
      Perturbation::add_skill(node_id(3), net.skill("db")),
      Perturbation::add_skill(node_id(0), net.skill("ir")),
  };
  const auto r = exhaustive_minimal(probe, universe, 3);
  EXPECT_FALSE(r.complete);
  ASSERT_TRUE(r.minimal_size);
  EXPECT_EQ(*r.minimal_size, 1u);
}

TEST(EvalHarness, EnumerationModesAgree) {
  const auto net = make_t4();
  const std::vector<Perturbation> universe{
      Perturbation::add_skill(node_id(2), net.skill("ml")),
      Perturbation::add_skill(node_id(2), net.skill("ir")),
      Perturbation::add_skill(node_id(3), net.skill("ml")),
      Perturbation::add_skill(node_id(3), net.skill("db")),
  };
  StatusProbe a(kEngine, net, t4_query(net), net.node("p3"), Mode::search());
  StatusProbe b(kEngine, net, t4_query(net), net.node("p3"), Mode::search());
  const auto full = exhaustive_minimal(a, universe, 3, Enumeration::kFull);
  const auto early = exhaustive_minimal(b, universe, 3, Enumeration::kStopAtMinimal);
  ASSERT_TRUE(full.minimal_size && early.minimal_size);
  EXPECT_EQ(*full.minimal_size, *early.minimal_size);
  ASSERT_EQ(full.explanations.size(), early.explanations.size());
  for (std::size_t i = 0; i < full.explanations.size(); ++i) {
    EXPECT_EQ(full.explanations[i].perturbations, early.explanations[i].perturbations);
  }
  // 4 + 6 + 4 subsets against the 4 singletons.
  EXPECT_EQ(full.engine_calls, 14u);
  EXPECT_EQ(early.engine_calls, 4u);
}

TEST(EvalHarness, PrecisionAtK) {
  const auto net = make_t4();
  StatusProbe probe(kEngine, net, t4_query(net), net.node("p1"), Mode::search());
  const auto pruned = explain_skills(probe, 1, ValueFunction::kStatus);
  ShapleyOptions opts;
  opts.exact_threshold = 13;
  const auto full = exhaustive_factual(probe, FeatureScope::kFull, ValueFunction::kStatus, opts);
  EXPECT_EQ(precision_at_k(pruned, full, 1), 1.0);
  EXPECT_EQ(precision_at_k(pruned, pruned, 5), 1.0);
  FactualExplanation zero = full;
  std::fill(zero.attributions.begin(), zero.attributions.end(), 0.0);
  EXPECT_EQ(precision_at_k(pruned, zero, 1), 0.0);
}

TEST(EvalHarness, PrecisionCounterfactual) {
  const std::vector<CounterfactualExplanation> same{sized(2), sized(2)};
  auto p = precision_counterfactual(same, 2);
  EXPECT_EQ(p.precision, 1.0);
  EXPECT_EQ(p.precision_star, 1.0);
  const std::vector<CounterfactualExplanation> plus_one{sized(3), sized(3)};
  p = precision_counterfactual(plus_one, 2);
  EXPECT_EQ(p.precision, 0.0);
  EXPECT_EQ(p.precision_star, 1.0);
  const std::vector<CounterfactualExplanation> mixed{sized(2), sized(2), sized(3)};
  p = precision_counterfactual(mixed, 2);
  EXPECT_NEAR(p.precision, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(p.precision_star, 1.0);
  EXPECT_THROW(precision_counterfactual(mixed, std::nullopt), Error);
}

TEST(EvalHarness, ConfigParsing) {
  const auto c = parse_eval_config(R"({"n_queries": 3, "k": 5, "b": 4, "methods": ["cf-skill-add"]})");
  EXPECT_EQ(c.n_queries, 3u);
  EXPECT_EQ(c.k, 5u);
  EXPECT_EQ(c.params.b, 4u);
  EXPECT_THROW(parse_eval_config(R"({"bogus": 1})"), Error);
  EXPECT_THROW(parse_eval_config(R"({"keywords_min": 6})"), Error);
  EXPECT_THROW(parse_eval_config("not json"), Error);
  EXPECT_THROW(parse_eval_config(R"({"methods": ["nope"]})"), Error);
}

TEST(EvalHarness, InsufficientPopulation) {
  const auto net = make_t4();
  EvalConfig c;
  c.k = 3;
  try {
    run_protocol(kEngine, net, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientPopulation);
  }
}

TEST(EvalHarness, ProtocolPopulatesRowsAndIsDeterministic) {
  const auto net = generate_synthetic({100, 30, 6, 5, 7});
  EvalConfig c;
  c.n_queries = 2;
  c.k = 5;
  c.experts_per_query = 1;
  c.non_experts_per_query = 1;
  c.shapley.samples = 32;
  c.probe_budget = 3000;
  c.include_timing = false;
  const auto a = run_protocol(kEngine, net, c);
  const auto b = run_protocol(kEngine, net, c);
  EXPECT_EQ(a.rows.size(), 11u);
  std::ostringstream ca, cb, ja, jb;
  write_report_csv(a, ca);
  write_report_csv(b, cb);
  write_report_json(a, ja);
  write_report_json(b, jb);
  EXPECT_EQ(ca.str(), cb.str());
  EXPECT_EQ(ja.str(), jb.str());
  EXPECT_EQ(ca.str().find("latency"), std::string::npos);
  for (const auto& r : a.rows) {
    if (r.precision) {
      EXPECT_GE(*r.precision, 0.0);
      EXPECT_LE(*r.precision_star, 1.0);
    }
    EXPECT_LE(r.exes_count, r.subjects * c.params.e);
  }
}

TEST(EvalHarness, ZeroTimeoutFlagsBaselines) {
  const auto net = generate_synthetic({40, 12, 4, 3, 2});
  EvalConfig c;
  c.n_queries = 1;
  c.k = 4;
  c.experts_per_query = 1;
  c.non_experts_per_query = 1;
  c.timeout_seconds = 0.0;
  c.methods = {"factual-skills", "cf-skill-add"};
  const auto r = run_protocol(kEngine, net, c);
  for (const auto& row : r.rows) EXPECT_EQ(row.baseline_completed, 0u);
}

#include <gtest/gtest.h>

#include <random>

#include "exes/corpus.hpp"
#include "exes/error.hpp"
#include "exes/search_engine.hpp"

using namespace exes;

namespace {

Query t4_query(const CollaborationNetwork& net, std::uint32_t k = 2) {
  return Query{{net.skill("db"), net.skill("ml")}, k};
}

}  // namespace

TEST(SearchEngine, T4Ranking) {
  const auto net = make_t4();
  const ReferenceEngine engine;
  const auto list = engine.rank(NetworkView(net), t4_query(net));
  ASSERT_EQ(list.size(), 4u);
  EXPECT_EQ(list.entries()[0].node, net.node("p2"));
  EXPECT_EQ(list.entries()[1].node, net.node("p1"));
  EXPECT_EQ(list.entries()[2].node, net.node("p3"));
  EXPECT_EQ(list.entries()[3].node, net.node("p4"));
  EXPECT_NEAR(list.score_of(net.node("p2")), 7.0 / 3.0, 1e-12);
  EXPECT_NEAR(list.score_of(net.node("p1")), 1.5, 1e-12);
  EXPECT_EQ(list.rank_of(net.node("p3")), 3u);
}

TEST(SearchEngine, TiesBreakByNodeId) {
  const auto net = parse_network("0\ta\n1\tb\n2\tc\n", "", "0\tx\n1\tx\n2\tx\n");
  const auto list = reference_rank(NetworkView(net), Query{{net.skill("x")}, 1});
  EXPECT_EQ(list.entries()[0].node, node_id(0));
  EXPECT_EQ(list.entries()[2].node, node_id(2));
}

TEST(SearchEngine, RelevanceStatus) {
  const auto net = make_t4();
  const ReferenceEngine engine;
  const auto s = relevance_status(engine, NetworkView(net), t4_query(net), net.node("p3"));
  EXPECT_FALSE(s.relevant);
  EXPECT_EQ(s.rank, 3u);
  EXPECT_EQ(s.k, 2u);
}

TEST(SearchEngine, Teams) {
  const auto net = make_t4();
  const ReferenceEngine engine;
  const Query q{{net.skill("ml"), net.skill("sql")}, 2};
  const Team t = engine.form_team(NetworkView(net), q, net.node("p1"));
  EXPECT_EQ(t.members, (std::vector<NodeId>{node_id(0), node_id(1), node_id(2)}));
  EXPECT_EQ(t.join_rank(node_id(2)), 3u);
  EXPECT_EQ(t.join_rank(node_id(3)), 0u);
  const auto m = membership_status(engine, NetworkView(net), q, net.node("p1"), net.node("p4"));
  EXPECT_FALSE(m.relevant);
  EXPECT_EQ(m.rank, 5u);
  EXPECT_EQ(m.k, 3u);
  EXPECT_THROW(engine.form_team(NetworkView(net), q, node_id(17)), Error);
}

TEST(SearchEngine, TeamCoversWhenReachable) {
  const auto net = generate_synthetic({50, 12, 4, 3, 3});
  const ReferenceEngine engine;
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    Query q;
    q.k = 3;
    for (int i = 0; i < 3; ++i) q.keywords.push_back(skill_id(rng() % net.num_skills()));
    std::sort(q.keywords.begin(), q.keywords.end());
    q.keywords.erase(std::unique(q.keywords.begin(), q.keywords.end()), q.keywords.end());
    const Team t = engine.form_team(NetworkView(net), q, node_id(rng() % net.num_nodes()));
    // Synthetic networks are connected and hold every skill.
    EXPECT_EQ(t.covered, q.keywords);
    std::set<NodeId> unique(t.members.begin(), t.members.end());
    EXPECT_EQ(unique.size(), t.members.size());
  }
}

TEST(SearchEngine, OverlayRanking) {
  const auto net = make_t4();
  PerturbationOverlay o;
  o.added_skills.insert({net.node("p3"), net.skill("ml")});
  const auto [view, q] = apply_overlay(net, t4_query(net), o);
  const auto list = reference_rank(view, q);
  EXPECT_NEAR(list.score_of(net.node("p2")), 2.5, 1e-12);
  EXPECT_NEAR(list.score_of(net.node("p3")), 7.0 / 3.0, 1e-12);
  EXPECT_NEAR(list.score_of(net.node("p1")), 1.5, 1e-12);
  EXPECT_NEAR(list.score_of(net.node("p4")), 0.5, 1e-12);
  EXPECT_EQ(list.rank_of(net.node("p3")), 2u);
}

TEST(SearchEngine, AddingOwnSkillNeverLowersRank) {
  const auto net = generate_synthetic({60, 15, 4, 3, 21});
  const ReferenceEngine engine;
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 60; ++trial) {
    const NodeId p = node_id(rng() % net.num_nodes());
    const SkillId s = skill_id(rng() % net.num_skills());
    if (net.has_skill(p, s)) continue;
    const Query q{{s}, 5};
    PerturbationOverlay o;
    o.added_skills.insert({p, s});
    const auto before = engine.rank(NetworkView(net), q).rank_of(p);
    const auto after = engine.rank(NetworkView(net, o), q).rank_of(p);
    EXPECT_LE(after, before);
  }
}

TEST(SearchEngine, RegistryLookup) {
  EXPECT_EQ(make_engine("reference")->name(), "reference");
  EXPECT_THROW(make_engine("gcn"), Error);
}

TEST(StatusProbe, CachesAndCounts) {
  const auto net = make_t4();
  const ReferenceEngine engine;
  StatusProbe probe(engine, net, t4_query(net), net.node("p3"), Mode::search());
  EXPECT_FALSE(probe.initial().status);
  EXPECT_EQ(probe.initial().rank, 3u);
  PerturbationOverlay o;
  o.added_skills.insert({net.node("p3"), net.skill("ml")});
  const auto calls = probe.engine_calls();
  const Outcome a = probe.evaluate(o);
  const Outcome b = probe.evaluate(o);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(a.status);
  EXPECT_EQ(a.rank, 2u);
  EXPECT_EQ(probe.engine_calls(), calls + 1);
  probe.clear_cache();
  probe.evaluate(o);
  EXPECT_EQ(probe.engine_calls(), calls + 2);
}

TEST(StatusProbe, EmptyQueryConvention) {
  const auto net = make_t4();
  const ReferenceEngine engine;
  StatusProbe search(engine, net, t4_query(net), net.node("p2"), Mode::search());
  const Outcome s = search.evaluate({}, {});
  EXPECT_FALSE(s.status);
  EXPECT_EQ(s.rank, 4u);
  StatusProbe team(engine, net, t4_query(net), net.node("p2"), Mode::team(net.node("p2")));
  const Outcome t = team.evaluate({}, {});
  EXPECT_FALSE(t.status);
  EXPECT_EQ(t.rank, 5u);
}

TEST(StatusProbe, DeadlineExpires) {
  const auto net = make_t4();
  const ReferenceEngine engine;
  StatusProbe probe(engine, net, t4_query(net), net.node("p3"), Mode::search());
  probe.set_deadline(Deadline(0.0));
  PerturbationOverlay o;
  o.added_skills.insert({net.node("p3"), net.skill("ml")});
  try {
    probe.evaluate(o);
    FAIL() << "expected timeout";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTimeout);
  }
  StatusProbe budgeted(engine, net, t4_query(net), net.node("p3"), Mode::search());
  budgeted.set_deadline(Deadline(1e9, budgeted.engine_calls() + 1));
  EXPECT_NO_THROW(budgeted.evaluate(o));
  PerturbationOverlay o2;
  o2.added_skills.insert({net.node("p4"), net.skill("ml")});
  EXPECT_THROW(budgeted.evaluate(o2), Error);
}

TEST(StatusProbe, TeamBeamRank) {
  const auto net = make_t4();
  const ReferenceEngine engine;
  const Query q{{net.skill("ml"), net.skill("sql")}, 2};
  StatusProbe probe(engine, net, q, net.node("p4"), Mode::team(net.node("p1")));
  EXPECT_FALSE(probe.initial().status);
  EXPECT_EQ(probe.initial().rank, 5u);
  // sql is already covered by p3, so p4 adds nothing.
  EXPECT_EQ(probe.initial().beam_rank, 5u);

  const auto split = parse_network("0\ta\n1\tb\n2\tc\n", "0\t1\n", "0\tx\n1\tx\n2\ty\n");
  StatusProbe isolated(engine, split, Query{{split.skill("x"), split.skill("y")}, 1}, node_id(2),
                       Mode::team(node_id(0)));
  EXPECT_EQ(isolated.initial().rank, 4u);
  EXPECT_EQ(isolated.initial().beam_rank, 3u);
}

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "exes/corpus.hpp"
#include "exes/error.hpp"
#include "exes/link_predictor.hpp"

using namespace exes;

TEST(LinkPredictor, T4Scores) {
  const auto net = make_t4();
  EXPECT_NEAR(score_pair(net, node_id(0), node_id(2)).score, 1.0 / std::log(3.0), 1e-12);
  EXPECT_EQ(score_pair(net, node_id(0), node_id(3)).score, 0.0);
  EXPECT_EQ(score_pair(net, node_id(3), node_id(1)).pair, EdgeKey::make(node_id(1), node_id(3)));
  EXPECT_THROW(score_pair(net, node_id(1), node_id(1)), Error);
  EXPECT_THROW(score_pair(net, node_id(1), node_id(8)), Error);
}

TEST(LinkPredictor, TopCandidatesSkipExistingEdges) {
  const auto net = make_t4();
  const std::vector<NodeId> all{node_id(0), node_id(1), node_id(2), node_id(3)};
  const auto top = top_candidate_edges(net, all, all, 10);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].pair, EdgeKey::make(node_id(0), node_id(2)));
  EXPECT_EQ(top[1].pair, EdgeKey::make(node_id(1), node_id(3)));
  EXPECT_EQ(top[2].pair, EdgeKey::make(node_id(0), node_id(3)));
  EXPECT_EQ(top_candidate_edges(net, all, all, 1).size(), 1u);
}

TEST(LinkPredictor, AddingCommonNeighborIncreasesScore) {
  const auto net = generate_synthetic({50, 10, 4, 3, 13});
  const AdamicAdarPredictor aa;
  std::mt19937_64 rng(2);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 40; ++trial) {
    const NodeId u = node_id(rng() % net.num_nodes());
    const NodeId v = node_id(rng() % net.num_nodes());
    if (u == v) continue;
    for (NodeId w : net.neighbors(v)) {
      if (w == u || net.has_edge(u, w)) continue;
      PerturbationOverlay o;
      o.added_edges.insert(EdgeKey::make(u, w));
      const double before = aa.score_pair(NetworkView(net), u, v).score;
      const double after = aa.score_pair(NetworkView(net, o), u, v).score;
      EXPECT_GT(after, before);
      ++checked;
      break;
    }
  }
  EXPECT_GT(checked, 10);
}

TEST(LinkPredictor, RelabelingInvariance) {
  const auto net = generate_synthetic({30, 8, 4, 2, 17});
  std::vector<std::uint32_t> perm(net.num_nodes());
  std::iota(perm.begin(), perm.end(), 0u);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(5));
  NetworkData data;
  data.names.resize(net.num_nodes());
  for (std::size_t i = 0; i < net.num_nodes(); ++i) data.names[perm[i]] = net.display_name(node_id(i));
  for (const EdgeKey& e : net.edges()) data.edges.emplace_back(perm[index(e.u)], perm[index(e.v)]);
  const auto relabeled = CollaborationNetwork::from_data(data);
  for (std::size_t u = 0; u < net.num_nodes(); ++u) {
    for (std::size_t v = u + 1; v < net.num_nodes(); ++v) {
      EXPECT_NEAR(score_pair(net, node_id(u), node_id(v)).score,
                  score_pair(relabeled, node_id(perm[u]), node_id(perm[v])).score, 1e-12);
    }
  }
}

TEST(LinkPredictor, Registry) {
  EXPECT_EQ(make_link_predictor("adamic-adar")->name(), "adamic-adar");
  EXPECT_THROW(make_link_predictor("gae"), Error);
}

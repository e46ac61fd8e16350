#include <gtest/gtest.h>

#include "exes/counterfactual.hpp"
#include "exes/serialize.hpp"

namespace exes {
namespace {

TEST(Serialize, RoundTripsPerturbations) {
  const CollaborationNetwork net = make_t4();
  for (const char* text : {"add-skill:p3:ml", "remove-skill:p1:graphs", "add-keyword:sql",
                           "add-edge:p1-p4", "remove-edge:p2-p3"}) {
    const Perturbation p = decode_perturbation(net, text);
    EXPECT_EQ(encode(net, p), text);
  }
}

TEST(Serialize, DecodeRejectsGarbage) {
  const CollaborationNetwork net = make_t4();
  EXPECT_THROW(decode_perturbation(net, "add-skill"), Error);
  EXPECT_THROW(decode_perturbation(net, "frobnicate:p1"), Error);
  EXPECT_THROW(decode_perturbation(net, "add-skill:p9:ml"), Error);
  EXPECT_THROW(decode_perturbation(net, "add-skill:p1:nosuch"), Error);
}

TEST(Serialize, DumpIsCanonical) {
  const Json a = Json::parse(R"({"b":1,"a":[0.1234567,2]})");
  EXPECT_EQ(dump(a), "{\n  \"a\": [\n    0.1234567,\n    2\n  ],\n  \"b\": 1\n}\n");
  EXPECT_DOUBLE_EQ(round6(0.1234567), 0.123457);
  EXPECT_EQ(round6(-1e-9), 0.0);
}

TEST(Serialize, NearestTokens) {
  const CollaborationNetwork net = make_t4();
  const auto near = nearest_tokens(net, "sq", 2);
  ASSERT_EQ(near.size(), 2u);
  EXPECT_EQ(near[0], "sql");
}

TEST(Serialize, RankedListShape) {
  const CollaborationNetwork net = make_t4();
  const Query q = make_query(net, std::vector<std::string>{"ml", "db"}, 2);
  const NetworkView view(net);
  const Json j = ranked_list_json(net, reference_rank(view, q), q);
  EXPECT_EQ(j["k"], 2);
  ASSERT_EQ(j["ranking"].size(), 4u);
  EXPECT_EQ(j["ranking"][0]["node"], "p2");
  EXPECT_DOUBLE_EQ(j["ranking"][0]["score"].get<double>(), 2.333333);
}

}  // namespace
}  // namespace exes

#pragma once

// JSON shapes shared by the HTTP service and the CLI. Keys are emitted in
// sorted order and reals are rounded to 6 decimals, so equal inputs give
// byte-identical documents.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "exes/corpus.hpp"
#include "exes/counterfactual.hpp"
#include "exes/error.hpp"
#include "exes/factual.hpp"
#include "exes/search_engine.hpp"
#include "exes/skill_embedding.hpp"

namespace exes {

using Json = nlohmann::json;

double round6(double x);

Json network_summary_json(const CollaborationNetwork& net);
Json ranked_list_json(const CollaborationNetwork& net, const RankedList& list, const Query& q);
Json team_json(const CollaborationNetwork& net, const Team& team, const Query& q);
Json factual_json(const CollaborationNetwork& net, const FactualExplanation& x,
                  std::string_view facet);
Json counterfactual_json(const CollaborationNetwork& net, const CounterfactualResult& r);
// Empty result with a reason, for requests that yield no candidates.
Json counterfactual_empty_json(const CollaborationNetwork& net, CounterfactualKind kind,
                               NodeId subject, const Outcome& initial, const std::string& reason);
Json similar_json(const CollaborationNetwork& net, const std::vector<SimilarSkill>& list);
Json neighborhood_json(const CollaborationNetwork& net, NodeId subject, std::size_t d);
Json error_json(const Error& e);

// Canonical dump: sorted keys, two-space indent, trailing newline.
std::string dump(const Json& j);

// Inverse of encode(): "add-skill:p3:ml", "add-keyword:sql", "add-edge:p2-p4".
// Throws ParseError / UnknownNode / UnknownSkill.
Perturbation decode_perturbation(const CollaborationNetwork& net, std::string_view text);

// Up to `n` vocabulary tokens closest to `token` by edit distance.
std::vector<std::string> nearest_tokens(const CollaborationNetwork& net, std::string_view token,
                                        std::size_t n = 3);

}  // namespace exes

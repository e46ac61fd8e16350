#include "exes/serialize.hpp"

#include <algorithm>
#include <cmath>

namespace exes {

double round6(double x) {
  const double r = std::round(x * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json network_summary_json(const CollaborationNetwork& net) {
  return Json{{"n_nodes", net.num_nodes()},
              {"n_edges", net.num_edges()},
              {"n_skills", net.num_skills()},
              {"content_hash", std::to_string(net.content_hash())}};
}

namespace {

Json tokens_json(const CollaborationNetwork& net, const std::vector<SkillId>& skills) {
  Json out = Json::array();
  for (SkillId s : skills) out.push_back(net.skill_token(s));
  return out;
}

Json perturbation_json(const CollaborationNetwork& net, const Perturbation& p) {
  Json j{{"op", perturbation_kind_name(p.kind)}, {"text", encode(net, p)}};
  switch (p.kind) {
    case Perturbation::Kind::kAddSkill:
    case Perturbation::Kind::kRemoveSkill:
      j["node"] = net.display_name(p.node);
      j["skill"] = net.skill_token(p.skill);
      break;
    case Perturbation::Kind::kAddKeyword:
      j["skill"] = net.skill_token(p.skill);
      break;
    case Perturbation::Kind::kAddEdge:
    case Perturbation::Kind::kRemoveEdge:
      j["edge"] = Json::array({net.display_name(p.node), net.display_name(p.other)});
      break;
  }
  return j;
}

Json mode_fields(const CollaborationNetwork& net, const Mode& mode, Json j) {
  j["mode"] = mode.is_team() ? "team" : "search";
  if (mode.is_team()) j["seed"] = net.display_name(mode.seed);
  return j;
}

}  // namespace

Json ranked_list_json(const CollaborationNetwork& net, const RankedList& list, const Query& q) {
  Json ranking = Json::array();
  std::uint32_t rank = 0;
  for (const RankedEntry& e : list.entries()) {
    ++rank;
    ranking.push_back(Json{{"node", net.display_name(e.node)},
                           {"id", index(e.node)},
                           {"rank", rank},
                           {"score", round6(e.score)},
                           {"relevant", rank <= q.k}});
  }
  return Json{{"keywords", tokens_json(net, q.keywords)}, {"k", q.k}, {"ranking", ranking}};
}

Json team_json(const CollaborationNetwork& net, const Team& team, const Query& q) {
  Json members = Json::array();
  std::uint32_t order = 0;
  for (NodeId m : team.members) {
    members.push_back(Json{{"node", net.display_name(m)}, {"id", index(m)}, {"join_rank", ++order}});
  }
  return Json{{"seed", net.display_name(team.seed)},
              {"keywords", tokens_json(net, q.keywords)},
              {"members", members},
              {"covered", tokens_json(net, team.covered)},
              {"complete", team.covered.size() == q.keywords.size()}};
}

Json factual_json(const CollaborationNetwork& net, const FactualExplanation& x,
                  std::string_view facet) {
  Json attributions = Json::array();
  for (std::size_t i = 0; i < x.features.size(); ++i) {
    const Feature& f = x.features[i];
    Json a{{"kind", feature_kind_name(f.kind)}, {"phi", round6(x.attributions[i])}};
    switch (f.kind) {
      case Feature::Kind::kNodeSkill:
        a["node"] = net.display_name(f.node);
        a["skill"] = net.skill_token(f.skill);
        break;
      case Feature::Kind::kEdge:
        a["edge"] = Json::array({net.display_name(f.node), net.display_name(f.other)});
        break;
      case Feature::Kind::kQueryKeyword:
        a["skill"] = net.skill_token(f.skill);
        break;
    }
    attributions.push_back(std::move(a));
  }
  return mode_fields(net, x.mode,
                     Json{{"subject", net.display_name(x.subject)},
                          {"facet", facet},
                          {"value_full", round6(x.value_full)},
                          {"value_empty", round6(x.value_empty)},
                          {"exact", x.exact},
                          {"attributions", attributions}});
}

namespace {

Json counterfactual_base(const CollaborationNetwork& net, CounterfactualKind kind, NodeId subject,
                         const Outcome& initial) {
  return Json{{"subject", net.display_name(subject)},
              {"kind", counterfactual_kind_name(kind)},
              {"initial", Json{{"status", initial.status}, {"rank", initial.rank}}}};
}

}  // namespace

Json counterfactual_json(const CollaborationNetwork& net, const CounterfactualResult& r) {
  Json j = counterfactual_base(net, r.kind, r.subject, r.initial);
  Json list = Json::array();
  for (const auto& x : r.explanations) {
    Json ps = Json::array();
    for (const auto& p : x.perturbations) ps.push_back(perturbation_json(net, p));
    list.push_back(Json{{"perturbations", ps},
                        {"size", x.size()},
                        {"new_rank", x.new_rank},
                        {"flipped_to", x.flipped_to}});
  }
  j["explanations"] = list;
  if (r.explanations.empty()) j["reason"] = "no flipping perturbation set within the search limits";
  return j;
}

Json counterfactual_empty_json(const CollaborationNetwork& net, CounterfactualKind kind,
                               NodeId subject, const Outcome& initial, const std::string& reason) {
  Json j = counterfactual_base(net, kind, subject, initial);
  j["explanations"] = Json::array();
  j["reason"] = reason;
  return j;
}

Json similar_json(const CollaborationNetwork& net, const std::vector<SimilarSkill>& list) {
  Json out = Json::array();
  for (const auto& s : list) {
    out.push_back(Json{{"skill", net.skill_token(s.skill)}, {"similarity", round6(s.similarity)}});
  }
  return Json{{"skills", out}};
}

Json neighborhood_json(const CollaborationNetwork& net, NodeId subject, std::size_t d) {
  const NetworkView view(net);
  const std::vector<NodeId> nodes = neighborhood(view, subject, d);
  Json jn = Json::array();
  for (NodeId u : nodes) {
    Json skills = Json::array();
    for (SkillId s : net.skills_of(u)) skills.push_back(net.skill_token(s));
    jn.push_back(Json{{"node", net.display_name(u)}, {"id", index(u)}, {"skills", skills}});
  }
  Json je = Json::array();
  for (const EdgeKey& e : induced_edges(view, nodes)) {
    je.push_back(Json::array({net.display_name(e.u), net.display_name(e.v)}));
  }
  return Json{{"subject", net.display_name(subject)}, {"d", d}, {"nodes", jn}, {"edges", je}};
}

Json error_json(const Error& e) {
  return Json{{"error", error_code_name(e.code())}, {"detail", e.detail()}};
}

Perturbation decode_perturbation(const CollaborationNetwork& net, std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::kParseError, "perturbation '" + std::string(text) + "' lacks ':'");
  }
  const std::string_view op = text.substr(0, colon);
  const std::string_view rest = text.substr(colon + 1);
  if (op == "add-keyword") return Perturbation::add_keyword(net.skill(rest));
  if (op == "add-skill" || op == "remove-skill") {
    const auto last = rest.rfind(':');
    if (last == std::string_view::npos) {
      throw Error(ErrorCode::kParseError, "expected <node>:<skill> in '" + std::string(text) + "'");
    }
    const NodeId n = net.node(rest.substr(0, last));
    const SkillId s = net.skill(rest.substr(last + 1));
    return op == "add-skill" ? Perturbation::add_skill(n, s) : Perturbation::remove_skill(n, s);
  }
  if (op == "add-edge" || op == "remove-edge") {
    // Node names may contain '-': take the first split where both sides resolve.
    for (std::size_t pos = rest.find('-'); pos != std::string_view::npos;
         pos = rest.find('-', pos + 1)) {
      try {
        const NodeId a = net.node(rest.substr(0, pos));
        const NodeId b = net.node(rest.substr(pos + 1));
        if (a == b) throw Error(ErrorCode::kSelfLoop, "self-loop in '" + std::string(text) + "'");
        const EdgeKey e = EdgeKey::make(a, b);
        return op == "add-edge" ? Perturbation::add_edge(e) : Perturbation::remove_edge(e);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::kUnknownNode) throw;
      }
    }
    throw Error(ErrorCode::kUnknownNode, "cannot resolve edge '" + std::string(rest) + "'");
  }
  throw Error(ErrorCode::kParseError, "unknown perturbation '" + std::string(op) + "'");
}

namespace {

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

std::vector<std::string> nearest_tokens(const CollaborationNetwork& net, std::string_view token,
                                        std::size_t n) {
  std::vector<std::pair<std::size_t, std::string>> scored;
  for (std::size_t i = 0; i < net.num_skills(); ++i) {
    const std::string& t = net.skill_token(skill_id(i));
    scored.emplace_back(edit_distance(token, t), t);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(n, scored.size()); ++i) out.push_back(scored[i].second);
  return out;
}

}  // namespace exes

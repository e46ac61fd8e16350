#include "exes/counterfactual.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>

#include "exes/error.hpp"

namespace exes {

std::string_view perturbation_kind_name(Perturbation::Kind kind) {
  switch (kind) {
    case Perturbation::Kind::kAddSkill: return "add-skill";
    case Perturbation::Kind::kRemoveSkill: return "remove-skill";
    case Perturbation::Kind::kAddKeyword: return "add-keyword";
    case Perturbation::Kind::kAddEdge: return "add-edge";
    case Perturbation::Kind::kRemoveEdge: return "remove-edge";
  }
  return "unknown";
}

std::string encode(const CollaborationNetwork& net, const Perturbation& p) {
  std::string out(perturbation_kind_name(p.kind));
  switch (p.kind) {
    case Perturbation::Kind::kAddSkill:
    case Perturbation::Kind::kRemoveSkill:
      return out + ":" + net.display_name(p.node) + ":" + net.skill_token(p.skill);
    case Perturbation::Kind::kAddKeyword:
      return out + ":" + net.skill_token(p.skill);
    case Perturbation::Kind::kAddEdge:
    case Perturbation::Kind::kRemoveEdge:
      return out + ":" + net.display_name(p.node) + "-" + net.display_name(p.other);
  }
  return out;
}

PerturbationOverlay to_overlay(std::span<const Perturbation> perturbations) {
  PerturbationOverlay o;
  for (const Perturbation& p : perturbations) {
    switch (p.kind) {
      case Perturbation::Kind::kAddSkill: o.added_skills.insert({p.node, p.skill}); break;
      case Perturbation::Kind::kRemoveSkill: o.removed_skills.insert({p.node, p.skill}); break;
      case Perturbation::Kind::kAddKeyword: o.added_keywords.insert(p.skill); break;
      case Perturbation::Kind::kAddEdge: o.added_edges.insert(p.edge_key()); break;
      case Perturbation::Kind::kRemoveEdge: o.removed_edges.insert(p.edge_key()); break;
    }
  }
  return o;
}

std::string_view counterfactual_kind_name(CounterfactualKind kind) {
  switch (kind) {
    case CounterfactualKind::kSkillAdd: return "skill-add";
    case CounterfactualKind::kSkillRemove: return "skill-rm";
    case CounterfactualKind::kQueryPromote: return "query-promote";
    case CounterfactualKind::kQueryDemote: return "query-demote";
    case CounterfactualKind::kLinkAdd: return "link-add";
    case CounterfactualKind::kLinkRemove: return "link-rm";
  }
  return "unknown";
}

CounterfactualKind parse_counterfactual_kind(std::string_view name) {
  for (auto kind : {CounterfactualKind::kSkillAdd, CounterfactualKind::kSkillRemove,
                    CounterfactualKind::kQueryPromote, CounterfactualKind::kQueryDemote,
                    CounterfactualKind::kLinkAdd, CounterfactualKind::kLinkRemove}) {
    if (counterfactual_kind_name(kind) == name) return kind;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown counterfactual kind '" + std::string(name) + "'");
}

bool is_promotion(CounterfactualKind kind) {
  return kind == CounterfactualKind::kSkillAdd || kind == CounterfactualKind::kQueryPromote ||
         kind == CounterfactualKind::kLinkAdd;
}

std::size_t default_radius(CounterfactualKind kind) {
  return kind == CounterfactualKind::kLinkRemove ? 2 : 1;
}

// ---------------------------------------------------------------------------
// Beam search

namespace {

bool contains_subset(const PerturbationSet& superset, const PerturbationSet& subset) {
  return std::includes(superset.begin(), superset.end(), subset.begin(), subset.end());
}

bool conflicts(const PerturbationSet& state, const Perturbation& c) {
  for (const Perturbation& p : state) {
    if (p.node != c.node || p.other != c.other) continue;
    const bool skill_pair = (p.kind == Perturbation::Kind::kAddSkill &&
                             c.kind == Perturbation::Kind::kRemoveSkill) ||
                            (p.kind == Perturbation::Kind::kRemoveSkill &&
                             c.kind == Perturbation::Kind::kAddSkill);
    const bool edge_pair = (p.kind == Perturbation::Kind::kAddEdge &&
                            c.kind == Perturbation::Kind::kRemoveEdge) ||
                           (p.kind == Perturbation::Kind::kRemoveEdge &&
                            c.kind == Perturbation::Kind::kAddEdge);
    if ((skill_pair && p.skill == c.skill) || edge_pair) return true;
  }
  return false;
}

// Smallest flipping subset of `flipped` (canonical order among equal sizes).
std::pair<PerturbationSet, Outcome> minimal_core(StatusProbe& probe, const PerturbationSet& flipped,
                                                 const Outcome& flipped_outcome) {
  const std::size_t m = flipped.size();
  const bool initial = probe.initial().status;
  for (std::size_t size = 1; size < m; ++size) {
    // Enumerate index combinations of `size` in lexicographic order.
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      PerturbationSet subset;
      for (std::size_t i : idx) subset.push_back(flipped[i]);
      const Outcome out = probe.evaluate(to_overlay(subset));
      if (out.status != initial) return {subset, out};
      std::size_t pos = size;
      while (pos > 0 && idx[pos - 1] == m - size + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t j = pos; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return {flipped, flipped_outcome};
}

struct ScoredState {
  std::uint32_t beam_rank;
  PerturbationSet state;
};

}  // namespace

BeamResult beam_search(StatusProbe& probe, std::span<const Perturbation> candidates,
                       const BeamParams& params) {
  if (candidates.empty()) throw Error(ErrorCode::kNoCandidates, "no candidate perturbations");
  if (params.b == 0 || params.gamma == 0 || params.e == 0) {
    throw Error(ErrorCode::kInvalidArgument, "beam parameters must be >= 1");
  }
  BeamResult result;
  const std::uint64_t calls_before = probe.engine_calls();
  const bool initial = probe.initial().status;

  std::set<PerturbationSet> seen{PerturbationSet{}};
  std::set<PerturbationSet> recorded;
  std::vector<PerturbationSet> frontier{PerturbationSet{}};

  while (result.explanations.size() < params.e && !frontier.empty()) {
    ++result.stats.rounds;
    std::vector<ScoredState> expanded;
    for (const PerturbationSet& state : frontier) {
      for (const Perturbation& c : candidates) {
        if (std::binary_search(state.begin(), state.end(), c) || conflicts(state, c)) continue;
        PerturbationSet next = state;
        next.insert(std::upper_bound(next.begin(), next.end(), c), c);
        if (!seen.insert(next).second) continue;
        const bool dominated = std::any_of(recorded.begin(), recorded.end(),
                                           [&](const PerturbationSet& r) { return contains_subset(next, r); });
        if (dominated) continue;
        ++result.stats.states_probed;
        const Outcome out = probe.evaluate(to_overlay(next));
        if (out.status != initial) {
          auto [core, core_outcome] = minimal_core(probe, next, out);
          if (recorded.insert(core).second) {
            result.explanations.push_back({core, core_outcome.rank, core_outcome.status});
            if (result.explanations.size() >= params.e) {
              result.stats.engine_calls = probe.engine_calls() - calls_before;
              return result;
            }
          }
          continue;
        }
        if (next.size() < params.gamma) expanded.push_back({out.beam_rank, std::move(next)});
      }
    }
    std::sort(expanded.begin(), expanded.end(), [initial](const ScoredState& a, const ScoredState& b) {
      if (a.beam_rank != b.beam_rank) {
        return initial ? a.beam_rank > b.beam_rank : a.beam_rank < b.beam_rank;
      }
      return a.state < b.state;
    });
    if (expanded.size() > params.b) expanded.resize(params.b);
    frontier.clear();
    for (auto& s : expanded) frontier.push_back(std::move(s.state));
  }
  result.stats.engine_calls = probe.engine_calls() - calls_before;
  return result;
}

// ---------------------------------------------------------------------------
// Candidate generators

std::vector<Perturbation> candidates_skill_add(StatusProbe& probe, const SkillEmbedding& emb,
                                               std::size_t d, std::size_t t) {
  const CollaborationNetwork& net = probe.network();
  const std::vector<SkillId> skills = top_similar(emb, probe.query().keywords, {}, t);
  const std::vector<NodeId> hood = neighborhood(net, probe.subject(), d);
  std::vector<Perturbation> out;
  for (SkillId s : skills) {
    for (NodeId u : hood) {
      if (!net.has_skill(u, s)) out.push_back(Perturbation::add_skill(u, s));
    }
  }
  return out;
}

std::vector<Perturbation> candidates_skill_remove(StatusProbe& probe, const SkillEmbedding& emb,
                                                  std::size_t d, std::size_t t) {
  const CollaborationNetwork& net = probe.network();
  const std::vector<SimilarSkill> ranking = rank_similar(emb, probe.query().keywords, {});
  std::vector<std::size_t> position(net.num_skills(), 0);
  for (std::size_t i = 0; i < ranking.size(); ++i) position[index(ranking[i].skill)] = i;

  std::vector<NodeSkill> pairs;
  for (NodeId u : neighborhood(net, probe.subject(), d)) {
    for (SkillId s : net.skills_of(u)) pairs.push_back({u, s});
  }
  std::stable_sort(pairs.begin(), pairs.end(), [&](const NodeSkill& a, const NodeSkill& b) {
    if (position[index(a.skill)] != position[index(b.skill)]) {
      return position[index(a.skill)] < position[index(b.skill)];
    }
    return a.node < b.node;
  });
  if (pairs.size() > t) pairs.resize(t);
  std::vector<Perturbation> out;
  for (const auto& p : pairs) out.push_back(Perturbation::remove_skill(p.node, p.skill));
  return out;
}

std::vector<Perturbation> candidates_query_promote(StatusProbe& probe, const SkillEmbedding& emb,
                                                   std::size_t t) {
  const CollaborationNetwork& net = probe.network();
  const Query& q = probe.query();
  std::vector<SkillId> targets(net.skills_of(probe.subject()).begin(),
                               net.skills_of(probe.subject()).end());
  targets.insert(targets.end(), q.keywords.begin(), q.keywords.end());
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  std::vector<Perturbation> out;
  for (SkillId s : top_similar(emb, targets, q.keywords, t)) out.push_back(Perturbation::add_keyword(s));
  return out;
}

std::vector<Perturbation> candidates_query_demote(StatusProbe& probe, const SkillEmbedding& emb,
                                                  std::size_t t) {
  const CollaborationNetwork& net = probe.network();
  const Query& q = probe.query();
  std::vector<SkillId> exclude = q.keywords;
  auto own = net.skills_of(probe.subject());
  exclude.insert(exclude.end(), own.begin(), own.end());
  std::vector<Perturbation> out;
  for (SkillId s : top_similar(emb, q.keywords, exclude, t)) out.push_back(Perturbation::add_keyword(s));
  return out;
}

std::vector<Perturbation> candidates_link_add(StatusProbe& probe, const LinkPredictor& lp,
                                              std::size_t d, std::size_t t) {
  const CollaborationNetwork& net = probe.network();
  const NetworkView view(net);
  const std::vector<NodeId> near = neighborhood(view, probe.subject(), d);
  const RankedList ranking = probe.engine().rank(view, probe.query());
  const std::size_t top = std::min<std::size_t>(ranking.size(), 2 * std::size_t{probe.query().k});
  std::vector<NodeId> experts;
  for (std::size_t i = 0; i < top; ++i) experts.push_back(ranking.entries()[i].node);
  std::vector<Perturbation> out;
  for (const LinkScore& s : top_candidate_edges(lp, view, near, experts, t)) {
    out.push_back(Perturbation::add_edge(s.pair));
  }
  return out;
}

std::vector<Perturbation> candidates_link_remove(StatusProbe& probe, std::size_t d, std::size_t t) {
  const CollaborationNetwork& net = probe.network();
  const NetworkView view(net);
  const std::vector<NodeId> hood = neighborhood(view, probe.subject(), d);
  const auto base_rank = static_cast<std::int64_t>(probe.initial().beam_rank);
  std::vector<std::pair<std::int64_t, EdgeKey>> scored;
  for (const EdgeKey& e : induced_edges(view, hood)) {
    PerturbationOverlay o;
    o.removed_edges.insert(e);
    const Outcome out = probe.evaluate(o);
    scored.emplace_back(static_cast<std::int64_t>(out.beam_rank) - base_rank, e);
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (scored.size() > t) scored.resize(t);
  std::vector<Perturbation> out;
  for (const auto& [delta, e] : scored) out.push_back(Perturbation::remove_edge(e));
  return out;
}

std::vector<Perturbation> generate_candidates(StatusProbe& probe, CounterfactualKind kind,
                                              const CounterfactualContext& ctx, std::size_t t) {
  const std::size_t d = ctx.radius.value_or(default_radius(kind));
  auto need_embedding = [&]() -> const SkillEmbedding& {
    if (!ctx.embedding) throw Error(ErrorCode::kInvalidArgument, "skill embedding required");
    return *ctx.embedding;
  };
  switch (kind) {
    case CounterfactualKind::kSkillAdd: return candidates_skill_add(probe, need_embedding(), d, t);
    case CounterfactualKind::kSkillRemove:
      return candidates_skill_remove(probe, need_embedding(), d, t);
    case CounterfactualKind::kQueryPromote:
      return candidates_query_promote(probe, need_embedding(), t);
    case CounterfactualKind::kQueryDemote: return candidates_query_demote(probe, need_embedding(), t);
    case CounterfactualKind::kLinkAdd: {
      if (ctx.link_predictor) return candidates_link_add(probe, *ctx.link_predictor, d, t);
      return candidates_link_add(probe, AdamicAdarPredictor(), d, t);
    }
    case CounterfactualKind::kLinkRemove: return candidates_link_remove(probe, d, t);
  }
  return {};
}

// ---------------------------------------------------------------------------

bool revalidate(const ProbeInterface& engine, const CollaborationNetwork& net, const Query& q,
                NodeId subject, const Mode& mode, std::span<const Perturbation> perturbations) {
  const PerturbationOverlay overlay = to_overlay(perturbations);
  const NetworkView base_view(net);
  auto [view, q2] = apply_overlay(net, q, overlay);
  if (mode.is_team()) {
    const bool before = membership_status(engine, base_view, q, mode.seed, subject).relevant;
    const bool after = membership_status(engine, view, q2, mode.seed, subject).relevant;
    return before != after;
  }
  const bool before = relevance_status(engine, base_view, q, subject).relevant;
  const bool after = relevance_status(engine, view, q2, subject).relevant;
  return before != after;
}

void sort_for_presentation(std::vector<CounterfactualExplanation>& explanations,
                           std::uint32_t initial_rank) {
  auto effect = [initial_rank](const CounterfactualExplanation& x) {
    return std::llabs(static_cast<long long>(x.new_rank) - static_cast<long long>(initial_rank));
  };
  std::stable_sort(explanations.begin(), explanations.end(),
                   [&](const CounterfactualExplanation& a, const CounterfactualExplanation& b) {
                     if (a.size() != b.size()) return a.size() < b.size();
                     if (effect(a) != effect(b)) return effect(a) > effect(b);
                     return a.perturbations < b.perturbations;
                   });
}

CounterfactualResult explain_counterfactual(StatusProbe& probe, CounterfactualKind kind,
                                            const BeamParams& params,
                                            const CounterfactualContext& ctx) {
  CounterfactualResult result;
  result.kind = kind;
  result.subject = probe.subject();
  result.initial = probe.initial();
  if (is_promotion(kind) == result.initial.status) {
    throw Error(ErrorCode::kDirectionMismatch,
                std::string(counterfactual_kind_name(kind)) +
                    (result.initial.status ? " requires a subject with negative status"
                                           : " requires a subject with positive status"));
  }
  const std::uint64_t calls_before = probe.engine_calls();
  result.candidates = generate_candidates(probe, kind, ctx, params.t);
  BeamResult beam = beam_search(probe, result.candidates, params);
  result.stats = beam.stats;
  for (auto& x : beam.explanations) {
    if (revalidate(probe.engine(), probe.network(), probe.query(), probe.subject(), probe.mode(),
                   x.perturbations)) {
      result.explanations.push_back(std::move(x));
    } else {
      ++result.stats.rejected_on_revalidation;
    }
  }
  sort_for_presentation(result.explanations, result.initial.rank);
  result.stats.engine_calls = probe.engine_calls() - calls_before;
  return result;
}

}  // namespace exes

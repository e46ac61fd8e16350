#pragma once

// Counterfactual explanations: beam search over sets of atomic perturbations
// drawn from a pruned candidate list, one perturbation kind per run.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exes/corpus.hpp"
#include "exes/link_predictor.hpp"
#include "exes/search_engine.hpp"
#include "exes/skill_embedding.hpp"

namespace exes {

struct Perturbation {
  enum class Kind { kAddSkill, kRemoveSkill, kAddKeyword, kAddEdge, kRemoveEdge };

  Kind kind = Kind::kAddSkill;
  NodeId node{};   // skill holder, or edge endpoint u
  NodeId other{};  // edge endpoint v
  SkillId skill{};

  static Perturbation add_skill(NodeId n, SkillId s) { return {Kind::kAddSkill, n, NodeId{}, s}; }
  static Perturbation remove_skill(NodeId n, SkillId s) {
    return {Kind::kRemoveSkill, n, NodeId{}, s};
  }
  static Perturbation add_keyword(SkillId s) { return {Kind::kAddKeyword, NodeId{}, NodeId{}, s}; }
  static Perturbation add_edge(EdgeKey e) { return {Kind::kAddEdge, e.u, e.v, SkillId{}}; }
  static Perturbation remove_edge(EdgeKey e) { return {Kind::kRemoveEdge, e.u, e.v, SkillId{}}; }

  EdgeKey edge_key() const { return EdgeKey{node, other}; }
  // Canonical order doubles as the tie-breaking order of perturbation sets.
  auto operator<=>(const Perturbation&) const = default;
};

using PerturbationSet = std::vector<Perturbation>;  // sorted, unique

std::string_view perturbation_kind_name(Perturbation::Kind kind);
// "add-skill:p3:ml", "add-keyword:sql", "add-edge:p2-p4", ...
std::string encode(const CollaborationNetwork& net, const Perturbation& p);
PerturbationOverlay to_overlay(std::span<const Perturbation> perturbations);

enum class CounterfactualKind {
  kSkillAdd,
  kSkillRemove,
  kQueryPromote,
  kQueryDemote,
  kLinkAdd,
  kLinkRemove,
};

std::string_view counterfactual_kind_name(CounterfactualKind kind);
// Accepts skill-add|skill-rm|query-promote|query-demote|link-add|link-rm.
CounterfactualKind parse_counterfactual_kind(std::string_view name);
// Promotion kinds explain a currently negative status.
bool is_promotion(CounterfactualKind kind);
std::size_t default_radius(CounterfactualKind kind);

struct BeamParams {
  std::size_t b = 30;      // beam width
  std::size_t gamma = 5;   // maximum explanation size
  std::size_t e = 5;       // explanations wanted
  std::size_t t = 10;      // candidate count
};

struct CounterfactualExplanation {
  PerturbationSet perturbations;
  std::uint32_t new_rank = 0;
  bool flipped_to = false;

  std::size_t size() const { return perturbations.size(); }
};

struct BeamStats {
  std::size_t rounds = 0;
  std::size_t states_probed = 0;
  std::uint64_t engine_calls = 0;
  std::size_t rejected_on_revalidation = 0;
};

struct BeamResult {
  std::vector<CounterfactualExplanation> explanations;  // discovery order
  BeamStats stats;
};

// Beam search over perturbation sets. Each round extends every frontier
// state by every candidate; sets are canonicalized and probed once. Sets that
// flip the status are reduced to their smallest flipping subset before being
// recorded and are not expanded further; supersets of recorded explanations
// are skipped. The frontier keeps the b best non-flipping states of size < γ,
// ordered by beam rank (worst first when the initial status is positive,
// best first otherwise), ties by canonical set order. Stops as soon as e
// explanations are recorded, or when the frontier is empty.
// Throws NoCandidates.
BeamResult beam_search(StatusProbe& probe, std::span<const Perturbation> candidates,
                       const BeamParams& params);

// Candidate generators. Radius d restricts perturbed nodes to the subject's
// neighborhood.
std::vector<Perturbation> candidates_skill_add(StatusProbe& probe, const SkillEmbedding& emb,
                                               std::size_t d, std::size_t t);
std::vector<Perturbation> candidates_skill_remove(StatusProbe& probe, const SkillEmbedding& emb,
                                                  std::size_t d, std::size_t t);
std::vector<Perturbation> candidates_query_promote(StatusProbe& probe, const SkillEmbedding& emb,
                                                   std::size_t t);
std::vector<Perturbation> candidates_query_demote(StatusProbe& probe, const SkillEmbedding& emb,
                                                  std::size_t t);
// Endpoints: neighborhood(subject, d) × top-2k nodes of the unperturbed ranking.
std::vector<Perturbation> candidates_link_add(StatusProbe& probe, const LinkPredictor& lp,
                                              std::size_t d, std::size_t t);
// Edges of the radius-d subgraph ordered by single-removal rank damage.
std::vector<Perturbation> candidates_link_remove(StatusProbe& probe, std::size_t d, std::size_t t);

struct CounterfactualContext {
  const SkillEmbedding* embedding = nullptr;
  const LinkPredictor* link_predictor = nullptr;
  std::optional<std::size_t> radius;  // per-kind default when unset
};

std::vector<Perturbation> generate_candidates(StatusProbe& probe, CounterfactualKind kind,
                                              const CounterfactualContext& ctx, std::size_t t);

struct CounterfactualResult {
  CounterfactualKind kind{};
  NodeId subject{};
  Outcome initial;
  std::vector<Perturbation> candidates;
  std::vector<CounterfactualExplanation> explanations;  // presentation order
  BeamStats stats;
};

// Checks direction (DirectionMismatch), generates candidates (NoCandidates
// when empty), runs the beam, re-validates every explanation from scratch and
// returns them sorted by (size, |rank change| descending, canonical order).
CounterfactualResult explain_counterfactual(StatusProbe& probe, CounterfactualKind kind,
                                            const BeamParams& params,
                                            const CounterfactualContext& ctx);

// Re-applies the perturbations to the base input and probes the engine
// directly (no cache). True when the subject's status differs from the
// unperturbed status.
bool revalidate(const ProbeInterface& engine, const CollaborationNetwork& net, const Query& q,
                NodeId subject, const Mode& mode, std::span<const Perturbation> perturbations);

void sort_for_presentation(std::vector<CounterfactualExplanation>& explanations,
                           std::uint32_t initial_rank);

}  // namespace exes

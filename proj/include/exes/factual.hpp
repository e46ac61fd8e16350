#pragma once

// Shapley-value factual explanations over skills, query keywords and
// collaborations. Features are existing input elements; switching a feature
// off removes it (skill deleted, edge deleted, keyword dropped).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "exes/corpus.hpp"
#include "exes/search_engine.hpp"

namespace exes {

struct Feature {
  enum class Kind { kNodeSkill, kEdge, kQueryKeyword };

  Kind kind = Kind::kNodeSkill;
  NodeId node{};   // skill holder, or edge endpoint u
  NodeId other{};  // edge endpoint v
  SkillId skill{};

  static Feature node_skill(NodeId n, SkillId s) { return {Kind::kNodeSkill, n, NodeId{}, s}; }
  static Feature edge(EdgeKey e) { return {Kind::kEdge, e.u, e.v, SkillId{}}; }
  static Feature keyword(SkillId s) { return {Kind::kQueryKeyword, NodeId{}, NodeId{}, s}; }

  EdgeKey edge_key() const { return EdgeKey{node, other}; }
  auto operator<=>(const Feature&) const = default;
};

std::string_view feature_kind_name(Feature::Kind kind);
// e.g. "skill:p1:ml", "edge:p1-p2", "keyword:ml".
std::string describe(const CollaborationNetwork& net, const Feature& f);

enum class ValueFunction {
  kStatus,  // 1 when the subject keeps its positive status, else 0
  kMargin,  // (k - rank + 1) / k clamped to [-1, 1]
};

double outcome_value(ValueFunction vf, const Outcome& outcome);

struct ShapleyOptions {
  std::size_t exact_threshold = 12;
  std::size_t samples = 2048;
  std::uint64_t seed = 0;
};

struct FactualExplanation {
  NodeId subject{};
  Mode mode;
  std::vector<Feature> features;    // features considered, canonical order
  std::vector<double> attributions;  // parallel to features
  double value_full = 0.0;
  double value_empty = 0.0;
  bool exact = true;
  std::uint64_t engine_calls = 0;

  // 0 for features outside the considered set.
  double phi(const Feature& f) const;
  // Features with |phi| > 1e-12.
  std::size_t nonzero_count() const;
};

// Value of the coalition (coalition[i] ⇔ features[i] kept on).
double coalition_value(StatusProbe& probe, std::span<const Feature> features,
                       const std::vector<bool>& coalition, ValueFunction vf);

// Exact enumeration when |features| ≤ exact_threshold, otherwise seeded
// permutation sampling. An empty feature list yields an empty explanation.
FactualExplanation shapley_values(StatusProbe& probe, std::span<const Feature> features,
                                  ValueFunction vf, const ShapleyOptions& options = {});

// NodeSkill features of every node within radius d of the subject.
FactualExplanation explain_skills(StatusProbe& probe, std::size_t d, ValueFunction vf,
                                  const ShapleyOptions& options = {});

// One feature per query keyword.
FactualExplanation explain_query(StatusProbe& probe, ValueFunction vf,
                                 const ShapleyOptions& options = {});

struct CollaborationTrace {
  std::vector<NodeId> expanded;        // expansion order
  std::vector<EdgeKey> impactful;      // sorted
};

// Breadth-first expansion over impactful experts inside the radius-d
// subgraph: each expanded node's incident edges are scored locally and edges
// with |phi| ≥ tau join the impactful set; the far endpoint is queued. The
// result is the joint Shapley computation over the impactful set.
FactualExplanation explain_collaborations(StatusProbe& probe, std::size_t d, double tau,
                                          ValueFunction vf, const ShapleyOptions& options = {},
                                          CollaborationTrace* trace = nullptr);

}  // namespace exes

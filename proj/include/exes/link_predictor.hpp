#pragma once

// Candidate-edge scoring for collaboration-addition counterfactuals.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exes/corpus.hpp"

namespace exes {

struct LinkScore {
  EdgeKey pair{};
  double score = 0.0;
};

class LinkPredictor {
 public:
  virtual ~LinkPredictor() = default;
  virtual std::string_view name() const = 0;
  // Throws SelfLoop / UnknownNode.
  virtual LinkScore score_pair(const NetworkView& view, NodeId u, NodeId v) const = 0;
};

// Σ_{w ∈ N(u) ∩ N(v)} 1 / ln(1 + deg(w)).
class AdamicAdarPredictor final : public LinkPredictor {
 public:
  std::string_view name() const override { return "adamic-adar"; }
  LinkScore score_pair(const NetworkView& view, NodeId u, NodeId v) const override;
};

LinkScore score_pair(const CollaborationNetwork& net, NodeId u, NodeId v);

// Scores every non-edge (a, b), a ∈ endpoints_a, b ∈ endpoints_b, a ≠ b;
// returns the best t by score descending, ties by (min id, max id).
std::vector<LinkScore> top_candidate_edges(const LinkPredictor& predictor, const NetworkView& view,
                                           std::span<const NodeId> endpoints_a,
                                           std::span<const NodeId> endpoints_b, std::size_t t);
std::vector<LinkScore> top_candidate_edges(const CollaborationNetwork& net,
                                           std::span<const NodeId> endpoints_a,
                                           std::span<const NodeId> endpoints_b, std::size_t t);

using LinkPredictorFactory = std::function<std::unique_ptr<LinkPredictor>()>;
void register_link_predictor(const std::string& name, LinkPredictorFactory factory);
std::unique_ptr<LinkPredictor> make_link_predictor(std::string_view name);

}  // namespace exes

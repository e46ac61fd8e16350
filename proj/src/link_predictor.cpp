#include "exes/link_predictor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>

#include "exes/error.hpp"

namespace exes {

LinkScore AdamicAdarPredictor::score_pair(const NetworkView& view, NodeId u, NodeId v) const {
  view.base().check_node(u);
  view.base().check_node(v);
  if (u == v) throw Error(ErrorCode::kSelfLoop, "self-loop at node " + std::to_string(index(u)));
  const std::vector<NodeId> nu = view.neighbors(u);
  const std::vector<NodeId> nv = view.neighbors(v);
  std::vector<NodeId> common;
  std::set_intersection(nu.begin(), nu.end(), nv.begin(), nv.end(), std::back_inserter(common));
  double score = 0.0;
  for (NodeId w : common) score += 1.0 / std::log(1.0 + static_cast<double>(view.degree(w)));
  return {EdgeKey::make(u, v), score};
}

LinkScore score_pair(const CollaborationNetwork& net, NodeId u, NodeId v) {
  return AdamicAdarPredictor().score_pair(NetworkView(net), u, v);
}

std::vector<LinkScore> top_candidate_edges(const LinkPredictor& predictor, const NetworkView& view,
                                           std::span<const NodeId> endpoints_a,
                                           std::span<const NodeId> endpoints_b, std::size_t t) {
  std::set<EdgeKey> pairs;
  for (NodeId a : endpoints_a) {
    for (NodeId b : endpoints_b) {
      if (a == b || view.has_edge(a, b)) continue;
      pairs.insert(EdgeKey::make(a, b));
    }
  }
  std::vector<LinkScore> scored;
  scored.reserve(pairs.size());
  for (const EdgeKey& e : pairs) scored.push_back(predictor.score_pair(view, e.u, e.v));
  std::stable_sort(scored.begin(), scored.end(), [](const LinkScore& x, const LinkScore& y) {
    const auto kx = std::llround(x.score * 1e12);
    const auto ky = std::llround(y.score * 1e12);
    if (kx != ky) return kx > ky;
    return x.pair < y.pair;
  });
  if (scored.size() > t) scored.resize(t);
  return scored;
}

std::vector<LinkScore> top_candidate_edges(const CollaborationNetwork& net,
                                           std::span<const NodeId> endpoints_a,
                                           std::span<const NodeId> endpoints_b, std::size_t t) {
  return top_candidate_edges(AdamicAdarPredictor(), NetworkView(net), endpoints_a, endpoints_b, t);
}

namespace {

struct PredictorRegistry {
  std::mutex mu;
  std::map<std::string, LinkPredictorFactory, std::less<>> factories{
      {"adamic-adar", [] { return std::make_unique<AdamicAdarPredictor>(); }}};
};

PredictorRegistry& predictor_registry() {
  static PredictorRegistry r;
  return r;
}

}  // namespace

void register_link_predictor(const std::string& name, LinkPredictorFactory factory) {
  auto& r = predictor_registry();
  std::lock_guard lock(r.mu);
  r.factories[name] = std::move(factory);
}

std::unique_ptr<LinkPredictor> make_link_predictor(std::string_view name) {
  auto& r = predictor_registry();
  std::lock_guard lock(r.mu);
  auto it = r.factories.find(name);
  if (it == r.factories.end()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown link predictor '" + std::string(name) + "'");
  }
  return it->second();
}

}  // namespace exes

#include "exes/search_engine.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include "exes/error.hpp"

namespace exes {

std::int64_t score_key(double score) { return std::llround(score * 1e9); }

RankedList RankedList::from_scores(std::vector<double> scores) {
  RankedList list;
  const std::size_t n = scores.size();
  std::vector<std::int64_t> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = score_key(scores[i]);
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (keys[a] != keys[b]) return keys[a] > keys[b];
    return a < b;
  });
  list.entries_.reserve(n);
  list.rank_of_.assign(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    list.entries_.push_back({node_id(order[r]), scores[order[r]]});
    list.rank_of_[order[r]] = static_cast<std::uint32_t>(r + 1);
  }
  list.scores_ = std::move(scores);
  return list;
}

bool Team::contains(NodeId n) const {
  return std::find(members.begin(), members.end(), n) != members.end();
}

std::uint32_t Team::join_rank(NodeId n) const {
  auto it = std::find(members.begin(), members.end(), n);
  return it == members.end() ? 0 : static_cast<std::uint32_t>(it - members.begin() + 1);
}

RankedList reference_rank(const NetworkView& view, const Query& q, double alpha) {
  const std::size_t n = view.num_nodes();
  std::vector<double> scores(n, 0.0);
  std::vector<std::vector<NodeId>> nbrs(n);
  for (std::size_t u = 0; u < n; ++u) {
    view.for_each_neighbor(node_id(u), [&](NodeId w) { nbrs[u].push_back(w); });
  }
  std::vector<char> holds(n);
  for (SkillId s : q.keywords) {
    for (std::size_t u = 0; u < n; ++u) holds[u] = view.has_skill(node_id(u), s) ? 1 : 0;
    for (std::size_t u = 0; u < n; ++u) {
      std::size_t count = 0;
      for (NodeId w : nbrs[u]) count += static_cast<std::size_t>(holds[index(w)]);
      scores[u] += static_cast<double>(holds[u]) +
                   alpha * static_cast<double>(count) / static_cast<double>(1 + nbrs[u].size());
    }
  }
  return RankedList::from_scores(std::move(scores));
}

RankedList ReferenceEngine::rank(const NetworkView& view, const Query& q) const {
  return reference_rank(view, q, alpha_);
}

Team ReferenceEngine::form_team(const NetworkView& view, const Query& q, NodeId seed) const {
  return greedy_form_team(*this, view, q, seed);
}

Team greedy_form_team(const ProbeInterface& ranker, const NetworkView& view, const Query& q,
                      NodeId seed) {
  view.base().check_node(seed);
  const std::size_t n = view.num_nodes();
  const RankedList ranking = ranker.rank(view, q);

  Team team;
  team.seed = seed;
  std::vector<char> in_team(n, 0);
  std::vector<char> covered(q.keywords.size(), 0);
  std::size_t remaining = q.keywords.size();

  auto cover = [&](NodeId u) {
    for (std::size_t i = 0; i < q.keywords.size(); ++i) {
      if (!covered[i] && view.has_skill(u, q.keywords[i])) {
        covered[i] = 1;
        --remaining;
      }
    }
  };
  auto gain = [&](NodeId u) {
    std::size_t g = 0;
    for (std::size_t i = 0; i < q.keywords.size(); ++i) {
      if (!covered[i] && view.has_skill(u, q.keywords[i])) ++g;
    }
    return g;
  };

  team.members.push_back(seed);
  in_team[index(seed)] = 1;
  cover(seed);

  while (remaining > 0) {
    std::vector<char> frontier(n, 0);
    for (NodeId m : team.members) {
      view.for_each_neighbor(m, [&](NodeId w) {
        if (!in_team[index(w)]) frontier[index(w)] = 1;
      });
    }
    std::optional<NodeId> best;
    std::size_t best_gain = 0;
    std::int64_t best_key = 0;
    for (std::size_t u = 0; u < n; ++u) {
      if (!frontier[u]) continue;
      const std::size_t g = gain(node_id(u));
      const std::int64_t key = score_key(ranking.score_of(node_id(u)));
      if (!best || g > best_gain || (g == best_gain && key > best_key)) {
        best = node_id(u);
        best_gain = g;
        best_key = key;
      }
    }
    if (!best) break;
    team.members.push_back(*best);
    in_team[index(*best)] = 1;
    cover(*best);
  }
  for (std::size_t i = 0; i < q.keywords.size(); ++i) {
    if (covered[i]) team.covered.push_back(q.keywords[i]);
  }
  return team;
}

RelevanceStatus relevance_status(const ProbeInterface& engine, const NetworkView& view,
                                 const Query& q, NodeId p) {
  view.base().check_node(p);
  const RankedList ranking = engine.rank(view, q);
  const std::uint32_t rank = ranking.rank_of(p);
  return {rank <= q.k, rank, q.k};
}

RelevanceStatus membership_status(const ProbeInterface& engine, const NetworkView& view,
                                  const Query& q, NodeId seed, NodeId p) {
  view.base().check_node(p);
  const Team team = engine.form_team(view, q, seed);
  const std::uint32_t join = team.join_rank(p);
  const auto size = static_cast<std::uint32_t>(team.members.size());
  if (join == 0) return {false, static_cast<std::uint32_t>(view.num_nodes() + 1), size};
  return {true, join, size};
}

// ---------------------------------------------------------------------------

namespace {

struct Registry {
  std::mutex mu;
  std::map<std::string, EngineFactory, std::less<>> factories{
      {"reference", [] { return std::make_unique<ReferenceEngine>(); }}};
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

void register_engine(const std::string& name, EngineFactory factory) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  r.factories[name] = std::move(factory);
}

std::unique_ptr<ProbeInterface> make_engine(std::string_view name) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  auto it = r.factories.find(name);
  if (it == r.factories.end()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown ranker '" + std::string(name) + "'");
  }
  return it->second();
}

std::vector<std::string> engine_names() {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  std::vector<std::string> names;
  for (const auto& [name, _] : r.factories) names.push_back(name);
  return names;
}

// ---------------------------------------------------------------------------

Deadline::Deadline(double seconds, std::uint64_t probe_budget)
    : seconds_(seconds), probe_budget_(probe_budget) {}

bool Deadline::expired(std::uint64_t probes) const {
  if (probe_budget_ > 0 && probes >= probe_budget_) return true;
  if (std::isinf(seconds_)) return false;
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
  return elapsed.count() >= seconds_;
}

void Deadline::check(std::uint64_t probes) const {
  if (expired(probes)) throw Error(ErrorCode::kTimeout, "deadline exceeded");
}

StatusProbe::StatusProbe(const ProbeInterface& engine, const CollaborationNetwork& net, Query q,
                         NodeId subject, Mode mode)
    : engine_(&engine), net_(&net), query_(std::move(q)), subject_(subject), mode_(mode) {
  net.check_node(subject);
  if (mode.is_team()) net.check_node(mode.seed);
  validate_query(net, query_);
  initial_ = compute(PerturbationOverlay{}, query_.keywords);
}

Outcome StatusProbe::evaluate(const PerturbationOverlay& overlay) {
  return evaluate(overlay, query_.keywords);
}

Outcome StatusProbe::evaluate(const PerturbationOverlay& overlay,
                              const std::vector<SkillId>& keywords) {
  ++lookups_;
  auto key = std::make_pair(keywords, overlay);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  deadline_.check(engine_calls_);
  Outcome out = compute(overlay, keywords);
  cache_.emplace(std::move(key), out);
  return out;
}

void StatusProbe::clear_cache() { cache_.clear(); }

Outcome StatusProbe::compute(const PerturbationOverlay& overlay,
                             const std::vector<SkillId>& keywords) {
  const auto n = static_cast<std::uint32_t>(net_->num_nodes());
  Query q = query_;
  q.keywords = keywords;
  auto [view, q2] = apply_overlay(*net_, q, overlay);
  ++engine_calls_;
  if (q2.keywords.empty()) {
    if (mode_.is_team()) return {false, n + 1, 1, n + 1};
    return {false, n, q.k, n};
  }
  if (!mode_.is_team()) {
    const RankedList ranking = engine_->rank(view, q2);
    const std::uint32_t rank = ranking.rank_of(subject_);
    return {rank <= q2.k, rank, q2.k, rank};
  }
  const Team team = engine_->form_team(view, q2, mode_.seed);
  const auto size = static_cast<std::uint32_t>(team.members.size());
  if (const std::uint32_t join = team.join_rank(subject_); join > 0) {
    return {true, join, size, join};
  }
  std::uint32_t gain = 0;
  for (SkillId s : q2.keywords) {
    if (!std::binary_search(team.covered.begin(), team.covered.end(), s) &&
        view.has_skill(subject_, s)) {
      ++gain;
    }
  }
  return {false, n + 1, size, n + 1 - gain};
}

}  // namespace exes

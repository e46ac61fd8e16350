#pragma once

// The system under explanation. Explainers only see ProbeInterface; the
// reference engine is a transparent one-hop skill propagation scorer with a
// greedy team former on top.

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "exes/corpus.hpp"

namespace exes {

struct RankedEntry {
  NodeId node{};
  double score = 0.0;
};

// Total order over all nodes: score descending, ties by ascending NodeId.
// Scores are compared on a 1e-9 grid so that summation order never flips a tie.
class RankedList {
 public:
  RankedList() = default;
  static RankedList from_scores(std::vector<double> scores);

  const std::vector<RankedEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  // 1-based.
  std::uint32_t rank_of(NodeId n) const { return rank_of_[index(n)]; }
  double score_of(NodeId n) const { return scores_[index(n)]; }

 private:
  std::vector<RankedEntry> entries_;
  std::vector<std::uint32_t> rank_of_;
  std::vector<double> scores_;
};

std::int64_t score_key(double score);

struct RelevanceStatus {
  bool relevant = false;
  std::uint32_t rank = 0;
  std::uint32_t k = 0;
  bool operator==(const RelevanceStatus&) const = default;
};

struct Team {
  NodeId seed{};
  std::vector<NodeId> members;  // join order, seed first
  std::vector<SkillId> covered;

  bool contains(NodeId n) const;
  // Join position (seed = 1), 0 for non-members.
  std::uint32_t join_rank(NodeId n) const;
};

class ProbeInterface {
 public:
  virtual ~ProbeInterface() = default;
  virtual std::string_view name() const = 0;
  virtual RankedList rank(const NetworkView& view, const Query& q) const = 0;
  virtual Team form_team(const NetworkView& view, const Query& q, NodeId seed) const = 0;
};

// score(p) = Σ_{s∈q} [s ∈ S_p] + alpha · |{u ∈ N(p) : s ∈ S_u}| / (1 + |N(p)|)
class ReferenceEngine final : public ProbeInterface {
 public:
  explicit ReferenceEngine(double alpha = 0.5) : alpha_(alpha) {}

  std::string_view name() const override { return "reference"; }
  RankedList rank(const NetworkView& view, const Query& q) const override;
  Team form_team(const NetworkView& view, const Query& q, NodeId seed) const override;

  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

RankedList reference_rank(const NetworkView& view, const Query& q, double alpha = 0.5);

// Grows a team from `seed` over adjacent nodes, preferring (newly covered
// keyword count, ranker score, lowest id), until q is covered or no frontier
// node remains. Throws UnknownNode.
Team greedy_form_team(const ProbeInterface& ranker, const NetworkView& view, const Query& q,
                      NodeId seed);

RelevanceStatus relevance_status(const ProbeInterface& engine, const NetworkView& view,
                                 const Query& q, NodeId p);
// rank = join order for members, n + 1 otherwise; k = team size.
RelevanceStatus membership_status(const ProbeInterface& engine, const NetworkView& view,
                                  const Query& q, NodeId seed, NodeId p);

// Engine registry used by the CLI and the service (`--ranker <name>`).
using EngineFactory = std::function<std::unique_ptr<ProbeInterface>()>;
void register_engine(const std::string& name, EngineFactory factory);
std::unique_ptr<ProbeInterface> make_engine(std::string_view name);
std::vector<std::string> engine_names();

// ---------------------------------------------------------------------------
// Status probing shared by every explainer.

struct Mode {
  enum class Kind { kSearch, kTeam };
  Kind kind = Kind::kSearch;
  NodeId seed{};

  static Mode search() { return {}; }
  static Mode team(NodeId seed) { return {Kind::kTeam, seed}; }
  bool is_team() const { return kind == Kind::kTeam; }
};

// Outcome of one probe for the subject. status ⟺ rank ≤ k holds in both
// modes (team mode: rank = join order, k = team size). beam_rank is the
// ordering signal used by counterfactual search: rank in search mode; in team
// mode join order for members and n + 1 − (uncovered keywords the subject
// holds) for non-members.
struct Outcome {
  bool status = false;
  std::uint32_t rank = 0;
  std::uint32_t k = 0;
  std::uint32_t beam_rank = 0;
  bool operator==(const Outcome&) const = default;
};

// Wall-clock and probe-count cutoff. Expired when elapsed >= seconds or
// probes >= probe_budget (budget 0 = unlimited).
class Deadline {
 public:
  Deadline() = default;
  Deadline(double seconds, std::uint64_t probe_budget = 0);

  static Deadline unlimited() { return {}; }
  bool expired(std::uint64_t probes) const;
  // Throws Timeout when expired.
  void check(std::uint64_t probes) const;

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
  double seconds_ = std::numeric_limits<double>::infinity();
  std::uint64_t probe_budget_ = 0;
};

// Memoizing black-box prober for one (network, query, subject, mode).
// Not thread-safe; each explanation task owns its own instance.
class StatusProbe {
 public:
  StatusProbe(const ProbeInterface& engine, const CollaborationNetwork& net, Query q,
              NodeId subject, Mode mode);

  const ProbeInterface& engine() const { return *engine_; }
  const CollaborationNetwork& network() const { return *net_; }
  const Query& query() const { return query_; }
  NodeId subject() const { return subject_; }
  const Mode& mode() const { return mode_; }

  // Outcome on the unperturbed input.
  const Outcome& initial() const { return initial_; }

  // Probe with `overlay` applied over the base query.
  Outcome evaluate(const PerturbationOverlay& overlay);
  // Probe with `overlay` applied over `keywords` in place of the base query
  // keywords (used to switch query features off). An empty keyword set
  // yields the empty-query convention: status false, rank n (n + 1 in team
  // mode).
  Outcome evaluate(const PerturbationOverlay& overlay, const std::vector<SkillId>& keywords);

  void set_deadline(Deadline d) { deadline_ = d; }
  const Deadline& deadline() const { return deadline_; }

  std::uint64_t engine_calls() const { return engine_calls_; }
  std::uint64_t lookups() const { return lookups_; }
  void clear_cache();

 private:
  Outcome compute(const PerturbationOverlay& overlay, const std::vector<SkillId>& keywords);

  const ProbeInterface* engine_;
  const CollaborationNetwork* net_;
  Query query_;
  NodeId subject_;
  Mode mode_;
  Outcome initial_;
  Deadline deadline_;
  std::map<std::pair<std::vector<SkillId>, PerturbationOverlay>, Outcome> cache_;
  std::uint64_t engine_calls_ = 0;
  std::uint64_t lookups_ = 0;
};

}  // namespace exes

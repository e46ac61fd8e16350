#pragma once

// Skill-labeled collaboration networks: data model, TSV ingestion,
// perturbation overlays, and synthetic fixture generation.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace exes {

enum class NodeId : std::uint32_t {};
enum class SkillId : std::uint32_t {};

constexpr std::size_t index(NodeId n) { return static_cast<std::size_t>(n); }
constexpr std::size_t index(SkillId s) { return static_cast<std::size_t>(s); }
constexpr NodeId node_id(std::size_t i) { return static_cast<NodeId>(i); }
constexpr SkillId skill_id(std::size_t i) { return static_cast<SkillId>(i); }

// Unordered node pair stored canonically with u < v.
struct EdgeKey {
  NodeId u{};
  NodeId v{};

  static EdgeKey make(NodeId a, NodeId b) {
    return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
  }
  auto operator<=>(const EdgeKey&) const = default;
};

struct NodeSkill {
  NodeId node{};
  SkillId skill{};
  auto operator<=>(const NodeSkill&) const = default;
};

// Raw, unvalidated network content. Node ids are positions in `names`.
struct NetworkData {
  std::vector<std::string> names;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::pair<std::uint32_t, std::string>> skills;
  // Universe members held by no node.
  std::vector<std::string> extra_skills;
};

// Immutable, validated collaboration network. Skill ids are assigned in
// lexicographic token order; adjacency and skill lists are sorted.
class CollaborationNetwork {
 public:
  static CollaborationNetwork from_data(const NetworkData& data);

  std::size_t num_nodes() const { return names_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_skills() const { return tokens_.size(); }
  std::size_t num_skill_pairs() const;

  const std::string& display_name(NodeId n) const { return names_[index(n)]; }
  std::span<const NodeId> neighbors(NodeId n) const { return adjacency_[index(n)]; }
  std::span<const SkillId> skills_of(NodeId n) const { return skills_[index(n)]; }
  const std::vector<EdgeKey>& edges() const { return edges_; }

  bool has_node(NodeId n) const { return index(n) < names_.size(); }
  bool has_skill(NodeId n, SkillId s) const;
  bool has_edge(NodeId a, NodeId b) const;

  const std::string& skill_token(SkillId s) const { return tokens_[index(s)]; }
  std::optional<SkillId> find_skill(std::string_view token) const;
  // Throws UnknownSkill.
  SkillId skill(std::string_view token) const;
  // Resolves a display name, or a decimal id when no name matches.
  // Throws UnknownNode.
  NodeId node(std::string_view name_or_id) const;
  // Throws UnknownNode when n is out of range.
  void check_node(NodeId n) const;

  // FNV-1a over the canonical TSV rendering.
  std::uint64_t content_hash() const;

 private:
  CollaborationNetwork() = default;

  std::vector<std::string> names_;
  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<std::vector<SkillId>> skills_;
  std::vector<EdgeKey> edges_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, SkillId> token_index_;
  std::unordered_map<std::string, NodeId> name_index_;
};

bool is_valid_skill_token(std::string_view token);

// Keywords are kept sorted and unique.
struct Query {
  std::vector<SkillId> keywords;
  std::uint32_t k = 1;

  bool contains(SkillId s) const;
  bool operator==(const Query&) const = default;
};

// Throws UnknownSkill / InvalidArgument.
Query make_query(const CollaborationNetwork& net,
                 std::span<const std::string> tokens, std::uint32_t k);
void validate_query(const CollaborationNetwork& net, const Query& q);

// Delta over a base network and query. The base is never mutated.
struct PerturbationOverlay {
  std::set<NodeSkill> added_skills;
  std::set<NodeSkill> removed_skills;
  std::set<EdgeKey> added_edges;
  std::set<EdgeKey> removed_edges;
  std::set<SkillId> added_keywords;

  std::size_t size() const {
    return added_skills.size() + removed_skills.size() + added_edges.size() +
           removed_edges.size() + added_keywords.size();
  }
  bool empty() const { return size() == 0; }
  auto operator<=>(const PerturbationOverlay&) const = default;
};

// Throws OverlayConflict when an entry is not applicable to (base, q).
void validate_overlay(const CollaborationNetwork& base, const Query& q,
                      const PerturbationOverlay& overlay);

// Read-only view of a base network with an overlay's graph deltas applied.
class NetworkView {
 public:
  explicit NetworkView(const CollaborationNetwork& base);
  // Validates the skill and edge parts of the overlay against the base.
  NetworkView(const CollaborationNetwork& base, const PerturbationOverlay& overlay);

  const CollaborationNetwork& base() const { return *base_; }
  std::size_t num_nodes() const { return base_->num_nodes(); }
  bool is_identity() const;

  bool has_skill(NodeId n, SkillId s) const;
  bool has_edge(NodeId a, NodeId b) const;
  std::size_t degree(NodeId n) const;
  std::vector<NodeId> neighbors(NodeId n) const;
  std::vector<SkillId> skills_of(NodeId n) const;
  std::vector<EdgeKey> edges() const;

  template <typename Fn>
  void for_each_neighbor(NodeId n, Fn&& fn) const {
    for (NodeId m : base_->neighbors(n)) {
      if (!removed_edges_.empty() && is_removed(EdgeKey::make(n, m))) continue;
      fn(m);
    }
    for (auto it = added_adjacency_.find(n); it != added_adjacency_.end() && it->first == n; ++it) {
      fn(it->second);
    }
  }

 private:
  bool is_removed(const EdgeKey& e) const;

  const CollaborationNetwork* base_;
  std::vector<NodeSkill> added_skills_;
  std::vector<NodeSkill> removed_skills_;
  std::vector<EdgeKey> removed_edges_;
  std::multimap<NodeId, NodeId> added_adjacency_;
  std::unordered_map<std::uint32_t, std::int64_t> degree_delta_;
};

// Logical (view, query') pair for an overlay; q' = q ∪ added keywords.
std::pair<NetworkView, Query> apply_overlay(const CollaborationNetwork& base,
                                            const Query& q,
                                            const PerturbationOverlay& overlay);

// Nodes within hop distance d of p (including p), ascending. Throws UnknownNode.
std::vector<NodeId> neighborhood(const NetworkView& view, NodeId p, std::size_t d);
std::vector<NodeId> neighborhood(const CollaborationNetwork& net, NodeId p, std::size_t d);

// Edges of the induced subgraph over a sorted node set.
std::vector<EdgeKey> induced_edges(const NetworkView& view, std::span<const NodeId> nodes);

bool is_connected(const CollaborationNetwork& net);

// TSV ingestion (nodes.tsv, edges.tsv, skills.tsv).
CollaborationNetwork load_network(const std::filesystem::path& nodes_file,
                                  const std::filesystem::path& edges_file,
                                  const std::filesystem::path& skills_file);
CollaborationNetwork load_network_dir(const std::filesystem::path& dir);
CollaborationNetwork parse_network(std::string_view nodes_tsv, std::string_view edges_tsv,
                                   std::string_view skills_tsv);

struct NetworkTsv {
  std::string nodes;
  std::string edges;
  std::string skills;
};
NetworkTsv render_network(const CollaborationNetwork& net);
void save_network_dir(const CollaborationNetwork& net, const std::filesystem::path& dir);

struct SyntheticParams {
  std::size_t n_nodes = 100;
  std::size_t n_skills = 30;
  std::size_t avg_degree = 6;
  std::size_t skills_per_node = 5;
  std::uint64_t seed = 7;
};

// Topic-structured random network: skills are grouped into topics, nodes
// draw most skills from one topic and prefer same-topic collaborators.
// Connected by construction (components are chained). Every skill in the
// universe is held by at least one node. Throws InfeasibleParameters.
CollaborationNetwork generate_synthetic(const SyntheticParams& params);

// T4 fixture: path p1-p2-p3-p4 with skills {ml,graphs},{ml,db},{db,sql},{sql,ir}.
CollaborationNetwork make_t4();

}  // namespace exes

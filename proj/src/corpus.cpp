#include "exes/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <deque>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "exes/error.hpp"

namespace exes {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDanglingEdge: return "DanglingEdge";
    case ErrorCode::kDuplicateNode: return "DuplicateNode";
    case ErrorCode::kSelfLoop: return "SelfLoop";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kUnknownSkill: return "UnknownSkill";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kOverlayConflict: return "OverlayConflict";
    case ErrorCode::kInfeasibleParameters: return "InfeasibleParameters";
    case ErrorCode::kDimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::kEmptyVocabulary: return "EmptyVocabulary";
    case ErrorCode::kNoCandidates: return "NoCandidates";
    case ErrorCode::kDirectionMismatch: return "DirectionMismatch";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kOracleUnavailable: return "OracleUnavailable";
    case ErrorCode::kInsufficientPopulation: return "InsufficientPopulation";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string edge_text(std::uint32_t u, std::uint32_t v) {
  return "(" + std::to_string(u) + "," + std::to_string(v) + ")";
}

}  // namespace

bool is_valid_skill_token(std::string_view token) {
  if (token.empty()) return false;
  for (char c : token) {
    auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc) || std::isupper(uc) || std::iscntrl(uc)) return false;
  }
  return true;
}

CollaborationNetwork CollaborationNetwork::from_data(const NetworkData& data) {
  CollaborationNetwork net;
  const std::size_t n = data.names.size();
  net.names_ = data.names;
  net.adjacency_.assign(n, {});
  net.skills_.assign(n, {});

  std::set<EdgeKey> edge_set;
  for (const auto& [u, v] : data.edges) {
    if (u == v) throw Error(ErrorCode::kSelfLoop, "self-loop at node " + std::to_string(u));
    if (u >= n || v >= n) throw Error(ErrorCode::kDanglingEdge, "edge " + edge_text(u, v));
    if (!edge_set.insert(EdgeKey::make(node_id(u), node_id(v))).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate edge " + edge_text(u, v));
    }
  }
  net.edges_.assign(edge_set.begin(), edge_set.end());
  for (const EdgeKey& e : net.edges_) {
    net.adjacency_[index(e.u)].push_back(e.v);
    net.adjacency_[index(e.v)].push_back(e.u);
  }
  for (auto& adj : net.adjacency_) std::sort(adj.begin(), adj.end());

  std::set<std::string> universe;
  for (const auto& [node, token] : data.skills) {
    if (node >= n) throw Error(ErrorCode::kUnknownNode, "skill on node " + std::to_string(node));
    if (!is_valid_skill_token(token)) {
      throw Error(ErrorCode::kInvalidArgument, "invalid skill token '" + token + "'");
    }
    universe.insert(token);
  }
  for (const auto& token : data.extra_skills) {
    if (!is_valid_skill_token(token)) {
      throw Error(ErrorCode::kInvalidArgument, "invalid skill token '" + token + "'");
    }
    universe.insert(token);
  }
  net.tokens_.assign(universe.begin(), universe.end());
  for (std::size_t i = 0; i < net.tokens_.size(); ++i) {
    net.token_index_.emplace(net.tokens_[i], skill_id(i));
  }
  for (const auto& [node, token] : data.skills) {
    net.skills_[node].push_back(net.token_index_.at(token));
  }
  for (auto& skills : net.skills_) {
    std::sort(skills.begin(), skills.end());
    if (std::adjacent_find(skills.begin(), skills.end()) != skills.end()) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate skill assignment");
    }
  }
  for (std::size_t i = 0; i < n; ++i) net.name_index_.emplace(net.names_[i], node_id(i));
  return net;
}

std::size_t CollaborationNetwork::num_skill_pairs() const {
  std::size_t total = 0;
  for (const auto& s : skills_) total += s.size();
  return total;
}

bool CollaborationNetwork::has_skill(NodeId n, SkillId s) const {
  const auto& skills = skills_[index(n)];
  return std::binary_search(skills.begin(), skills.end(), s);
}

bool CollaborationNetwork::has_edge(NodeId a, NodeId b) const {
  const auto& adj = adjacency_[index(a)];
  return std::binary_search(adj.begin(), adj.end(), b);
}

std::optional<SkillId> CollaborationNetwork::find_skill(std::string_view token) const {
  auto it = token_index_.find(std::string(token));
  if (it == token_index_.end()) return std::nullopt;
  return it->second;
}

SkillId CollaborationNetwork::skill(std::string_view token) const {
  if (auto s = find_skill(token)) return *s;
  throw Error(ErrorCode::kUnknownSkill, "unknown skill '" + std::string(token) + "'");
}

NodeId CollaborationNetwork::node(std::string_view name_or_id) const {
  if (auto it = name_index_.find(std::string(name_or_id)); it != name_index_.end()) {
    return it->second;
  }
  std::uint32_t id = 0;
  const char* first = name_or_id.data();
  const char* last = first + name_or_id.size();
  auto [ptr, ec] = std::from_chars(first, last, id);
  if (ec == std::errc() && ptr == last && id < names_.size()) return node_id(id);
  throw Error(ErrorCode::kUnknownNode, "unknown node '" + std::string(name_or_id) + "'");
}

void CollaborationNetwork::check_node(NodeId n) const {
  if (!has_node(n)) {
    throw Error(ErrorCode::kUnknownNode, "unknown node " + std::to_string(index(n)));
  }
}

std::uint64_t CollaborationNetwork::content_hash() const {
  NetworkTsv tsv = render_network(*this);
  std::uint64_t h = 1469598103934665603ULL;
  for (const std::string* part : {&tsv.nodes, &tsv.edges, &tsv.skills}) {
    for (unsigned char c : *part) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Query

bool Query::contains(SkillId s) const {
  return std::binary_search(keywords.begin(), keywords.end(), s);
}

Query make_query(const CollaborationNetwork& net, std::span<const std::string> tokens,
                 std::uint32_t k) {
  Query q;
  q.k = k;
  for (const auto& t : tokens) q.keywords.push_back(net.skill(t));
  std::sort(q.keywords.begin(), q.keywords.end());
  q.keywords.erase(std::unique(q.keywords.begin(), q.keywords.end()), q.keywords.end());
  validate_query(net, q);
  return q;
}

void validate_query(const CollaborationNetwork& net, const Query& q) {
  if (q.keywords.empty()) throw Error(ErrorCode::kInvalidArgument, "query has no keywords");
  if (q.k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (!std::is_sorted(q.keywords.begin(), q.keywords.end()) ||
      std::adjacent_find(q.keywords.begin(), q.keywords.end()) != q.keywords.end()) {
    throw Error(ErrorCode::kInvalidArgument, "query keywords must be sorted and unique");
  }
  for (SkillId s : q.keywords) {
    if (index(s) >= net.num_skills()) {
      throw Error(ErrorCode::kUnknownSkill, "skill id " + std::to_string(index(s)));
    }
  }
}

// ---------------------------------------------------------------------------
// Overlays

namespace {

void validate_graph_overlay(const CollaborationNetwork& base, const PerturbationOverlay& o) {
  auto conflict = [](const std::string& what) { throw Error(ErrorCode::kOverlayConflict, what); };
  for (const auto& ns : o.added_skills) {
    base.check_node(ns.node);
    if (index(ns.skill) >= base.num_skills()) conflict("unknown skill in added_skills");
    if (base.has_skill(ns.node, ns.skill)) conflict("added skill already held");
  }
  for (const auto& ns : o.removed_skills) {
    base.check_node(ns.node);
    if (index(ns.skill) >= base.num_skills() || !base.has_skill(ns.node, ns.skill)) {
      conflict("removed skill not held");
    }
  }
  for (const auto& e : o.added_edges) {
    base.check_node(e.u);
    base.check_node(e.v);
    if (!(e.u < e.v)) conflict("added edge not canonical or self-loop");
    if (base.has_edge(e.u, e.v)) conflict("added edge already in base");
  }
  for (const auto& e : o.removed_edges) {
    base.check_node(e.u);
    base.check_node(e.v);
    if (!(e.u < e.v) || !base.has_edge(e.u, e.v)) conflict("removed edge not in base");
  }
}

}  // namespace

void validate_overlay(const CollaborationNetwork& base, const Query& q,
                      const PerturbationOverlay& o) {
  validate_graph_overlay(base, o);
  for (SkillId s : o.added_keywords) {
    if (index(s) >= base.num_skills()) {
      throw Error(ErrorCode::kOverlayConflict, "unknown added keyword");
    }
    if (q.contains(s)) throw Error(ErrorCode::kOverlayConflict, "added keyword already in query");
  }
}

NetworkView::NetworkView(const CollaborationNetwork& base) : base_(&base) {}

NetworkView::NetworkView(const CollaborationNetwork& base, const PerturbationOverlay& o)
    : base_(&base),
      added_skills_(o.added_skills.begin(), o.added_skills.end()),
      removed_skills_(o.removed_skills.begin(), o.removed_skills.end()),
      removed_edges_(o.removed_edges.begin(), o.removed_edges.end()) {
  validate_graph_overlay(base, o);
  for (const auto& e : o.added_edges) {
    added_adjacency_.emplace(e.u, e.v);
    added_adjacency_.emplace(e.v, e.u);
    ++degree_delta_[static_cast<std::uint32_t>(e.u)];
    ++degree_delta_[static_cast<std::uint32_t>(e.v)];
  }
  for (const auto& e : o.removed_edges) {
    --degree_delta_[static_cast<std::uint32_t>(e.u)];
    --degree_delta_[static_cast<std::uint32_t>(e.v)];
  }
}

bool NetworkView::is_identity() const {
  return added_skills_.empty() && removed_skills_.empty() && removed_edges_.empty() &&
         added_adjacency_.empty();
}

bool NetworkView::is_removed(const EdgeKey& e) const {
  return std::binary_search(removed_edges_.begin(), removed_edges_.end(), e);
}

bool NetworkView::has_skill(NodeId n, SkillId s) const {
  const NodeSkill key{n, s};
  if (base_->has_skill(n, s)) {
    return removed_skills_.empty() ||
           !std::binary_search(removed_skills_.begin(), removed_skills_.end(), key);
  }
  return !added_skills_.empty() &&
         std::binary_search(added_skills_.begin(), added_skills_.end(), key);
}

bool NetworkView::has_edge(NodeId a, NodeId b) const {
  if (a == b) return false;
  const EdgeKey e = EdgeKey::make(a, b);
  if (base_->has_edge(a, b)) return !is_removed(e);
  for (auto it = added_adjacency_.find(a); it != added_adjacency_.end() && it->first == a; ++it) {
    if (it->second == b) return true;
  }
  return false;
}

std::size_t NetworkView::degree(NodeId n) const {
  auto base_degree = static_cast<std::int64_t>(base_->neighbors(n).size());
  auto it = degree_delta_.find(static_cast<std::uint32_t>(n));
  if (it != degree_delta_.end()) base_degree += it->second;
  return static_cast<std::size_t>(base_degree);
}

std::vector<NodeId> NetworkView::neighbors(NodeId n) const {
  std::vector<NodeId> out;
  for_each_neighbor(n, [&](NodeId m) { out.push_back(m); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SkillId> NetworkView::skills_of(NodeId n) const {
  std::vector<SkillId> out;
  for (SkillId s : base_->skills_of(n)) {
    if (has_skill(n, s)) out.push_back(s);
  }
  auto lo = std::lower_bound(added_skills_.begin(), added_skills_.end(), NodeSkill{n, SkillId{}});
  for (; lo != added_skills_.end() && lo->node == n; ++lo) out.push_back(lo->skill);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<EdgeKey> NetworkView::edges() const {
  std::vector<EdgeKey> out;
  for (const EdgeKey& e : base_->edges()) {
    if (!is_removed(e)) out.push_back(e);
  }
  for (const auto& [a, b] : added_adjacency_) {
    if (a < b) out.push_back(EdgeKey{a, b});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<NetworkView, Query> apply_overlay(const CollaborationNetwork& base, const Query& q,
                                            const PerturbationOverlay& overlay) {
  validate_overlay(base, q, overlay);
  Query q2 = q;
  q2.keywords.insert(q2.keywords.end(), overlay.added_keywords.begin(),
                     overlay.added_keywords.end());
  std::sort(q2.keywords.begin(), q2.keywords.end());
  return {NetworkView(base, overlay), std::move(q2)};
}

// ---------------------------------------------------------------------------
// Neighborhoods

std::vector<NodeId> neighborhood(const NetworkView& view, NodeId p, std::size_t d) {
  view.base().check_node(p);
  std::vector<std::size_t> dist(view.num_nodes(), SIZE_MAX);
  std::deque<NodeId> frontier{p};
  dist[index(p)] = 0;
  std::vector<NodeId> out{p};
  while (!frontier.empty()) {
    NodeId u = frontier.front();
    frontier.pop_front();
    if (dist[index(u)] >= d) continue;
    view.for_each_neighbor(u, [&](NodeId w) {
      if (dist[index(w)] != SIZE_MAX) return;
      dist[index(w)] = dist[index(u)] + 1;
      out.push_back(w);
      frontier.push_back(w);
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> neighborhood(const CollaborationNetwork& net, NodeId p, std::size_t d) {
  return neighborhood(NetworkView(net), p, d);
}

std::vector<EdgeKey> induced_edges(const NetworkView& view, std::span<const NodeId> nodes) {
  std::vector<EdgeKey> out;
  for (NodeId u : nodes) {
    view.for_each_neighbor(u, [&](NodeId w) {
      if (u < w && std::binary_search(nodes.begin(), nodes.end(), w)) {
        out.push_back(EdgeKey{u, w});
      }
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_connected(const CollaborationNetwork& net) {
  if (net.num_nodes() == 0) return true;
  return neighborhood(net, NodeId{0}, net.num_nodes()).size() == net.num_nodes();
}

// ---------------------------------------------------------------------------
// TSV

namespace {

struct TsvLine {
  std::size_t number;
  std::vector<std::string_view> fields;
};

std::vector<TsvLine> split_tsv(std::string_view text) {
  std::vector<TsvLine> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++number;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    TsvLine parsed{number, {}};
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      parsed.fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    lines.push_back(std::move(parsed));
    if (end == text.size()) break;
  }
  return lines;
}

[[noreturn]] void parse_error(std::string_view file, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParseError,
              std::string(file) + " line " + std::to_string(line) + ": " + what);
}

std::uint32_t parse_id(std::string_view file, std::size_t line, std::string_view field) {
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    parse_error(file, line, "expected non-negative integer, got '" + std::string(field) + "'");
  }
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << content;
}

}  // namespace

CollaborationNetwork parse_network(std::string_view nodes_tsv, std::string_view edges_tsv,
                                   std::string_view skills_tsv) {
  NetworkData data;

  std::vector<std::pair<std::uint32_t, std::string>> nodes;
  std::set<std::uint32_t> seen_ids;
  for (const auto& line : split_tsv(nodes_tsv)) {
    if (line.fields.size() != 2) parse_error("nodes", line.number, "expected 2 fields");
    std::uint32_t id = parse_id("nodes", line.number, line.fields[0]);
    if (!seen_ids.insert(id).second) {
      throw Error(ErrorCode::kDuplicateNode, "node id " + std::to_string(id));
    }
    nodes.emplace_back(id, std::string(line.fields[1]));
  }
  std::sort(nodes.begin(), nodes.end());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].first != i) {
      throw Error(ErrorCode::kParseError, "nodes: ids must be dense 0..n-1, missing " +
                                              std::to_string(i));
    }
    data.names.push_back(nodes[i].second);
  }
  const std::size_t n = data.names.size();

  std::set<EdgeKey> edges;
  for (const auto& line : split_tsv(edges_tsv)) {
    if (line.fields.size() != 2) parse_error("edges", line.number, "expected 2 fields");
    std::uint32_t u = parse_id("edges", line.number, line.fields[0]);
    std::uint32_t v = parse_id("edges", line.number, line.fields[1]);
    if (u == v) throw Error(ErrorCode::kSelfLoop, "self-loop at node " + std::to_string(u));
    if (u >= n || v >= n) throw Error(ErrorCode::kDanglingEdge, "edge " + edge_text(u, v));
    if (!edges.insert(EdgeKey::make(node_id(u), node_id(v))).second) {
      parse_error("edges", line.number, "duplicate edge " + edge_text(u, v));
    }
    data.edges.emplace_back(u, v);
  }

  std::set<std::pair<std::uint32_t, std::string>> pairs;
  for (const auto& line : split_tsv(skills_tsv)) {
    if (line.fields.size() != 2) parse_error("skills", line.number, "expected 2 fields");
    std::uint32_t node = parse_id("skills", line.number, line.fields[0]);
    if (node >= n) parse_error("skills", line.number, "unknown node " + std::to_string(node));
    std::string token(line.fields[1]);
    if (!is_valid_skill_token(token)) {
      parse_error("skills", line.number, "invalid skill token '" + token + "'");
    }
    if (!pairs.emplace(node, token).second) {
      parse_error("skills", line.number, "duplicate skill '" + token + "'");
    }
    data.skills.emplace_back(node, std::move(token));
  }
  return CollaborationNetwork::from_data(data);
}

CollaborationNetwork load_network(const std::filesystem::path& nodes_file,
                                  const std::filesystem::path& edges_file,
                                  const std::filesystem::path& skills_file) {
  return parse_network(read_file(nodes_file), read_file(edges_file), read_file(skills_file));
}

CollaborationNetwork load_network_dir(const std::filesystem::path& dir) {
  return load_network(dir / "nodes.tsv", dir / "edges.tsv", dir / "skills.tsv");
}

NetworkTsv render_network(const CollaborationNetwork& net) {
  NetworkTsv out;
  for (std::size_t i = 0; i < net.num_nodes(); ++i) {
    out.nodes += std::to_string(i) + "\t" + net.display_name(node_id(i)) + "\n";
  }
  for (const EdgeKey& e : net.edges()) {
    out.edges += std::to_string(index(e.u)) + "\t" + std::to_string(index(e.v)) + "\n";
  }
  for (std::size_t i = 0; i < net.num_nodes(); ++i) {
    for (SkillId s : net.skills_of(node_id(i))) {
      out.skills += std::to_string(i) + "\t" + net.skill_token(s) + "\n";
    }
  }
  return out;
}

void save_network_dir(const CollaborationNetwork& net, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  NetworkTsv tsv = render_network(net);
  write_file(dir / "nodes.tsv", tsv.nodes);
  write_file(dir / "edges.tsv", tsv.edges);
  write_file(dir / "skills.tsv", tsv.skills);
}

// ---------------------------------------------------------------------------
// Fixtures

CollaborationNetwork generate_synthetic(const SyntheticParams& p) {
  auto infeasible = [](const std::string& why) {
    throw Error(ErrorCode::kInfeasibleParameters, why);
  };
  if (p.n_nodes == 0 || p.n_skills == 0 || p.skills_per_node == 0) {
    infeasible("n_nodes, n_skills and skills_per_node must be positive");
  }
  if (p.skills_per_node > p.n_skills) infeasible("skills_per_node exceeds n_skills");
  if (p.n_nodes * p.skills_per_node < p.n_skills) {
    infeasible("not enough skill slots to cover the skill universe");
  }
  if (p.avg_degree > p.n_nodes - 1) infeasible("avg_degree exceeds n_nodes - 1");

  std::mt19937_64 rng(p.seed);
  auto uniform = [&rng](std::size_t bound) {
    return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng);
  };
  auto chance = [&rng](double prob) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < prob;
  };

  const std::size_t n = p.n_nodes;
  const std::size_t width = std::to_string(p.n_skills - 1).size();
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < p.n_skills; ++i) {
    std::string digits = std::to_string(i);
    tokens.push_back("s" + std::string(width - digits.size(), '0') + digits);
  }

  const std::size_t n_topics = std::max<std::size_t>(1, p.n_skills / 5);
  auto topic_of_skill = [&](std::size_t s) { return s % n_topics; };
  std::vector<std::vector<std::size_t>> topic_skills(n_topics);
  for (std::size_t s = 0; s < p.n_skills; ++s) topic_skills[topic_of_skill(s)].push_back(s);

  std::vector<std::size_t> node_topic(n);
  for (auto& t : node_topic) t = uniform(n_topics);

  std::vector<std::set<std::size_t>> held(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t s = 0; s < p.n_skills; ++s) held[order[s % n]].insert(s);
  for (std::size_t u = 0; u < n; ++u) {
    const auto& own = topic_skills[node_topic[u]];
    while (held[u].size() < p.skills_per_node) {
      std::size_t s = chance(0.8) ? own[uniform(own.size())] : uniform(p.n_skills);
      held[u].insert(s);
    }
  }

  std::set<EdgeKey> edges;
  const std::size_t target = (n * p.avg_degree) / 2;
  std::vector<std::vector<std::size_t>> topic_nodes(n_topics);
  for (std::size_t u = 0; u < n; ++u) topic_nodes[node_topic[u]].push_back(u);
  std::size_t attempts = 0;
  while (edges.size() < target && attempts < target * 100 + 1000) {
    ++attempts;
    std::size_t a = uniform(n);
    const auto& peers = topic_nodes[node_topic[a]];
    std::size_t b = (chance(0.7) && peers.size() > 1) ? peers[uniform(peers.size())] : uniform(n);
    if (a == b) continue;
    edges.insert(EdgeKey::make(node_id(a), node_id(b)));
  }

  // Chain components together through their smallest members.
  std::vector<std::size_t> component(n, SIZE_MAX);
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : edges) {
    adj[index(e.u)].push_back(index(e.v));
    adj[index(e.v)].push_back(index(e.u));
  }
  std::vector<std::size_t> roots;
  for (std::size_t s = 0; s < n; ++s) {
    if (component[s] != SIZE_MAX) continue;
    roots.push_back(s);
    std::deque<std::size_t> frontier{s};
    component[s] = roots.size() - 1;
    while (!frontier.empty()) {
      std::size_t u = frontier.front();
      frontier.pop_front();
      for (std::size_t w : adj[u]) {
        if (component[w] == SIZE_MAX) {
          component[w] = roots.size() - 1;
          frontier.push_back(w);
        }
      }
    }
  }
  for (std::size_t i = 1; i < roots.size(); ++i) {
    edges.insert(EdgeKey::make(node_id(roots[i - 1]), node_id(roots[i])));
  }

  NetworkData data;
  for (std::size_t u = 0; u < n; ++u) data.names.push_back("p" + std::to_string(u + 1));
  for (const auto& e : edges) {
    data.edges.emplace_back(static_cast<std::uint32_t>(e.u), static_cast<std::uint32_t>(e.v));
  }
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t s : held[u]) data.skills.emplace_back(static_cast<std::uint32_t>(u), tokens[s]);
  }
  return CollaborationNetwork::from_data(data);
}

CollaborationNetwork make_t4() {
  NetworkData data;
  data.names = {"p1", "p2", "p3", "p4"};
  data.edges = {{0, 1}, {1, 2}, {2, 3}};
  data.skills = {{0, "ml"}, {0, "graphs"}, {1, "ml"}, {1, "db"},
                 {2, "db"}, {2, "sql"},   {3, "sql"}, {3, "ir"}};
  return CollaborationNetwork::from_data(data);
}

}  // namespace exes
